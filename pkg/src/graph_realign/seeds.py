"""Seed identification: find a known k-clique in the target graph from its
members' degrees and pairwise common-neighbor counts.

Everything here works on the undirected symmetric projection.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .graph import UndirectedGraph

UNIQUE, AMBIGUOUS, NOT_FOUND = "Unique", "Ambiguous", "NotFound"


class NoCliqueFound(RuntimeError):
    pass


@dataclass(frozen=True)
class SeedAuxiliaryInfo:
    k: int
    degrees: tuple[int, ...]
    # indexed like itertools.combinations(range(k), 2)
    common_neighbor_counts: tuple[int, ...]
    epsilon: float = 0.0
    source_nodes: tuple[int, ...] = ()

    def __post_init__(self):
        if len(self.degrees) != self.k:
            raise ValueError("need exactly k degrees")
        if len(self.common_neighbor_counts) != self.k * (self.k - 1) // 2:
            raise ValueError("need exactly k*(k-1)/2 common-neighbor counts")
        if any(d < self.k - 1 for d in self.degrees):
            raise ValueError("clique members have degree at least k-1")
        if self.epsilon < 0:
            raise ValueError("epsilon must be non-negative")

    def pair_index(self) -> dict[tuple[int, int], int]:
        return {p: i for i, p in enumerate(itertools.combinations(range(self.k), 2))}


@dataclass
class SeedResult:
    reason: str
    mapping: dict[int, int] | None = None
    matches: int = 0

    def __bool__(self):
        return self.mapping is not None


def is_clique(g: UndirectedGraph, nodes) -> bool:
    nodes = list(nodes)
    if len(set(nodes)) != len(nodes):
        return False
    return all(v in g.neighbor_set(u) for u, v in itertools.combinations(nodes, 2))


def sample_clique(g: UndirectedGraph, k: int, rng: np.random.Generator, max_restarts: int = 10_000) -> list[int]:
    """Grow a clique from a random node by repeatedly adding a random node
    adjacent to everything picked so far; start over on a dead end.

    This does not sample uniformly over cliques, which keeps dense
    regions from dominating the draws.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    if g.n == 0:
        raise NoCliqueFound("empty graph")
    for _ in range(max_restarts):
        start = int(rng.integers(g.n))
        clique = [start]
        cand = g.neighbor_set(start)
        while len(clique) < k and cand:
            pool = sorted(cand)
            nxt = pool[int(rng.integers(len(pool)))]
            clique.append(nxt)
            cand = cand & g.neighbor_set(nxt)
        if len(clique) == k:
            return clique
    raise NoCliqueFound(f"no {k}-clique found after {max_restarts} restarts")


def make_aux_info(g: UndirectedGraph, clique, epsilon: float = 0.0) -> SeedAuxiliaryInfo:
    """Read degrees and pairwise common-neighbor counts of ``clique``.

    Members are ordered by (degree, id) so the record does not depend on
    the order the clique was found in.
    """
    clique = list(clique)
    if not is_clique(g, clique):
        raise ValueError(f"{clique} is not a clique")
    nodes = sorted(clique, key=lambda v: (g.degree(v), v))
    counts = tuple(len(g.neighbor_set(a) & g.neighbor_set(b)) for a, b in itertools.combinations(nodes, 2))
    return SeedAuxiliaryInfo(len(nodes), tuple(g.degree(v) for v in nodes), counts, epsilon, tuple(nodes))


def _within(aux_value: float, target_value: float, eps: float) -> bool:
    return aux_value * (1 - eps) <= target_value <= aux_value * (1 + eps)


def iter_matches(target: UndirectedGraph, info: SeedAuxiliaryInfo):
    """Yield every (clique, slot assignment) in ``target`` matching ``info``.

    Candidate nodes are first filtered by degree; cliques are grown in
    increasing id order through neighbors of the nodes already chosen,
    and each complete clique is checked under all k! slot assignments.
    """
    k, eps = info.k, info.epsilon
    deg = target.degrees()
    fits = np.zeros(target.n, dtype=bool)
    for a in set(info.degrees):
        fits |= (deg >= a * (1 - eps)) & (deg <= a * (1 + eps))
    ok = set(np.flatnonzero(fits).tolist())
    pidx = info.pair_index()

    def assignments(clique):
        cn = {}
        for a, b in itertools.combinations(clique, 2):
            cn[a, b] = cn[b, a] = len(target.neighbor_set(a) & target.neighbor_set(b))
        for perm in itertools.permutations(clique):
            if not all(_within(info.degrees[i], deg[v], eps) for i, v in enumerate(perm)):
                continue
            if all(_within(info.common_neighbor_counts[pidx[i, j]], cn[perm[i], perm[j]], eps)
                   for i, j in pidx):
                yield perm

    def grow(clique, cand):
        if len(clique) == k:
            for perm in assignments(clique):
                yield tuple(clique), perm
            return
        for v in sorted(cand):
            yield from grow(clique + [v], {u for u in cand & target.neighbor_set(v) if u > v})

    for u in sorted(ok):
        yield from grow([u], {v for v in target.neighbor_set(u) if v > u and v in ok})


def find_seed(target: UndirectedGraph, info: SeedAuxiliaryInfo) -> SeedResult:
    """Map the auxiliary clique onto its unique match in ``target``.

    Stops at the second match. A clique that matches under two different
    slot assignments counts as two matches, since the node-to-node map
    would be ambiguous.
    """
    found = None
    for n_found, (_, perm) in enumerate(iter_matches(target, info), 1):
        if n_found > 1:
            return SeedResult(AMBIGUOUS, None, n_found)
        found = perm
    if found is None:
        return SeedResult(NOT_FOUND)
    return SeedResult(UNIQUE, dict(zip(info.source_nodes, (int(v) for v in found))), 1)

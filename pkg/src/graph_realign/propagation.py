"""Seed-and-extend propagation of a node mapping between two directed graphs.

Each visited left node is scored against right-side candidates reached
through its already-mapped neighbors; the best candidate is accepted
only if it stands out (eccentricity at least ``theta``) and the reverse
computation, with the graphs swapped, picks the left node back.

The inner loops run in a numba kernel over CSR arrays. Score vectors
are accumulated sparsely: a scratch buffer is reused and only the
touched entries are read and reset.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numba
import numpy as np

from .graph import DirectedGraph

REJECTED = None


@dataclass
class Mapping:
    """Partial 1-1 map from left node ids to right node ids."""

    pairs: dict[int, int] = field(default_factory=dict)
    seeds: frozenset[int] = frozenset()

    def __post_init__(self):
        self.pairs = {int(k): int(v) for k, v in self.pairs.items()}
        self.seeds = frozenset(int(s) for s in self.seeds)
        if len(set(self.pairs.values())) != len(self.pairs):
            raise ValueError("mapping is not injective")
        missing = self.seeds - self.pairs.keys()
        if missing:
            raise ValueError(f"seed nodes without a pair: {sorted(missing)[:5]}")

    @classmethod
    def from_seeds(cls, pairs: dict[int, int]) -> "Mapping":
        return cls(dict(pairs), frozenset(pairs))

    def __len__(self):
        return len(self.pairs)

    def __contains__(self, lnode):
        return lnode in self.pairs

    def __getitem__(self, lnode):
        return self.pairs[lnode]

    def get(self, lnode, default=None):
        return self.pairs.get(lnode, default)

    def image(self) -> set[int]:
        return set(self.pairs.values())

    def inverse(self) -> "Mapping":
        return Mapping({v: k for k, v in self.pairs.items()},
                       frozenset(self.pairs[s] for s in self.seeds))

    def is_seed(self, lnode) -> bool:
        return lnode in self.seeds


@dataclass(frozen=True)
class PropagationConfig:
    theta: float = 0.5
    max_passes: int = 50
    rng_seed: int = 0

    def __post_init__(self):
        if not self.theta >= 0:
            raise ValueError("theta must be non-negative")
        if self.max_passes < 1:
            raise ValueError("max_passes must be at least 1")


@dataclass
class PropagationStats:
    passes: int = 0
    changed_per_pass: list[int] = field(default_factory=list)
    score_increments: int = 0


def eccentricity(values):
    """``(max - second max) / population std``, or REJECTED.

    Fewer than two values, or zero spread, yields REJECTED.
    """
    x = np.asarray(values, dtype=np.float64).ravel()
    if x.size < 2:
        return REJECTED
    sigma = float(x.std())
    if sigma == 0.0:
        return REJECTED
    top2 = np.partition(x, x.size - 2)[-2:]
    return float((top2[1] - top2[0]) / sigma)


# --- kernel -----------------------------------------------------------------
# Graph arrays are passed as (in_ptr, in_idx, out_ptr, out_idx).

@numba.njit(cache=True)
def _accumulate(l_in_ptr, l_in_idx, l_out_ptr, l_out_idx,
                r_in_ptr, r_in_idx, r_out_ptr, r_out_idx,
                l2r, r2l, lnode, scores, touched):
    nt = 0
    incs = 0
    for k in range(l_in_ptr[lnode], l_in_ptr[lnode + 1]):
        rnbr = l2r[l_in_idx[k]]
        if rnbr < 0:
            continue
        for j in range(r_out_ptr[rnbr], r_out_ptr[rnbr + 1]):
            rnode = r_out_idx[j]
            if r2l[rnode] >= 0:
                continue
            if scores[rnode] == 0.0:
                touched[nt] = rnode
                nt += 1
            scores[rnode] += 1.0 / math.sqrt(r_in_ptr[rnode + 1] - r_in_ptr[rnode])
            incs += 1
    for k in range(l_out_ptr[lnode], l_out_ptr[lnode + 1]):
        rnbr = l2r[l_out_idx[k]]
        if rnbr < 0:
            continue
        for j in range(r_in_ptr[rnbr], r_in_ptr[rnbr + 1]):
            rnode = r_in_idx[j]
            if r2l[rnode] >= 0:
                continue
            if scores[rnode] == 0.0:
                touched[nt] = rnode
                nt += 1
            scores[rnode] += 1.0 / math.sqrt(r_out_ptr[rnode + 1] - r_out_ptr[rnode])
            incs += 1
    return nt, incs


@numba.njit(cache=True)
def _best(scores, touched, nt):
    """Eccentricity and argmax over touched entries; resets the buffer.

    A single touched candidate is compared against one implicit zero.
    Returns (accepted_flag, ecc, argmax) where accepted_flag is False
    when the eccentricity is undefined.
    """
    if nt == 0:
        return False, 0.0, -1
    best = -1
    m1 = -1.0
    m2 = -1.0
    total = 0.0
    for i in range(nt):
        v = touched[i]
        s = scores[v]
        total += s
        if s > m1:
            m2 = m1
            m1 = s
            best = v
        elif s == m1:
            m2 = s
            if v < best:
                best = v
        elif s > m2:
            m2 = s
    if nt < 2:
        m2 = 0.0
    count = nt if nt >= 2 else 2
    mean = total / count
    var = 0.0
    for i in range(nt):
        d = scores[touched[i]] - mean
        var += d * d
    if nt < 2:
        var += mean * mean
    for i in range(nt):
        scores[touched[i]] = 0.0
    sigma = math.sqrt(var / count)
    if sigma == 0.0:
        return False, 0.0, best
    return True, (m1 - m2) / sigma, best


@numba.njit(cache=True)
def _step(l_in_ptr, l_in_idx, l_out_ptr, l_out_idx,
          r_in_ptr, r_in_idx, r_out_ptr, r_out_idx,
          l2r, r2l, is_seed, order, mapped_nbrs, last_seen, theta,
          scores_r, touched_r, scores_l, touched_l, counter):
    changed = 0
    for lnode in order:
        if is_seed[lnode] or mapped_nbrs[lnode] <= last_seen[lnode]:
            continue
        last_seen[lnode] = mapped_nbrs[lnode]
        old = l2r[lnode]
        if old >= 0:
            l2r[lnode] = -1
            r2l[old] = -1
        nt, incs = _accumulate(l_in_ptr, l_in_idx, l_out_ptr, l_out_idx,
                               r_in_ptr, r_in_idx, r_out_ptr, r_out_idx,
                               l2r, r2l, lnode, scores_r, touched_r)
        counter[0] += incs
        ok, ecc, rnode = _best(scores_r, touched_r, nt)
        accept = False
        if ok and ecc >= theta:
            nt, incs = _accumulate(r_in_ptr, r_in_idx, r_out_ptr, r_out_idx,
                                   l_in_ptr, l_in_idx, l_out_ptr, l_out_idx,
                                   r2l, l2r, rnode, scores_l, touched_l)
            counter[0] += incs
            ok2, ecc2, back = _best(scores_l, touched_l, nt)
            accept = ok2 and ecc2 >= theta and back == lnode
        if accept:
            l2r[lnode] = rnode
            r2l[rnode] = lnode
            if old < 0:
                changed += 1
                for k in range(l_in_ptr[lnode], l_in_ptr[lnode + 1]):
                    mapped_nbrs[l_in_idx[k]] += 1
                for k in range(l_out_ptr[lnode], l_out_ptr[lnode + 1]):
                    mapped_nbrs[l_out_idx[k]] += 1
            elif old != rnode:
                changed += 1
        elif old >= 0:
            l2r[lnode] = old
            r2l[old] = lnode
    return changed


def _arrays(g: DirectedGraph):
    return g.in_ptr, g.in_idx, g.out_ptr, g.out_idx


class _State:
    """Mutable array form of a mapping plus revisit bookkeeping."""

    def __init__(self, lgraph: DirectedGraph, rgraph: DirectedGraph, mapping: Mapping):
        n1, n2 = lgraph.n, rgraph.n
        self.l2r = np.full(n1, -1, dtype=np.int64)
        self.r2l = np.full(n2, -1, dtype=np.int64)
        self.is_seed = np.zeros(n1, dtype=np.bool_)
        for l, r in mapping.pairs.items():
            if not (0 <= l < n1 and 0 <= r < n2):
                raise ValueError(f"pair ({l}, {r}) outside the graphs")
            self.l2r[l] = r
            self.r2l[r] = l
        for s in mapping.seeds:
            self.is_seed[s] = True
        mapped = (self.l2r >= 0).astype(np.int64)
        # mapped-neighbor incidences: mapped in-neighbors + mapped out-neighbors
        src, dst = lgraph.edge_arrays()
        self.mapped_nbrs = (np.bincount(dst, weights=mapped[src], minlength=n1)
                            + np.bincount(src, weights=mapped[dst], minlength=n1)).astype(np.int64)
        self.last_seen = np.zeros(n1, dtype=np.int64)
        self.scores_r = np.zeros(n2, dtype=np.float64)
        self.touched_r = np.zeros(max(n2, 1), dtype=np.int64)
        self.scores_l = np.zeros(n1, dtype=np.float64)
        self.touched_l = np.zeros(max(n1, 1), dtype=np.int64)
        self.counter = np.zeros(1, dtype=np.int64)

    def step(self, lgraph, rgraph, order, theta) -> int:
        return int(_step(*_arrays(lgraph), *_arrays(rgraph),
                         self.l2r, self.r2l, self.is_seed,
                         np.asarray(order, dtype=np.int64),
                         self.mapped_nbrs, self.last_seen, float(theta),
                         self.scores_r, self.touched_r, self.scores_l, self.touched_l,
                         self.counter))

    def mapping(self, seeds) -> Mapping:
        idx = np.flatnonzero(self.l2r >= 0)
        return Mapping(dict(zip(idx.tolist(), self.l2r[idx].tolist())), seeds)


def match_scores(lgraph: DirectedGraph, rgraph: DirectedGraph, mapping: Mapping, lnode: int) -> dict[int, float]:
    """Scores of right nodes for ``lnode``; only nonzero entries are returned.

    Each mapped in-neighbor's image passes ``1/sqrt(in_degree)`` to each
    of its unmapped out-neighbors, and each mapped out-neighbor's image
    passes ``1/sqrt(out_degree)`` to each of its unmapped in-neighbors.
    """
    st = _State(lgraph, rgraph, mapping)
    nt, _ = _accumulate(*_arrays(lgraph), *_arrays(rgraph), st.l2r, st.r2l,
                        int(lnode), st.scores_r, st.touched_r)
    return {int(v): float(st.scores_r[v]) for v in st.touched_r[:nt]}


def _check_seeds(lgraph, rgraph, seeds: Mapping):
    for l, r in seeds.pairs.items():
        if not (0 <= l < lgraph.n and 0 <= r < rgraph.n):
            raise ValueError(f"seed pair ({l}, {r}) outside the graphs")


def propagation_step(lgraph: DirectedGraph, rgraph: DirectedGraph, mapping: Mapping,
                     config: PropagationConfig, rng: np.random.Generator | None = None):
    """One pass over the left nodes that have at least one mapped neighbor.

    Returns ``(new_mapping, changed_count)``; the input is not modified.
    """
    if rng is None:
        rng = np.random.default_rng(config.rng_seed)
    st = _State(lgraph, rgraph, mapping)
    changed = st.step(lgraph, rgraph, rng.permutation(lgraph.n), config.theta)
    return st.mapping(mapping.seeds), changed


def propagate(lgraph: DirectedGraph, rgraph: DirectedGraph, seeds: Mapping,
              config: PropagationConfig = PropagationConfig(), return_stats: bool = False):
    """Extend ``seeds`` until a full pass installs or changes no pair.

    A left node is re-examined only when its number of mapped neighbor
    incidences has grown since its previous visit. Seed pairs are never
    changed; other pairs may be remapped on revisit.
    """
    if not isinstance(seeds, Mapping):
        seeds = Mapping.from_seeds(dict(seeds))
    _check_seeds(lgraph, rgraph, seeds)
    seeds = Mapping(seeds.pairs, frozenset(seeds.pairs))
    rng = np.random.default_rng(config.rng_seed)
    st = _State(lgraph, rgraph, seeds)
    stats = PropagationStats()
    for _ in range(config.max_passes):
        changed = st.step(lgraph, rgraph, rng.permutation(lgraph.n), config.theta)
        stats.passes += 1
        stats.changed_per_pass.append(changed)
        if changed == 0:
            break
    stats.score_increments = int(st.counter[0])
    result = st.mapping(seeds.seeds)
    return (result, stats) if return_stats else result

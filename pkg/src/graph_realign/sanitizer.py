"""Manufacture (auxiliary, target) graph pairs with known ground truth.

The node set is split into three random blocks A, B, C; the auxiliary
graph lives on A+B and the target on B+C, so B is the overlap. Edge
noise comes from deleting edges independently from two copies of the
edge set before projecting each copy onto its node set.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .graph import DirectedGraph, induced_subgraph, load_edge_list, relabel, write_edge_list
from .propagation import Mapping


@dataclass(frozen=True)
class OverlapParams:
    alpha_v: float
    alpha_e: float
    rng_seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.alpha_v <= 1.0:
            raise ValueError(f"alpha_v must lie in [0, 1], got {self.alpha_v}")
        if not 0.0 < self.alpha_e <= 1.0:
            raise ValueError(f"alpha_e must lie in (0, 1], got {self.alpha_e}")

    @property
    def beta(self) -> float:
        return beta_from_alpha_e(self.alpha_e)


@dataclass
class ExperimentInstance:
    g_aux: DirectedGraph
    g_san: DirectedGraph
    ground_truth: Mapping
    params: OverlapParams | None = None

    def save(self, directory) -> None:
        d = Path(directory)
        d.mkdir(parents=True, exist_ok=True)
        write_edge_list(self.g_aux, d / "aux.edges")
        write_edge_list(self.g_san, d / "san.edges")
        with (d / "ground_truth.csv").open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["aux_id", "san_id"])
            for a, s in sorted(self.ground_truth.pairs.items()):
                w.writerow([self.g_aux.label(a), self.g_san.label(s)])
        if self.params is not None:
            meta = asdict(self.params)
            meta["beta"] = self.params.beta
            (d / "params.json").write_text(json.dumps(meta, indent=2) + "\n")

    @classmethod
    def load(cls, directory) -> "ExperimentInstance":
        """Read an instance directory written by :meth:`save`.

        Ground-truth nodes absent from an edge file (isolated nodes) are
        appended to that graph as isolated nodes so no pair is lost.
        """
        d = Path(directory)
        g_aux = load_edge_list(d / "aux.edges")
        g_san = load_edge_list(d / "san.edges")
        rows = read_pairs(d / "ground_truth.csv")
        g_aux = _with_labels(g_aux, [a for a, _ in rows])
        g_san = _with_labels(g_san, [s for _, s in rows])
        ai, si = g_aux.label_index(), g_san.label_index()
        gt = Mapping({ai[a]: si[s] for a, s in rows})
        params = None
        if (d / "params.json").exists():
            meta = json.loads((d / "params.json").read_text())
            params = OverlapParams(meta["alpha_v"], meta["alpha_e"], meta.get("rng_seed", 0))
        return cls(g_aux, g_san, gt, params)


def read_pairs(path) -> list[tuple[str, str]]:
    with open(path, newline="", encoding="utf-8") as fh:
        r = csv.reader(fh)
        next(r, None)
        return [(row[0], row[1]) for row in r if row]


def _with_labels(g: DirectedGraph, wanted) -> DirectedGraph:
    known = g.label_index()
    extra = [w for w in dict.fromkeys(wanted) if w not in known]
    if not extra:
        return g
    s, d = g.edge_arrays()
    labels = [g.label(v) for v in range(g.n)] + extra
    return DirectedGraph(g.n + len(extra), s, d, labels=labels)


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def sample_node_overlap(v_count: int, alpha_v: float, rng: np.random.Generator):
    """Randomly split ``range(v_count)`` into blocks A, B, C.

    ``|B| = round(alpha_v * v_count)``; A takes the ceiling of half the
    remainder and C the floor. Returns ``(V1, V2, shared)`` as sorted
    arrays with ``V1 = A + B`` and ``V2 = B + C``.
    """
    if not 0.0 <= alpha_v <= 1.0:
        raise ValueError(f"alpha_v must lie in [0, 1], got {alpha_v}")
    if v_count < 1:
        raise ValueError("v_count must be at least 1")
    nb = min(_round_half_up(alpha_v * v_count), v_count)
    rest = v_count - nb
    na = (rest + 1) // 2
    perm = rng.permutation(v_count)
    a, b, c = perm[:na], perm[na:na + nb], perm[na + nb:]
    v1 = np.sort(np.concatenate([a, b]))
    v2 = np.sort(np.concatenate([b, c]))
    return v1, v2, np.sort(b)


def beta_from_alpha_e(alpha_e: float) -> float:
    """Per-copy deletion probability giving expected edge overlap ``alpha_e``.

    Solves (1 - b)^2 / (1 - b^2) = alpha_e for b.
    """
    if not 0.0 < alpha_e <= 1.0:
        raise ValueError(f"alpha_e must lie in (0, 1], got {alpha_e}")
    return (1.0 - alpha_e) / (1.0 + alpha_e)


def procedure_b(g: DirectedGraph, v1, v2, beta: float, rng: np.random.Generator,
                shuffle_target: bool = True, params: OverlapParams | None = None) -> ExperimentInstance:
    """Delete edges independently from two copies of ``g``, then project.

    Copy 1 is projected on ``v1`` (auxiliary graph), copy 2 on ``v2``
    (target). With ``shuffle_target`` the target ids are randomly
    permuted so that id order carries no information about the truth.
    """
    if not 0.0 <= beta < 1.0:
        raise ValueError(f"beta must lie in [0, 1), got {beta}")
    s, d = g.edge_arrays()
    keep1 = rng.random(s.size) >= beta
    keep2 = rng.random(s.size) >= beta
    copy1 = DirectedGraph(g.n, s[keep1], d[keep1], labels=g.labels)
    # the released target carries no names, only its own dense ids
    copy2 = DirectedGraph(g.n, s[keep2], d[keep2])
    g_aux, map1 = induced_subgraph(copy1, v1)
    g_san, map2 = induced_subgraph(copy2, v2)
    if shuffle_target:
        perm = rng.permutation(g_san.n)
        g_san = relabel(g_san, perm)
        map2 = {o: int(perm[i]) for o, i in map2.items()}
    shared = sorted(set(map1) & set(map2))
    gt = Mapping({map1[x]: map2[x] for x in shared})
    return ExperimentInstance(g_aux, g_san, gt, params)


def make_instance(g: DirectedGraph, params: OverlapParams, rng: np.random.Generator | None = None,
                  shuffle_target: bool = True) -> ExperimentInstance:
    if rng is None:
        rng = np.random.default_rng(params.rng_seed)
    v1, v2, _ = sample_node_overlap(g.n, params.alpha_v, rng)
    return procedure_b(g, v1, v2, params.beta, rng, shuffle_target=shuffle_target, params=params)


def jaccard(a: set, b: set) -> float:
    if not a and not b:
        raise ValueError("Jaccard coefficient undefined for two empty sets")
    return len(a & b) / len(a | b)


def _translated_edge_sets(inst: ExperimentInstance):
    gt = inst.ground_truth.pairs
    if not gt:
        raise ValueError("edge overlap undefined: ground truth is empty")
    image = set(gt.values())
    e_aux = {(gt[u], gt[v]) for u, v in inst.g_aux.edges() if u in gt and v in gt}
    e_san = {(u, v) for u, v in inst.g_san.edges() if u in image and v in image}
    return e_aux, e_san


def edge_overlap(inst: ExperimentInstance) -> float:
    """Jaccard overlap of the two edge sets restricted to shared nodes."""
    e_aux, e_san = _translated_edge_sets(inst)
    return jaccard(e_aux, e_san)


def raw_edge_overlap(inst: ExperimentInstance) -> float:
    """Jaccard overlap of the complete edge sets (much lower than edge_overlap)."""
    e_aux, e_san = _translated_edge_sets(inst)
    common = len(e_aux & e_san)
    union = inst.g_aux.num_edges + inst.g_san.num_edges - common
    return common / union if union else 1.0

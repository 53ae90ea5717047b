"""Preferential-attachment generator for directed test graphs."""
from __future__ import annotations

import numpy as np

from .graph import DirectedGraph


def generate_synthetic(n: int, edges_per_node: int, reciprocity: float = 0.5,
                       rng: np.random.Generator | int | None = None) -> DirectedGraph:
    """Grow a directed scale-free graph by preferential attachment.

    The first ``edges_per_node`` nodes form a complete directed core.
    Every later node sends ``edges_per_node`` edges to distinct existing
    nodes picked with probability proportional to their current total
    degree; each new edge is reciprocated with probability
    ``reciprocity``. With ``reciprocity=0`` the edge count is exactly
    ``edges_per_node * (n - 1)`` once ``n >= edges_per_node``.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if edges_per_node < 1:
        raise ValueError("edges_per_node must be at least 1")
    if not 0.0 <= reciprocity <= 1.0:
        raise ValueError("reciprocity must lie in [0, 1]")
    rng = np.random.default_rng(rng)
    m = edges_per_node
    core = min(n, m)
    src: list[int] = []
    dst: list[int] = []
    # one entry per edge endpoint, so uniform draws are degree-proportional
    ends: list[int] = []
    for u in range(core):
        for v in range(core):
            if u != v:
                src.append(u)
                dst.append(v)
                ends += (u, v)
    for v in range(core, n):
        if ends:
            chosen: dict[int, None] = {}
            while len(chosen) < m:
                for i in rng.integers(0, len(ends), size=2 * m):
                    chosen.setdefault(ends[i])
                    if len(chosen) == m:
                        break
            targets = list(chosen)
        else:
            targets = [int(t) for t in rng.choice(v, size=min(m, v), replace=False)]
        back = rng.random(len(targets)) < reciprocity
        for t, r in zip(targets, back):
            src.append(v)
            dst.append(t)
            ends += (v, t)
            if r:
                src.append(t)
                dst.append(v)
                ends += (t, v)
    return DirectedGraph(n, src, dst)

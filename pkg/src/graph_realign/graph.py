"""Simple directed and undirected graphs on dense integer node ids.

Adjacency is stored in CSR form (``ptr``/``idx`` arrays) with every
neighbor row sorted, so neighborhoods are cheap array slices and set
intersections are deterministic.
"""
from __future__ import annotations

from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


class EdgeListParseError(ValueError):
    def __init__(self, path, lineno: int, line: str):
        super().__init__(f"{path}:{lineno}: expected 'src dst', got {line!r}")
        self.lineno = lineno


def _csr(n: int, src: np.ndarray, dst: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # (src, dst) must already be sorted lexicographically
    counts = np.bincount(src, minlength=n) if n else np.zeros(0, dtype=np.int64)
    ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=ptr[1:])
    return ptr, np.ascontiguousarray(dst, dtype=np.int64)


def _dedup_pairs(n: int, src, dst) -> tuple[np.ndarray, np.ndarray]:
    src = np.asarray(src, dtype=np.int64).ravel()
    dst = np.asarray(dst, dtype=np.int64).ravel()
    if src.shape != dst.shape:
        raise ValueError("src and dst must have equal length")
    if src.size and (src.min() < 0 or dst.min() < 0 or src.max() >= n or dst.max() >= n):
        raise ValueError(f"edge endpoint outside 0..{n - 1}")
    keep = src != dst
    code = np.unique(src[keep] * max(n, 1) + dst[keep])
    return code // max(n, 1), code % max(n, 1)


class DirectedGraph:
    """Immutable simple directed graph.

    Self-loops and duplicate edges are dropped at construction.
    ``labels`` optionally maps dense ids back to external string names.
    """

    def __init__(self, n: int, src=(), dst=(), labels: Sequence[str] | None = None):
        if n < 0:
            raise ValueError("n must be non-negative")
        if labels is not None and len(labels) != n:
            raise ValueError("labels must have one entry per node")
        self.n = int(n)
        s, d = _dedup_pairs(self.n, src, dst)
        self.out_ptr, self.out_idx = _csr(self.n, s, d)
        order = np.lexsort((s, d))
        self.in_ptr, self.in_idx = _csr(self.n, d[order], s[order])
        self.labels = list(labels) if labels is not None else None
        for arr in (self.out_ptr, self.out_idx, self.in_ptr, self.in_idx):
            arr.setflags(write=False)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], labels=None) -> "DirectedGraph":
        e = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
        return cls(n, e[:, 0], e[:, 1], labels=labels)

    @property
    def num_edges(self) -> int:
        return int(self.out_idx.size)

    def out_neighbors(self, v: int) -> np.ndarray:
        return self.out_idx[self.out_ptr[v]:self.out_ptr[v + 1]]

    def in_neighbors(self, v: int) -> np.ndarray:
        return self.in_idx[self.in_ptr[v]:self.in_ptr[v + 1]]

    def out_degrees(self) -> np.ndarray:
        return np.diff(self.out_ptr)

    def in_degrees(self) -> np.ndarray:
        return np.diff(self.in_ptr)

    def degrees(self) -> np.ndarray:
        """Total degree (in + out) per node."""
        return self.out_degrees() + self.in_degrees()

    def degree(self, v: int) -> int:
        return int(self.out_ptr[v + 1] - self.out_ptr[v] + self.in_ptr[v + 1] - self.in_ptr[v])

    def has_edge(self, u: int, v: int) -> bool:
        row = self.out_neighbors(u)
        i = np.searchsorted(row, v)
        return bool(i < row.size and row[i] == v)

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """(src, dst) arrays in lexicographic order."""
        src = np.repeat(np.arange(self.n, dtype=np.int64), self.out_degrees())
        return src, self.out_idx.copy()

    def edges(self) -> list[tuple[int, int]]:
        s, d = self.edge_arrays()
        return list(zip(s.tolist(), d.tolist()))

    def edge_set(self) -> set[tuple[int, int]]:
        return set(self.edges())

    def label(self, v: int) -> str:
        return self.labels[v] if self.labels is not None else str(v)

    def label_index(self) -> dict[str, int]:
        return {self.label(v): v for v in range(self.n)}

    def check(self) -> None:
        """Full-scan consistency check of the dual adjacency."""
        out_pairs = set(self.edges())
        in_pairs = {(int(u), v) for v in range(self.n) for u in self.in_neighbors(v)}
        assert out_pairs == in_pairs, "in/out adjacency disagree"
        assert all(u != v for u, v in out_pairs), "self-loop present"
        for v in range(self.n):
            for row in (self.out_neighbors(v), self.in_neighbors(v)):
                assert np.all(np.diff(row) > 0), f"row {v} unsorted or duplicated"

    def __eq__(self, other):
        if not isinstance(other, DirectedGraph):
            return NotImplemented
        return (self.n == other.n and np.array_equal(self.out_ptr, other.out_ptr)
                and np.array_equal(self.out_idx, other.out_idx))

    def __repr__(self):
        return f"DirectedGraph(n={self.n}, edges={self.num_edges})"


class UndirectedGraph:
    """Immutable simple undirected graph with symmetric sorted adjacency."""

    def __init__(self, n: int, src=(), dst=()):
        self.n = int(n)
        s = np.asarray(src, dtype=np.int64).ravel()
        d = np.asarray(dst, dtype=np.int64).ravel()
        s, d = _dedup_pairs(self.n, np.concatenate([s, d]), np.concatenate([d, s]))
        self.ptr, self.idx = _csr(self.n, s, d)
        self.ptr.setflags(write=False)
        self.idx.setflags(write=False)
        self._sets: list[frozenset] | None = None

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "UndirectedGraph":
        e = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
        return cls(n, e[:, 0], e[:, 1])

    @property
    def num_edges(self) -> int:
        return int(self.idx.size // 2)

    def neighbors(self, v: int) -> np.ndarray:
        return self.idx[self.ptr[v]:self.ptr[v + 1]]

    def neighbor_set(self, v: int) -> frozenset:
        if self._sets is None:
            self._sets = [frozenset(self.neighbors(u).tolist()) for u in range(self.n)]
        return self._sets[v]

    def degrees(self) -> np.ndarray:
        return np.diff(self.ptr)

    def degree(self, v: int) -> int:
        return int(self.ptr[v + 1] - self.ptr[v])

    def has_edge(self, u: int, v: int) -> bool:
        row = self.neighbors(u)
        i = np.searchsorted(row, v)
        return bool(i < row.size and row[i] == v)

    def edges(self) -> list[tuple[int, int]]:
        """Each undirected edge once, as (low, high)."""
        out = []
        for u in range(self.n):
            row = self.neighbors(u)
            out.extend((u, int(v)) for v in row[np.searchsorted(row, u):])
        return out

    def __repr__(self):
        return f"UndirectedGraph(n={self.n}, edges={self.num_edges})"


def common_neighbors(g: UndirectedGraph, u: int, v: int) -> int:
    """Size of the intersection of two sorted neighbor rows (merge walk)."""
    a, b = g.neighbors(u), g.neighbors(v)
    return int(np.intersect1d(a, b, assume_unique=True).size)


def induced_subgraph(g: DirectedGraph, keep: Iterable[int]) -> tuple[DirectedGraph, dict[int, int]]:
    """Subgraph on ``keep`` with ids re-densified in increasing old-id order.

    Returns the subgraph and the old->new id map.
    """
    keep = np.unique(np.fromiter(keep, dtype=np.int64))
    if keep.size and (keep[0] < 0 or keep[-1] >= g.n):
        raise ValueError("keep contains nodes not in the graph")
    new_id = np.full(g.n, -1, dtype=np.int64)
    new_id[keep] = np.arange(keep.size)
    s, d = g.edge_arrays()
    m = (new_id[s] >= 0) & (new_id[d] >= 0)
    labels = [g.labels[i] for i in keep.tolist()] if g.labels is not None else None
    sub = DirectedGraph(keep.size, new_id[s[m]], new_id[d[m]], labels=labels)
    return sub, {int(o): i for i, o in enumerate(keep.tolist())}


def to_symmetric_undirected(g: DirectedGraph) -> UndirectedGraph:
    """Keep {u, v} only when both (u, v) and (v, u) are edges of ``g``."""
    s, d = g.edge_arrays()
    n = max(g.n, 1)
    codes = s * n + d
    rev = np.isin(d * n + s, codes, assume_unique=True)
    m = rev & (s < d)
    return UndirectedGraph(g.n, s[m], d[m])


def relabel(g: DirectedGraph, perm: np.ndarray) -> DirectedGraph:
    """Graph with node ``v`` renamed to ``perm[v]``."""
    perm = np.asarray(perm, dtype=np.int64)
    s, d = g.edge_arrays()
    labels = None
    if g.labels is not None:
        labels = [""] * g.n
        for v, p in enumerate(perm.tolist()):
            labels[p] = g.labels[v]
    return DirectedGraph(g.n, perm[s], perm[d], labels=labels)


def load_edge_list(path) -> DirectedGraph:
    """Read a whitespace-separated ``src dst`` edge list.

    Lines starting with ``#`` and blank lines are skipped. Node ids are
    assigned in order of first appearance and the input tokens are kept
    as labels.
    """
    index: dict[str, int] = {}
    src: list[int] = []
    dst: list[int] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            parts = stripped.split()
            if len(parts) != 2:
                raise EdgeListParseError(path, lineno, line.rstrip("\n"))
            a, b = (index.setdefault(t, len(index)) for t in parts)
            src.append(a)
            dst.append(b)
    labels = list(index)
    return DirectedGraph(len(labels), src, dst, labels=labels)


def write_edge_list(g: DirectedGraph, path) -> None:
    """Write edges in dense-id order, one ``src dst`` label pair per line."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        fh.write(f"# nodes {g.n} edges {g.num_edges}\n")
        for u, v in g.edges():
            fh.write(f"{g.label(u)} {g.label(v)}\n")

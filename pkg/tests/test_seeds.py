import itertools

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from graph_realign.graph import UndirectedGraph, to_symmetric_undirected
from graph_realign.seeds import (AMBIGUOUS, NOT_FOUND, UNIQUE, NoCliqueFound, SeedAuxiliaryInfo, find_seed,
                                 is_clique, make_aux_info, sample_clique)
from graph_realign.synthetic import generate_synthetic


def ug(n, edges):
    return UndirectedGraph.from_edges(n, edges)


def complete(n):
    return ug(n, list(itertools.combinations(range(n), 2)))


def brute_matches(g, info):
    """Every (node tuple) whose degrees and pairwise common-neighbor counts
    fall inside the tolerance interval, by plain enumeration."""
    G = nx.Graph()
    G.add_nodes_from(range(g.n))
    G.add_edges_from(g.edges())
    eps = info.epsilon
    pidx = info.pair_index()
    hits = []
    for clique in nx.enumerate_all_cliques(G):
        if len(clique) != info.k:
            continue
        for perm in itertools.permutations(clique):
            ok = all(info.degrees[i] * (1 - eps) <= G.degree(v) <= info.degrees[i] * (1 + eps)
                     for i, v in enumerate(perm))
            ok = ok and all(
                info.common_neighbor_counts[p] * (1 - eps)
                <= len(set(G[perm[i]]) & set(G[perm[j]]))
                <= info.common_neighbor_counts[p] * (1 + eps)
                for (i, j), p in pidx.items())
            if ok:
                hits.append(perm)
    return hits


@st.composite
def small_graphs(draw):
    n = draw(st.integers(4, 9))
    pairs = list(itertools.combinations(range(n), 2))
    keep = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return ug(n, [p for p, k in zip(pairs, keep) if k])


class TestSampleClique:
    def test_complete_graph(self):
        c = sample_clique(complete(5), 4, np.random.default_rng(0))
        assert len(set(c)) == 4 and is_clique(complete(5), c)

    def test_path_has_no_triangle(self):
        with pytest.raises(NoCliqueFound):
            sample_clique(ug(4, [(0, 1), (1, 2), (2, 3)]), 3, np.random.default_rng(0), max_restarts=50)

    def test_two_triangles(self):
        g = ug(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
        seen = {frozenset(sample_clique(g, 3, np.random.default_rng(s))) for s in range(40)}
        assert seen == {frozenset({0, 1, 2}), frozenset({3, 4, 5})}

    def test_empty_graph(self):
        with pytest.raises(NoCliqueFound):
            sample_clique(ug(0, []), 2, np.random.default_rng(0))

    @given(small_graphs(), st.integers(2, 4), st.integers(0, 10_000))
    @settings(max_examples=60, deadline=None)
    def test_returns_real_clique_or_none_exists(self, g, k, seed):
        G = nx.Graph(g.edges())
        exists = any(len(c) >= k for c in nx.find_cliques(G)) if G.number_of_edges() else k < 2
        try:
            c = sample_clique(g, k, np.random.default_rng(seed), max_restarts=2000)
        except NoCliqueFound:
            assert not exists
        else:
            assert len(c) == k and is_clique(g, c)


class TestAuxInfo:
    def test_k4(self):
        info = make_aux_info(complete(4), [0, 1, 2, 3])
        assert info.degrees == (3, 3, 3, 3)
        assert info.common_neighbor_counts == (2,) * 6

    def test_isolated_triangle(self):
        g = ug(5, [(0, 1), (1, 2), (0, 2), (3, 4)])
        info = make_aux_info(g, [2, 0, 1])
        assert info.degrees == (2, 2, 2)
        assert info.common_neighbor_counts == (1, 1, 1)
        assert info.source_nodes == (0, 1, 2)

    def test_not_a_clique(self):
        with pytest.raises(ValueError):
            make_aux_info(ug(3, [(0, 1)]), [0, 1, 2])

    def test_validation(self):
        with pytest.raises(ValueError):
            SeedAuxiliaryInfo(3, (2, 2), (1, 1, 1))
        with pytest.raises(ValueError):
            SeedAuxiliaryInfo(3, (2, 2, 1), (1, 1, 1))

    @given(small_graphs(), st.integers(0, 1000))
    @settings(max_examples=60, deadline=None)
    def test_counts_match_recount(self, g, seed):
        try:
            c = sample_clique(g, 3, np.random.default_rng(seed), max_restarts=200)
        except NoCliqueFound:
            return
        info = make_aux_info(g, c)
        G = nx.Graph(g.edges())
        nodes = info.source_nodes
        assert info.degrees == tuple(G.degree(v) for v in nodes)
        assert info.common_neighbor_counts == tuple(
            len(list(nx.common_neighbors(G, a, b))) for a, b in itertools.combinations(nodes, 2))


class TestFindSeed:
    def test_unique_in_identity(self):
        # K4 hanging off distinct paths so every member has its own degree
        edges = list(itertools.combinations(range(4), 2)) + [(1, 4), (2, 5), (2, 6), (3, 7), (3, 8), (3, 9)]
        g = ug(10, edges)
        res = find_seed(g, make_aux_info(g, [0, 1, 2, 3]))
        assert res.reason == UNIQUE
        assert res.mapping == {v: v for v in range(4)}

    def test_two_copies_are_ambiguous(self):
        tri = [(0, 1), (1, 2), (0, 2)]
        g = ug(6, tri + [(a + 3, b + 3) for a, b in tri])
        assert find_seed(g, make_aux_info(g, [0, 1, 2])).reason == AMBIGUOUS

    def test_symmetric_clique_is_ambiguous(self):
        g = complete(4)
        assert find_seed(g, make_aux_info(g, [0, 1, 2, 3])).reason == AMBIGUOUS

    def test_missing_edges_not_found(self):
        g = complete(4)
        info = make_aux_info(g, [0, 1, 2, 3])
        assert find_seed(ug(4, [(0, 1), (1, 2), (2, 3)]), info).reason == NOT_FOUND

    @given(small_graphs(), small_graphs(), st.integers(0, 1000), st.sampled_from([0.0, 0.1, 0.5]))
    @settings(max_examples=80, deadline=None)
    def test_agrees_with_exhaustive_oracle(self, aux, target, seed, eps):
        try:
            c = sample_clique(aux, 3, np.random.default_rng(seed), max_restarts=200)
        except NoCliqueFound:
            return
        info = make_aux_info(aux, c, eps)
        hits = brute_matches(target, info)
        res = find_seed(target, info)
        expected = {0: NOT_FOUND, 1: UNIQUE}.get(len(hits), AMBIGUOUS)
        assert res.reason == expected
        if res.reason == UNIQUE:
            assert res.mapping == dict(zip(info.source_nodes, hits[0]))
            assert is_clique(target, res.mapping.values())

    @given(small_graphs(), st.integers(0, 1000))
    @settings(max_examples=60, deadline=None)
    def test_more_tolerance_never_fewer_matches(self, g, seed):
        try:
            c = sample_clique(g, 3, np.random.default_rng(seed), max_restarts=200)
        except NoCliqueFound:
            return
        counts = [len(brute_matches(g, make_aux_info(g, c, e))) for e in (0.0, 0.05, 0.25, 1.0)]
        assert counts == sorted(counts)
        assert counts[0] >= 1
        ranks = {NOT_FOUND: 0, UNIQUE: 1, AMBIGUOUS: 2}
        rs = [ranks[find_seed(g, make_aux_info(g, c, e)).reason] for e in (0.0, 0.05, 0.25, 1.0)]
        assert rs == sorted(rs)


def test_exact_unique_matches_are_correct_on_synthetic_graph():
    g = to_symmetric_undirected(generate_synthetic(800, 6, 0.6, 1))
    n_unique = 0
    for s in range(30):
        c = sample_clique(g, 4, np.random.default_rng(s))
        res = find_seed(g, make_aux_info(g, c, 0.0))
        assert res.reason != NOT_FOUND
        if res.reason == UNIQUE:
            n_unique += 1
            assert res.mapping == {v: v for v in c}
    assert n_unique > 0

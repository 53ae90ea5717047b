"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

The desk-scale sweeps (criteria 2 to 5) take a few minutes on one core.
"""
import math
import random
import statistics
import time
from fractions import Fraction

import numpy as np
import pytest

import oracles
from graph_realign import experiments as ex
from graph_realign.evaluation import (AttributeTable, CentralityWeights, ProbabilisticMapping,
                                      adversary_posterior, degree_centrality, perturbation_measure, success_error_rates)
from graph_realign.graph import DirectedGraph
from graph_realign.propagation import REJECTED, PropagationConfig, eccentricity, propagate
from graph_realign.sanitizer import OverlapParams, edge_overlap, make_instance
from graph_realign.synthetic import generate_synthetic

BOTTOM = None


def isotonic(y):
    """Pool-adjacent-violators fit, non-decreasing."""
    blocks = [[v, 1] for v in y]
    i = 0
    while i < len(blocks) - 1:
        if blocks[i][0] > blocks[i + 1][0]:
            v = (blocks[i][0] * blocks[i][1] + blocks[i + 1][0] * blocks[i + 1][1])
            n = blocks[i][1] + blocks[i + 1][1]
            blocks[i:i + 2] = [[v / n, n]]
            i = max(i - 1, 0)
        else:
            i += 1
    return [v for v, n in blocks for _ in range(n)]


def test_isotonic_helper():
    assert isotonic([0, 0.2, 0.1, 1.0]) == pytest.approx([0, 0.15, 0.15, 1.0])
    assert isotonic([1, 0]) == [0.5, 0.5]


# --- 1 ------------------------------------------------------------------------

@pytest.mark.slow
def test_identity_recovery(verdict):
    worst_s, worst_e, worst_t = 1.0, 0.0, 0.0
    for seed in range(5):
        g = generate_synthetic(10_000, 10, 0.5, np.random.default_rng(seed))
        avg_deg = 2 * g.num_edges / g.n
        assert 25 <= avg_deg <= 35
        inst = make_instance(g, OverlapParams(1.0, 1.0, seed))
        rng = np.random.default_rng(seed)
        t0 = time.perf_counter()
        seeds = ex.select_seeds(inst, 10, rng)
        mu = propagate(inst.g_aux, inst.g_san, seeds, PropagationConfig(rng_seed=seed))
        elapsed = time.perf_counter() - t0
        s, e = success_error_rates(mu, inst.ground_truth, degree_centrality(inst.g_aux),
                                   degree_centrality(inst.g_san))
        worst_s, worst_e, worst_t = min(worst_s, s), max(worst_e, e), max(worst_t, elapsed)
    ok = worst_s >= 0.95 and worst_e <= 0.02 and worst_t <= 60
    verdict(1, ok, f"min success {worst_s:.4f}, max error {worst_e:.4f}, max {worst_t:.1f}s per run")
    assert ok


# --- 2, 3, 4 ------------------------------------------------------------------

@pytest.fixture(scope="module")
def seed_sweep():
    cfg = ex.ExperimentConfig()  # n=10000, alpha_v=0.25, alpha_e=0.5, 10 trials, seeds 2..128
    rows = ex.run_seed_sweep(cfg)
    return cfg, rows


def _fractions(cfg, rows):
    return [np.mean([r["large_scale"] for r in rows if r["seed_count"] == c]) for c in cfg.seed_counts]


@pytest.mark.slow
def test_phase_transition(seed_sweep, verdict):
    cfg, rows = seed_sweep
    assert cfg.trials_per_point >= 10
    frac = _fractions(cfg, rows)
    smooth = isotonic(frac)
    ok = frac[0] <= 0.2 and frac[-1] >= 0.8 and all(b >= a for a, b in zip(smooth, smooth[1:]))
    # isotonic output is non-decreasing by construction; the check that
    # matters is that smoothing moved the raw curve only a little
    drift = max(abs(a - b) for a, b in zip(frac, smooth))
    ok = ok and drift <= 0.2
    pts = ", ".join(f"{c}:{f:.1f}" for c, f in zip(cfg.seed_counts, frac))
    verdict(2, ok, f"large-scale fraction by seed count {pts}; isotonic drift {drift:.2f}")
    assert ok


@pytest.mark.slow
def test_dies_out(seed_sweep, verdict):
    _, rows = seed_sweep
    failed = [r for r in rows if not r["large_scale"]]
    assert failed, "no failed runs to inspect"
    med = statistics.median(r["n_reidentified"] for r in failed)
    med_all = statistics.median(r["n_correct"] for r in failed)
    ok = med <= 50
    verdict(3, ok, f"{len(failed)} failed runs, median re-identified {med}, median n_correct incl. seeds {med_all}")
    assert ok


@pytest.mark.slow
def test_post_transition_stability(seed_sweep, verdict):
    cfg, rows = seed_sweep
    frac = _fractions(cfg, rows)
    transition = next(c for c, f in zip(cfg.seed_counts, frac) if f >= 0.5)
    succ = [r["success_rate"] for r in rows if r["large_scale"] and r["seed_count"] >= 2 * transition]
    assert len(succ) >= 2, "no large-scale runs past twice the transition"
    cv = statistics.pstdev(succ) / statistics.mean(succ)
    ok = cv <= 0.15
    verdict(4, ok, f"transition at {transition} seeds, CV {cv:.4f} over {len(succ)} runs")
    assert ok


# --- 5 ------------------------------------------------------------------------

@pytest.mark.slow
def test_noise_robustness(verdict):
    cfg = ex.ExperimentConfig()  # 50 seeds, alpha_e in {0.25, 0.5, 0.75, 1.0}
    rows = ex.run_noise_sweep(cfg)
    mean = {ae: np.mean([r["success_rate"] for r in rows if r["alpha_e"] == ae]) for ae in cfg.alpha_e_list}
    large = {ae: np.mean([r["large_scale"] for r in rows if r["alpha_e"] == ae]) for ae in cfg.alpha_e_list}
    ratio = mean[0.5] / mean[1.0]
    ok = ratio >= 0.5 and all(large[ae] >= 0.8 for ae in cfg.alpha_e_list if ae >= 0.5)
    pts = ", ".join(f"{ae}:{mean[ae]:.3f}/{large[ae]:.1f}" for ae in cfg.alpha_e_list)
    verdict(5, ok, f"success ratio 0.5 vs 1.0 = {ratio:.3f}; alpha_e:mean success/large-scale {pts}")
    assert ok


# --- 6 ------------------------------------------------------------------------

def test_beta_formula(verdict):
    t0 = time.perf_counter()
    g = generate_synthetic(3000, 5, 0.5, 11)
    lines, ok = [], True
    for ae in (0.25, 0.5, 0.75):
        vals = [edge_overlap(make_instance(g, OverlapParams(0.5, ae, 1000 * int(ae * 100) + i)))
                for i in range(100)]
        m, se = float(np.mean(vals)), float(np.std(vals, ddof=1) / math.sqrt(len(vals)))
        z = abs(m - ae) / se
        ok &= z <= 3
        lines.append(f"{ae}: {m:.4f} ({z:.2f} SE)")
    elapsed = time.perf_counter() - t0
    ok &= elapsed <= 30
    verdict(6, ok, "; ".join(lines) + f"; {elapsed:.1f}s")
    assert ok


# --- 7 ------------------------------------------------------------------------

def test_seed_identification(verdict):
    g = generate_synthetic(3000, 10, 0.5, 21)
    eps = [0.0, 0.05, 0.1, 0.25]
    rows = ex.run_seed_ident_sweep(eps, 100, g, k=4, rng_seed=3)
    unique = {e: [r for r in rows if r["epsilon"] == e and r["outcome"] == "Unique"] for e in eps}
    correct0 = all(r["correct"] is True for r in unique[0.0])
    rates = [len(unique[e]) / 100 for e in eps]
    ok = correct0 and len(unique[0.0]) > 0 and all(b <= a for a, b in zip(rates, rates[1:]))
    verdict(7, ok, f"{len(unique[0.0])}/100 unique at eps 0, all correct={correct0}; "
                   f"unique rate by eps {dict(zip(eps, rates))}")
    assert ok


# --- 8 ------------------------------------------------------------------------

def _random_digraph(r, n):
    edges = [(a, b) for a in range(n) for b in range(n) if a != b and r.random() < r.random()]
    return DirectedGraph.from_edges(n, edges)


def _random_rows(r, n_aux, n_san):
    rows = {}
    for a in range(n_aux):
        if r.random() < 0.25:
            continue
        cands = r.sample([BOTTOM, *range(n_san)], r.randint(1, min(4, n_san + 1)))
        raw = [r.randint(1, 9) for _ in cands]
        rows[a] = {c: Fraction(x, sum(raw)) for c, x in zip(cands, raw)}
    return rows


def _ecc_squared(values):
    """Exact squared eccentricity over rationals, or None when rejected."""
    if len(values) < 2:
        return None
    n = len(values)
    mean = sum(values) / n
    var = sum((x - mean) ** 2 for x in values) / n
    if var == 0:
        return None
    top = sorted(values, reverse=True)
    return (top[0] - top[1]) ** 2 / var


def test_metric_oracles(verdict):
    r = random.Random(8)
    counts = dict.fromkeys(("success_error", "posterior", "perturbation", "eccentricity"), 0)
    mismatches = []
    while min(counts.values()) < 1000:
        n = r.randint(1, 8)
        aux, san = _random_digraph(r, n), _random_digraph(r, n)

        keys = r.sample(range(n), r.randint(1, n))
        gt = dict(zip(keys, r.sample(range(n), len(keys))))
        rows = _random_rows(r, n, n)
        try:
            want = oracles.success_error(rows, gt, aux.edges(), san.edges())
        except ZeroDivisionError:
            want = None
        if want is not None:
            got = success_error_rates(ProbabilisticMapping(rows), gt, degree_centrality(aux),
                                      degree_centrality(san), exact=True)
            counts["success_error"] += 1
            if got != want:
                mismatches.append(("success_error", rows, gt))

        values = {v: r.choice("abc") for v in range(n) if r.random() < 0.7}
        attrs = AttributeTable(node_values={"X": values})
        a = r.randrange(n)
        got = adversary_posterior(ProbabilisticMapping(rows), attrs, "X", a)
        want = oracles.posterior(rows.get(a, {BOTTOM: 1}), values)
        counts["posterior"] += 1
        if got != want:
            mismatches.append(("posterior", rows, values))

        w = [r.randint(0, 5) for _ in range(n)]
        want = oracles.perturbation(aux.edges(), san.edges(), n, w)
        if want is not None:
            got = perturbation_measure(aux, san, CentralityWeights(np.array(w)), exact=True)
            counts["perturbation"] += 1
            if got != want:
                mismatches.append(("perturbation", aux.edges(), san.edges(), w))

        xs = [Fraction(r.randint(0, 12), r.randint(1, 4)) for _ in range(r.randint(1, 8))]
        got = eccentricity([float(x) for x in xs])
        want = _ecc_squared(xs)
        counts["eccentricity"] += 1
        if (got is REJECTED) != (want is None):
            mismatches.append(("eccentricity", xs))
        elif want is not None and abs(Fraction(got) ** 2 - want) > Fraction(1, 10**12) * max(want, 1):
            mismatches.append(("eccentricity", xs))

    ok = not mismatches
    verdict(8, ok, f"instances checked {counts}; mismatches {len(mismatches)}")
    assert ok, mismatches[:3]


# --- 9 ------------------------------------------------------------------------

def test_singleton_invariance(verdict):
    diffs = []
    for seed in range(20):
        g = generate_synthetic(200, 4, 0.5, seed)
        inst = make_instance(g, OverlapParams(0.6, 0.75, seed))
        seeds = ex.select_seeds(inst, 5, np.random.default_rng(seed))
        mu = propagate(inst.g_aux, inst.g_san, seeds, PropagationConfig(rng_seed=seed))
        base = success_error_rates(mu, inst.ground_truth, degree_centrality(inst.g_aux),
                                   degree_centrality(inst.g_san), exact=True)
        # pad both graphs with |V| isolated nodes, matched to each other
        na, ns = inst.g_aux.n, inst.g_san.n
        aux2 = DirectedGraph.from_edges(2 * na, inst.g_aux.edges())
        san2 = DirectedGraph.from_edges(2 * ns, inst.g_san.edges())
        gt2 = dict(inst.ground_truth.pairs)
        gt2.update({na + i: ns + i for i in range(min(na, ns))})
        padded = success_error_rates(mu, gt2, degree_centrality(aux2), degree_centrality(san2), exact=True)
        diffs.append(abs(padded[0] - base[0]))
    ok = max(diffs) == 0
    verdict(9, ok, f"max |change in success rate| over {len(diffs)} instances = {max(diffs)}")
    assert ok


# --- 10 -----------------------------------------------------------------------

def test_real_world_headline_numbers(verdict):
    verdict(10, "SKIP", "not reproducible at desk scale: needs the original crawled social graphs "
                        "and their ground truth; criteria 1 to 5 stand in for it")
    pytest.skip("requires the original crawled datasets")

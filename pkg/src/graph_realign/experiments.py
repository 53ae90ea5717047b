"""Seed-count, noise and seed-identification sweeps.

Every trial draws its randomness from ``SeedSequence([rng_seed, point,
trial])``, so rows are reproducible and independent of execution order.
Set ``GRAPH_REALIGN_THREADS`` to run trials in worker processes.
"""
from __future__ import annotations

import csv
import json
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from functools import partial
from pathlib import Path

import numpy as np

from .evaluation import count_outcomes, degree_centrality, success_error_rates
from .graph import DirectedGraph, load_edge_list, to_symmetric_undirected
from .propagation import Mapping, PropagationConfig, propagate
from .sanitizer import ExperimentInstance, OverlapParams, make_instance, procedure_b
from .seeds import NoCliqueFound, find_seed, make_aux_info, sample_clique
from .synthetic import generate_synthetic

log = logging.getLogger(__name__)

SEED_SWEEP_COLUMNS = ["seed_count", "trial", "n_correct", "n_wrong", "n_reidentified",
                      "success_rate", "error_rate", "large_scale"]
NOISE_SWEEP_COLUMNS = ["alpha_e", "trial", "success_rate", "error_rate",
                       "n_correct", "n_reidentified", "large_scale"]
SEED_IDENT_COLUMNS = ["epsilon", "trial", "outcome", "correct"]


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    # graph source: graph_file wins over the synthetic parameters
    graph_file: str | None = None
    n: int = 10_000
    edges_per_node: int = 40
    reciprocity: float = 0.5
    alpha_v: float = 0.25
    alpha_e: float = 0.5
    alpha_e_list: list[float] = field(default_factory=lambda: [0.25, 0.5, 0.75, 1.0])
    seed_counts: list[int] = field(default_factory=lambda: [2, 4, 8, 16, 32, 64, 128])
    noise_seed_count: int = 50
    trials_per_point: int = 10
    theta: float = 0.5
    max_passes: int = 50
    epsilon: float = 0.05
    epsilons: list[float] = field(default_factory=lambda: [0.0, 0.05, 0.1, 0.25])
    k: int = 4
    success_threshold: int = 100
    seed_min_degree: int = 80
    seed_degree_quantile: float = 0.95
    rng_seed: int = 0

    def __post_init__(self):
        if self.trials_per_point < 1:
            raise ConfigError("trials_per_point must be at least 1")
        if any(b <= a for a, b in zip(self.seed_counts, self.seed_counts[1:])):
            raise ConfigError("seed_counts must be strictly increasing")
        if any(c < 1 for c in self.seed_counts):
            raise ConfigError("seed counts must be positive")

    @classmethod
    def from_json(cls, path, **overrides) -> "ExperimentConfig":
        data = json.loads(Path(path).read_text()) if path else {}
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        data.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**data)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)


def load_graph(cfg: ExperimentConfig) -> DirectedGraph:
    if cfg.graph_file:
        return load_edge_list(cfg.graph_file)
    rng = np.random.default_rng(np.random.SeedSequence([cfg.rng_seed]))
    return generate_synthetic(cfg.n, cfg.edges_per_node, cfg.reciprocity, rng)


def trial_rng(rng_seed: int, point: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([rng_seed, point, trial]))


def select_seeds(inst: ExperimentInstance, count: int, rng: np.random.Generator,
                 min_degree: int = 80, quantile: float = 0.95) -> Mapping:
    """Random seed pairs among high-degree ground-truth nodes.

    The auxiliary-degree floor is ``min_degree``, lowered to the given
    quantile of mapped-node degrees when that is smaller. If the floor
    leaves fewer than ``count`` candidates, the ``count`` highest-degree
    nodes are used.
    """
    gt = inst.ground_truth.pairs
    if len(gt) < count:
        raise ConfigError(f"instance has {len(gt)} shared nodes, cannot supply {count} seeds")
    cand = np.array(sorted(gt), dtype=np.int64)
    deg = inst.g_aux.degrees()[cand]
    floor = min(min_degree, float(np.quantile(deg, quantile)))
    pool = cand[deg >= floor]
    if pool.size < count:
        pool = np.sort(cand[np.argsort(-deg, kind="stable")[:count]])
    chosen = rng.choice(pool, size=count, replace=False)
    return Mapping.from_seeds({int(a): gt[int(a)] for a in chosen})


def run_trial(g: DirectedGraph, cfg: ExperimentConfig, alpha_e: float, seed_count: int,
              point: int, trial: int) -> dict:
    rng = trial_rng(cfg.rng_seed, point, trial)
    t0 = time.perf_counter()
    inst = make_instance(g, OverlapParams(cfg.alpha_v, alpha_e), rng)
    seeds = select_seeds(inst, seed_count, rng, cfg.seed_min_degree, cfg.seed_degree_quantile)
    pcfg = PropagationConfig(cfg.theta, cfg.max_passes, int(rng.integers(2**63 - 1)))
    mu, stats = propagate(inst.g_aux, inst.g_san, seeds, pcfg, return_stats=True)
    success, error = success_error_rates(mu, inst.ground_truth, degree_centrality(inst.g_aux),
                                         degree_centrality(inst.g_san))
    correct, wrong = count_outcomes(mu, inst.ground_truth)
    log.info("point=%d trial=%d seeds=%d correct=%d wrong=%d passes=%d increments=%d seconds=%.3f",
             point, trial, seed_count, correct, wrong, stats.passes, stats.score_increments,
             time.perf_counter() - t0)
    reid = correct - seed_count
    return {"n_correct": correct, "n_wrong": wrong, "n_reidentified": reid,
            "success_rate": success, "error_rate": error,
            "large_scale": reid >= cfg.success_threshold}


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("GRAPH_REALIGN_THREADS", "1")))
    except ValueError:
        return 1


def _run_all(fn, jobs):
    workers = _workers()
    if workers == 1 or len(jobs) < 2:
        return [fn(*j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, *zip(*jobs)))


def run_seed_sweep(cfg: ExperimentConfig, graph: DirectedGraph | None = None) -> list[dict]:
    """One row per (seed_count, trial); see SEED_SWEEP_COLUMNS."""
    g = graph if graph is not None else load_graph(cfg)
    jobs = [(cfg.alpha_e, c, p, t) for p, c in enumerate(cfg.seed_counts)
            for t in range(cfg.trials_per_point)]
    results = _run_all(partial(run_trial, g, cfg), jobs)
    return [{"seed_count": c, "trial": t, **r} for (_, c, _, t), r in zip(jobs, results)]


def run_noise_sweep(cfg: ExperimentConfig, graph: DirectedGraph | None = None) -> list[dict]:
    """One row per (alpha_e, trial) at ``noise_seed_count`` seeds."""
    if not cfg.alpha_e_list:
        raise ConfigError("alpha_e_list is empty")
    g = graph if graph is not None else load_graph(cfg)
    jobs = [(ae, cfg.noise_seed_count, p, t) for p, ae in enumerate(cfg.alpha_e_list)
            for t in range(cfg.trials_per_point)]
    results = _run_all(partial(run_trial, g, cfg), jobs)
    return [{"alpha_e": ae, "trial": t, **{k: r[k] for k in NOISE_SWEEP_COLUMNS[2:]}}
            for (ae, _, _, t), r in zip(jobs, results)]


def run_seed_ident_sweep(epsilons, trials: int, graph: DirectedGraph, k: int = 4,
                         alpha_e: float = 1.0, rng_seed: int = 0, max_restarts: int = 10_000) -> list[dict]:
    """Sample a k-clique per trial and try to find it at every epsilon.

    The attacker's degrees and counts come from the symmetric projection
    of ``graph``; the target is the symmetric projection of a copy with
    edge overlap ``alpha_e`` (unperturbed at 1.0). ``correct`` is filled
    only for Unique outcomes.
    """
    und = to_symmetric_undirected(graph)
    rows = []
    for t in range(trials):
        rng = trial_rng(rng_seed, 0, t)
        clique = sample_clique(und, k, rng, max_restarts)
        if alpha_e < 1.0:
            everyone = np.arange(graph.n)
            inst = procedure_b(graph, everyone, everyone, (1 - alpha_e) / (1 + alpha_e), rng)
            target, truth = to_symmetric_undirected(inst.g_san), inst.ground_truth.pairs
        else:
            target, truth = und, {v: v for v in range(graph.n)}
        for eps in epsilons:
            res = find_seed(target, make_aux_info(und, clique, eps))
            correct = ""
            if res.mapping is not None:
                correct = all(truth.get(a) == s for a, s in res.mapping.items())
            rows.append({"epsilon": eps, "trial": t, "outcome": res.reason, "correct": correct})
    return rows


def write_rows(rows: list[dict], columns: list[str], out=None) -> None:
    """CSV with a header row; booleans as true/false.

    ``out`` is a path, an open text stream, or None/"-" for stdout.
    """
    def fmt(v):
        return str(v).lower() if isinstance(v, bool) else v

    if hasattr(out, "write"):
        fh = out
    else:
        fh = sys.stdout if out in (None, "-") else open(out, "w", newline="", encoding="utf-8")
    try:
        w = csv.DictWriter(fh, fieldnames=columns, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({c: fmt(r.get(c, "")) for c in columns})
    finally:
        if fh is not sys.stdout and fh is not out:
            fh.close()


__all__ = ["ExperimentConfig", "ConfigError", "NoCliqueFound", "run_seed_sweep", "run_noise_sweep",
           "run_seed_ident_sweep", "select_seeds", "write_rows", "load_graph"]

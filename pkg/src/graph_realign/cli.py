"""Command-line entry point: ``graph-realign <subcommand>``."""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys

import numpy as np

from . import experiments as ex
from .evaluation import evaluate, synthetic_attributes
from .graph import load_edge_list, to_symmetric_undirected, write_edge_list
from .propagation import Mapping, PropagationConfig, propagate
from .sanitizer import ExperimentInstance, OverlapParams, make_instance, read_pairs
from .seeds import NoCliqueFound, find_seed, make_aux_info, sample_clique
from .synthetic import generate_synthetic

SCHEMAS = {
    "sweep-seeds": """CSV columns:
  seed_count      seeds given to propagation
  trial           trial index within the point
  n_correct       mapped pairs equal to the ground truth (seeds included)
  n_wrong         mapped pairs not equal to the ground truth, including
                  auxiliary nodes with no true image
  n_reidentified  n_correct - seed_count
  success_rate    degree-weighted success over shared nodes
  error_rate      degree-weighted error over shared nodes
  large_scale     n_reidentified >= success_threshold""",
    "sweep-noise": """CSV columns:
  alpha_e, trial, success_rate, error_rate, n_correct, n_reidentified,
  large_scale (same meanings as sweep-seeds)""",
    "sweep-seed-ident": """CSV columns:
  epsilon   relative tolerance on degrees and common-neighbor counts
  trial     trial index (same clique for every epsilon of a trial)
  outcome   Unique | Ambiguous | NotFound
  correct   true/false for Unique outcomes, empty otherwise""",
}


def _write_pairs(path, header, rows):
    fh = sys.stdout if path in (None, "-") else open(path, "w", newline="", encoding="utf-8")
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    finally:
        if fh is not sys.stdout:
            fh.close()


def cmd_generate(a):
    g = generate_synthetic(a.n, a.edges_per_node, a.reciprocity, np.random.default_rng(a.rng_seed))
    write_edge_list(g, a.out)
    print(f"wrote {g.n} nodes, {g.num_edges} edges to {a.out}")


def cmd_perturb(a):
    g = load_edge_list(a.graph)
    params = OverlapParams(a.alpha_v, a.alpha_e, a.rng_seed)
    inst = make_instance(g, params, shuffle_target=not a.no_shuffle)
    inst.save(a.out)
    print(f"aux {inst.g_aux.n} nodes, target {inst.g_san.n} nodes, "
          f"{len(inst.ground_truth)} shared; beta={params.beta:.4f}")


def cmd_seed_find(a):
    aux, target = load_edge_list(a.aux), load_edge_list(a.target)
    aux_u = to_symmetric_undirected(aux)
    try:
        clique = sample_clique(aux_u, a.k, np.random.default_rng(a.rng_seed), a.max_restarts)
    except NoCliqueFound as e:
        print(f"NoClique: {e}")
        return 1
    res = find_seed(to_symmetric_undirected(target), make_aux_info(aux_u, clique, a.epsilon))
    print(res.reason)
    if res.mapping is not None:
        _write_pairs(a.out, ["aux_id", "san_id"],
                     [(aux.label(x), target.label(y)) for x, y in sorted(res.mapping.items())])
    return 0


def cmd_propagate(a):
    aux, target = load_edge_list(a.aux), load_edge_list(a.target)
    ai, ti = aux.label_index(), target.label_index()
    try:
        seeds = Mapping.from_seeds({ai[x]: ti[y] for x, y in read_pairs(a.seeds)})
    except KeyError as e:
        raise SystemExit(f"seed label {e} not present in the graphs")
    mu = propagate(aux, target, seeds, PropagationConfig(a.theta, a.max_passes, a.rng_seed))
    _write_pairs(a.out, ["aux_id", "san_id", "is_seed"],
                 [(aux.label(x), target.label(y), str(mu.is_seed(x)).lower())
                  for x, y in sorted(mu.pairs.items())])
    print(f"mapped {len(mu)} pairs ({len(seeds)} seeds)", file=sys.stderr)


def cmd_evaluate(a):
    inst = ExperimentInstance.load(a.instance)
    ai, si = inst.g_aux.label_index(), inst.g_san.label_index()
    rows = read_pairs(a.mapping)
    mu = Mapping({ai[x]: si[y] for x, y in rows if x in ai and y in si})
    attrs = None
    if a.alphabet:
        attrs = synthetic_attributes(inst.g_san.n, a.alphabet, np.random.default_rng(a.rng_seed),
                                     delta=a.delta)
    report = evaluate(inst.g_aux, inst.g_san, inst.ground_truth, mu, attrs, alphabet=a.alphabet)
    text = json.dumps(report.summary(), indent=2) + "\n"
    if a.out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(a.out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _config(a) -> ex.ExperimentConfig:
    overrides = {k: getattr(a, k, None) for k in
                 ("graph_file", "n", "edges_per_node", "reciprocity", "alpha_v", "alpha_e",
                  "alpha_e_list", "seed_counts", "noise_seed_count", "trials_per_point", "theta",
                  "epsilons", "k", "success_threshold", "rng_seed")}
    return ex.ExperimentConfig.from_json(a.config, **overrides)


def cmd_sweep_seeds(a):
    cfg = _config(a)
    ex.write_rows(ex.run_seed_sweep(cfg), ex.SEED_SWEEP_COLUMNS, a.out)


def cmd_sweep_noise(a):
    cfg = _config(a)
    ex.write_rows(ex.run_noise_sweep(cfg), ex.NOISE_SWEEP_COLUMNS, a.out)


def cmd_sweep_seed_ident(a):
    cfg = _config(a)
    rows = ex.run_seed_ident_sweep(cfg.epsilons, cfg.trials_per_point, ex.load_graph(cfg), cfg.k,
                                   a.target_alpha_e, cfg.rng_seed)
    ex.write_rows(rows, ex.SEED_IDENT_COLUMNS, a.out)


def _floats(s):
    return [float(x) for x in s.split(",") if x]


def _ints(s):
    return [int(x) for x in s.split(",") if x]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="graph-realign", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true", help="log per-trial timing and counters")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("generate", help="preferential-attachment directed graph")
    s.add_argument("--n", type=int, default=10_000)
    s.add_argument("--edges-per-node", type=int, default=10)
    s.add_argument("--reciprocity", type=float, default=0.5)
    s.add_argument("--rng-seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_generate)

    s = sub.add_parser("perturb", help="write an (aux, target, ground truth) instance directory")
    s.add_argument("--graph", required=True)
    s.add_argument("--alpha-v", type=float, required=True)
    s.add_argument("--alpha-e", type=float, required=True)
    s.add_argument("--rng-seed", type=int, default=0)
    s.add_argument("--no-shuffle", action="store_true", help="keep target ids in original order")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_perturb)

    s = sub.add_parser("seed-find", help="sample a clique in aux and find it in target")
    s.add_argument("--target", required=True)
    s.add_argument("--aux", required=True)
    s.add_argument("--k", type=int, default=4)
    s.add_argument("--epsilon", type=float, default=0.05)
    s.add_argument("--rng-seed", type=int, default=0)
    s.add_argument("--max-restarts", type=int, default=10_000)
    s.add_argument("--out", default="seeds.csv")
    s.set_defaults(func=cmd_seed_find)

    s = sub.add_parser("propagate", help="extend a seed mapping")
    s.add_argument("--aux", required=True)
    s.add_argument("--target", required=True)
    s.add_argument("--seeds", required=True, help="CSV aux_id,san_id with header")
    s.add_argument("--theta", type=float, default=0.5)
    s.add_argument("--max-passes", type=int, default=50)
    s.add_argument("--rng-seed", type=int, default=0)
    s.add_argument("--out", default="-")
    s.set_defaults(func=cmd_propagate)

    s = sub.add_parser("evaluate", help="score a mapping against an instance's ground truth")
    s.add_argument("--instance", required=True)
    s.add_argument("--mapping", required=True)
    s.add_argument("--alphabet", type=int, default=0,
                   help="size of a synthetic private label for breach counting (0 disables)")
    s.add_argument("--delta", type=float, default=0.5)
    s.add_argument("--rng-seed", type=int, default=0)
    s.add_argument("--out", default="-")
    s.set_defaults(func=cmd_evaluate)

    for name, func in (("sweep-seeds", cmd_sweep_seeds), ("sweep-noise", cmd_sweep_noise),
                       ("sweep-seed-ident", cmd_sweep_seed_ident)):
        s = sub.add_parser(name, epilog=SCHEMAS[name], formatter_class=argparse.RawDescriptionHelpFormatter)
        s.add_argument("--config", help="JSON file with ExperimentConfig fields")
        s.add_argument("--graph-file")
        s.add_argument("--n", type=int)
        s.add_argument("--edges-per-node", type=int)
        s.add_argument("--reciprocity", type=float)
        s.add_argument("--alpha-v", type=float)
        s.add_argument("--alpha-e", type=float)
        s.add_argument("--alpha-e-list", type=_floats)
        s.add_argument("--seed-counts", type=_ints)
        s.add_argument("--noise-seed-count", type=int)
        s.add_argument("--trials-per-point", type=int)
        s.add_argument("--theta", type=float)
        s.add_argument("--epsilons", type=_floats)
        s.add_argument("--k", type=int)
        s.add_argument("--success-threshold", type=int)
        s.add_argument("--rng-seed", type=int)
        s.add_argument("--out", default="-")
        if name == "sweep-seed-ident":
            s.add_argument("--target-alpha-e", type=float, default=1.0,
                           help="edge overlap of the searched target (1.0 = unperturbed)")
        s.set_defaults(func=func)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args) or 0
    except (ex.ConfigError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""perturb-lab command line.

Exit status: 0 on success, 2 when a run completes but its validation fails
(pipeline contract, example pass rate, fragmentation guarantees), 1 on errors.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import asdict

from . import __version__
from .bounds import param_bounds
from .config import ExperimentConfig, load_config
from .families import FAMILIES, FamilySpec, build_family
from .fragment import check_fragmentation, fragment
from .graph import format_clusters, format_edge_list, read_edge_list, union_graphs
from .experiments import ExampleParams, run_experiment, validate_example, write_csv
from .pathcover import indep_pipeline
from .pipeline import PipelineParams, build_partition
from .rng import sample_gnp, sample_two_round, spawn, two_round_split


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _emit(text: str, out: str | None) -> None:
    if out and out != "-":
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _host(args):
    if getattr(args, "input", None):
        return read_edge_list(args.input)
    spec = FamilySpec(args.family, args.n, delta=args.delta, c=args.c, p=args.p or 0.0,
                      k_paths=args.k_paths)
    return build_family(spec, spawn(args.seed, 1)[0]).graph


def cmd_gnp(args) -> int:
    g = sample_gnp(args.n, args.p, args.seed)
    _emit(format_edge_list(g), args.out)
    return 0


def cmd_fragment(args) -> int:
    g = read_edge_list(args.input)
    fam = fragment(g, args.ell)
    _emit(format_clusters(fam), args.out)
    problems = check_fragmentation(g, fam, args.ell)
    for p in problems:
        print(p, file=sys.stderr)
    return 2 if problems else 0


def cmd_partition(args) -> int:
    H = _host(args)
    p1, _ = two_round_split(args.p)
    params = PipelineParams(n=H.n, p=p1, delta=max(H.max_degree(), 1), C=args.C, Cprime=args.Cprime,
                            ell=args.ell, mode=args.mode, edges_mode=args.edges_mode,
                            c_scale=args.c_scale, coverage=args.coverage, window=args.window)
    G1, _ = sample_two_round(H.n, args.p, spawn(args.seed, 2)[1])
    fam, rep = build_partition(H, G1, params)
    if args.out:
        _emit(format_clusters(fam), args.out)
    print(json.dumps(asdict(rep), default=str, indent=1))
    return 0 if rep.success else 2


def _bounds_row(b) -> dict:
    row = b.as_row()
    for k, v in b.methods.items():
        row[f"{k}_method"] = v
    return row


def _write_row(row: dict) -> None:
    w = csv.DictWriter(sys.stdout, fieldnames=list(row), lineterminator="\n")
    w.writeheader()
    w.writerow(row)


def cmd_params(args) -> int:
    g = read_edge_list(args.input)
    b = param_bounds(g, effort=args.effort, seed=args.seed, exact_cap=args.exact_cap)
    _write_row(_bounds_row(b))
    return 0


def cmd_indep(args) -> int:
    H = _host(args)
    G1, G2 = sample_two_round(H.n, args.p, spawn(args.seed, 2)[1])
    res = indep_pipeline(H, union_graphs(G1, G2), args.p, k=args.k_override, effort=args.effort,
                         seed=args.seed)
    row = {"n": H.n, "p": args.p, "k": res.k, "k_rule": res.k_rule, "paths": len(res.cover.paths),
           "alpha": res.cover.alpha_observed, "meta_n": res.meta.n, "meta_m": res.meta.m,
           "mq": res.mq}
    row.update(_bounds_row(res.bounds))
    _write_row(row)
    return 0


def cmd_experiment(args) -> int:
    cfg = load_config(args.config) if args.config else None
    if cfg is None:
        if not args.family or not args.n_grid:
            raise SystemExit("experiment needs --config or both --family and --n-grid")
        cfg = ExperimentConfig(family=args.family, n_grid=tuple(args.n_grid))
    over = dict(trials=args.trials, seed=args.seed, workers=args.workers, p_rule=args.p,
                mode=args.mode, family=args.family, ell=args.ell, window=args.window,
                c_scale=args.c_scale, effort=args.effort)
    if args.n_grid:
        over["n_grid"] = tuple(args.n_grid)
    if args.no_timing:
        over["timing"] = False
    cfg = cfg.with_overrides(**over)
    recs = run_experiment(cfg)
    write_csv(recs, args.out)
    print(f"{len(recs)} trials, {sum(r.success for r in recs)} successes -> {args.out}", file=sys.stderr)
    return 0


def cmd_validate(args) -> int:
    ep = ExampleParams(n=args.n, p=args.p, delta=args.delta, c=args.c, x=args.x)
    rep = validate_example(args.which, ep, args.trials, args.seed)
    for w in rep.warnings:
        print(f"warning: {w}", file=sys.stderr)
    out = {"which": rep.which, "trials": rep.trials, "passes": rep.passes, "rate": rep.rate,
           "events": {k: v / rep.trials for k, v in rep.events.items()}, "details": rep.details}
    print(json.dumps(out, indent=1))
    return 0 if rep.rate >= args.threshold else 2


def _family_args(p, need_p=True):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", help="edge-list file for H")
    src.add_argument("--family", choices=FAMILIES)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--delta", type=int, default=3)
    p.add_argument("--c", type=float, default=20.0)
    p.add_argument("--k-paths", type=int, default=8)
    p.add_argument("--p", type=float, required=need_p)
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="perturb-lab", description="Minor-monotone parameters of randomly perturbed graphs.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    p = sub.add_parser("gnp", help="sample G(n, p) as an edge list")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", "-o")
    p.set_defaults(func=cmd_gnp)

    p = sub.add_parser("fragment", help="cut a connected graph into clusters of size >= ell")
    p.add_argument("--input", "-i", required=True)
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--out", "-o")
    p.set_defaults(func=cmd_fragment)

    p = sub.add_parser("partition", help="run the cluster-partition pipeline on H + G1")
    _family_args(p)
    p.add_argument("--mode", choices=("relaxed", "strict"), default="relaxed")
    p.add_argument("--edges-mode", choices=("random-only", "all"), default="random-only")
    p.add_argument("--C", type=float, default=8.0)
    p.add_argument("--Cprime", type=float)
    p.add_argument("--ell", type=int)
    p.add_argument("--window", type=float)
    p.add_argument("--c-scale", type=float, default=1.0)
    p.add_argument("--coverage", type=float, default=1 / 24)
    p.add_argument("--out", "-o", help="write the merged clusters here")
    p.set_defaults(func=cmd_partition)

    p = sub.add_parser("params", help="lower bounds on tw, td, genus and Hadwiger number")
    p.add_argument("--input", "-i", required=True)
    p.add_argument("--exact-cap", type=int, default=10)
    p.add_argument("--effort", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_params)

    p = sub.add_parser("indep", help="k-path cover contraction of H + G(n, p)")
    _family_args(p)
    p.add_argument("--k-override", type=int)
    p.add_argument("--effort", type=int, default=4)
    p.set_defaults(func=cmd_indep)

    p = sub.add_parser("experiment", help="run a Monte Carlo grid and write CSV")
    p.add_argument("--config", "-c")
    p.add_argument("--out", "-o", default="-")
    p.add_argument("--family", choices=FAMILIES)
    p.add_argument("--n-grid", type=int, nargs="+")
    p.add_argument("--p", help="p rule, e.g. 2/n or 0.5*n^-1")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--mode", choices=("relaxed", "strict"))
    p.add_argument("--ell", type=int)
    p.add_argument("--window", type=float)
    p.add_argument("--c-scale", type=float)
    p.add_argument("--effort", type=int)
    p.add_argument("--no-timing", action="store_true", help="write elapsed_ms = 0 for byte-stable output")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("validate-example", help="frequency of a sharpness example's event")
    p.add_argument("--which", required=True, choices=("1", "2", "3", "4", "forest-lemma"))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--delta", type=int, default=3)
    p.add_argument("--c", type=float, default=20.0)
    p.add_argument("--x", type=int)
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threshold", type=float, default=0.9)
    p.set_defaults(func=cmd_validate)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except KeyboardInterrupt:
        return 1
    except Exception as exc:  # reported, not traced
        print(f"perturb-lab: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

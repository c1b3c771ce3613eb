"""Monte Carlo trials, slope fits, sharpness-example validators and CSV output."""
from __future__ import annotations

import csv
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields

import numpy as np
from scipy import stats

from .bounds import ParamBounds, param_bounds
from .config import ConfigError, ExperimentConfig
from .families import (
    FamilySpec,
    build_family,
    choose_block_size,
    forest_of_trees,
    gen_caterpillar,
    gen_path_with_trees,
    gen_star,
    gen_star_of_stars,
)
from .graph import (
    ClusterFamily,
    Graph,
    component_labels,
    connected_components,
    is_forest,
    union_graphs,
)
from .pathcover import indep_pipeline
from .pipeline import PipelineParams, build_partition, meta_minor
from .rng import sample_gnp, sample_two_round, spawn, trial_seed, two_round_split
from .theorem import predicted_row

CSV_COLUMNS = ("seed,n,p,family,delta,C,ell,mode,success,fail_stage,m,min_size,max_size,"
               "tw_lb,td_lb,genus_lb,hadwiger_lb,tw_pred,td_pred,genus_pred,h_pred,elapsed_ms").split(",")


@dataclass
class TrialRecord:
    seed: int
    n: int
    p: float
    family: str
    delta: int
    C: float
    ell: int
    mode: str
    success: bool
    fail_stage: str
    m: int
    min_size: int
    max_size: int
    tw_lb: int
    td_lb: int
    genus_lb: int
    hadwiger_lb: int
    tw_pred: float | str
    td_pred: float | str
    genus_pred: float | str
    h_pred: float | str
    elapsed_ms: int = field(default=0, compare=False)
    index: int = field(default=0, compare=False)
    family_obj: ClusterFamily | None = field(default=None, compare=False, repr=False)

    def row(self) -> dict:
        return {k: getattr(self, k) for k in CSV_COLUMNS}


def _route(cfg: ExperimentConfig) -> str:
    if cfg.route != "auto":
        return cfg.route
    return "indep" if cfg.family == "path-bundle" else "partition"


def _pipeline_params(cfg: ExperimentConfig, n: int, p1: float, delta: int) -> PipelineParams:
    return PipelineParams(n=n, p=p1, delta=delta, C=cfg.C, Cprime=cfg.Cprime, ell=cfg.ell,
                          mode=cfg.mode, edges_mode=cfg.edges_mode, c_scale=cfg.c_scale,
                          coverage=cfg.coverage, window=cfg.window)


def _run(cfg: ExperimentConfig, index: int, n: int) -> TrialRecord:
    start = time.perf_counter()
    p = cfg.p_of(n)
    ss = trial_seed(cfg.seed, index)
    seed_value = int(ss.generate_state(1)[0])
    fam_seed, graph_seed, heur_seed = spawn(ss, 3)
    heur = int(heur_seed.generate_state(1)[0])
    route = _route(cfg)
    p1, _ = two_round_split(p)
    spec = FamilySpec(cfg.family, n, delta=cfg.delta, c=cfg.c, p=p, k_paths=cfg.k_paths)
    base = build_family(spec, fam_seed)
    H = base.graph
    delta = H.max_degree()
    fam = None
    if route == "indep":
        G1, G2 = sample_two_round(n, p, graph_seed)
        res = indep_pipeline(H, union_graphs(G1, G2), p, k=cfg.k, effort=cfg.effort, seed=heur,
                             exact_cap=cfg.exact_cap, spectral=cfg.spectral)
        bounds = res.bounds
        success, stage = True, ""
        m, lo, hi, ell = len(res.cover.paths), res.k, res.k, res.k
        fam = res.family
    else:
        # strict-mode hypothesis checks run here, before G is sampled
        params = _pipeline_params(cfg, n, p1, max(delta, 1))
        G1, G2 = sample_two_round(n, p, graph_seed)
        fam, rep = build_partition(H, G1, params)
        meta = meta_minor(union_graphs(H, G1), fam, G2, edges_mode="all")
        bounds = param_bounds(meta, effort=cfg.effort, seed=heur, exact_cap=cfg.exact_cap,
                              spectral=cfg.spectral)
        success, stage = rep.success, rep.fail_stage
        m, lo, hi, ell = rep.m, rep.min_size, rep.max_size, params.ell_int
    pred = predicted_row(n, p, max(delta, 1), C=cfg.C, r=cfg.r)
    elapsed = int(round(1000 * (time.perf_counter() - start))) if cfg.timing else 0
    return TrialRecord(seed_value, n, p, cfg.family, delta, cfg.C, ell, cfg.mode, success, stage,
                       m, lo, hi, bounds.tw_lb, bounds.td_lb, bounds.genus_lb, bounds.hadwiger_lb,
                       pred["tw_pred"], pred["td_pred"], pred["genus_pred"], pred["h_pred"],
                       elapsed, index, fam)


def run_trial(cfg: ExperimentConfig, trial_index: int, n: int | None = None) -> TrialRecord:
    """One trial; deterministic in (config, trial_index). ``n`` defaults to the
    grid entry that owns ``trial_index``."""
    if n is None:
        cell = trial_index // cfg.trials
        if cell >= len(cfg.n_grid):
            raise ConfigError(f"trial index {trial_index} beyond the grid")
        n = cfg.n_grid[cell]
    try:
        return _run(cfg, trial_index, n)
    except Exception as exc:
        exc.trial_index = trial_index
        if exc.args and isinstance(exc.args[0], str):
            exc.args = (f"trial {trial_index}: {exc.args[0]}",) + exc.args[1:]
        raise


def _job(args):
    cfg, index, n = args
    rec = run_trial(cfg, index, n)
    rec.family_obj = None
    return rec


def run_experiment(cfg: ExperimentConfig, keep_families: bool = False) -> list[TrialRecord]:
    jobs = [(cfg, idx, n) for idx, n, _ in cfg.cells()]
    if cfg.workers > 1 and not keep_families:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            recs = list(pool.map(_job, jobs))
    else:
        recs = [run_trial(c, i, n) for c, i, n in jobs]
    return sorted(recs, key=lambda r: r.index)


# -- output ------------------------------------------------------------------

def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _write_rows(records, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in sorted(records, key=lambda r: r.index):
        w.writerow([_fmt(getattr(r, k)) for k in CSV_COLUMNS])


def write_csv(records, path) -> None:
    """Header plus one row per record, in trial order; "-" means stdout."""
    if str(path) == "-":
        _write_rows(records, sys.stdout)
        return
    with open(path, "w", newline="", encoding="utf-8") as fh:
        _write_rows(records, fh)


_INT_COLS = {"seed", "n", "delta", "ell", "m", "min_size", "max_size", "tw_lb", "td_lb",
             "genus_lb", "hadwiger_lb", "elapsed_ms"}
_FLOAT_COLS = {"p", "C"}
_PRED_COLS = {"tw_pred", "td_pred", "genus_pred", "h_pred"}


def read_csv(path) -> list[TrialRecord]:
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        rd = csv.DictReader(fh)
        if rd.fieldnames != CSV_COLUMNS:
            raise ValueError(f"unexpected header {rd.fieldnames}")
        for i, row in enumerate(rd):
            kw = {}
            for k, v in row.items():
                if k in _INT_COLS:
                    kw[k] = int(v)
                elif k in _FLOAT_COLS:
                    kw[k] = float(v)
                elif k in _PRED_COLS:
                    kw[k] = float(v) if v != "" else ""
                elif k == "success":
                    kw[k] = v == "true"
                else:
                    kw[k] = v
            out.append(TrialRecord(**kw, index=i))
    return out


# -- slope fitting -------------------------------------------------------------

def fit_slope_xy(x, y) -> tuple[float, float]:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(np.unique(x)) < 3:
        raise ValueError("need at least 3 distinct x values")
    if np.any(x <= 0) or np.any(y <= 0):
        raise ValueError("log-log fit needs positive values")
    res = stats.linregress(np.log(x), np.log(y))
    return float(res.slope), float(res.stderr)


def fit_slope(records, field_name: str, against: str = "n") -> tuple[float, float]:
    """Slope of log(mean field) against log(n) or log(n^2 p), grouped by n."""
    groups: dict[int, list] = {}
    pvals: dict[int, float] = {}
    for r in records:
        groups.setdefault(r.n, []).append(float(getattr(r, field_name)))
        pvals[r.n] = r.p
    ns = sorted(groups)
    means = [float(np.mean(groups[n])) for n in ns]
    if against == "n":
        xs = ns
    elif against == "n2p":
        xs = [n * n * pvals[n] for n in ns]
    else:
        raise ValueError(f"against must be n or n2p (got {against!r})")
    return fit_slope_xy(xs, means)


# -- sharpness examples ----------------------------------------------------------

@dataclass
class ExampleParams:
    n: int
    p: float
    delta: int = 3
    c: float = 20.0
    x: int | None = None


@dataclass
class ExampleReport:
    which: str
    trials: int
    passes: int
    events: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def rate(self) -> float:
        return self.passes / self.trials if self.trials else 0.0

    def event_rate(self, name: str) -> float:
        return self.events[name] / self.trials if self.trials else 0.0


def at_most_one_cycle(g: Graph) -> bool:
    """Every component has no more edges than vertices."""
    if g.n == 0:
        return True
    k, lab = component_labels(g)
    V = np.bincount(lab, minlength=k)
    e = g.edges()
    E = np.bincount(lab[e[:, 0]], minlength=k) if len(e) else np.zeros(k, dtype=np.int64)
    return bool(np.all(E <= V))


def _random_edge_events(G: Graph, blocks: list[list[int]]) -> tuple[bool, bool]:
    """(no random edge inside a block, at most one random edge between two blocks)."""
    lab = np.full(G.n, -1, dtype=np.int64)
    for i, b in enumerate(blocks):
        lab[b] = i
    e = G.edges()
    a, b = lab[e[:, 0]], lab[e[:, 1]]
    both = (a >= 0) & (b >= 0)
    inside = bool(np.any(both & (a == b)))
    cross = both & (a != b)
    lo = np.minimum(a[cross], b[cross])
    hi = np.maximum(a[cross], b[cross])
    pairs = lo * len(blocks) + hi
    multi = len(pairs) != len(np.unique(pairs))
    return not inside, not multi


def _remove(g: Graph, drop) -> Graph:
    keep = np.setdiff1d(np.arange(g.n), np.asarray(list(drop), dtype=np.int64))
    return g.induced(keep)[0]


def validate_example(which: str, params: ExampleParams, trials: int, seed: int = 0) -> ExampleReport:
    which = str(which)
    n, p = params.n, params.p
    rep = ExampleReport(which, trials, 0)
    warn = rep.warnings.append

    if which == "1":
        if n * p >= 1:
            warn(f"np = {n * p:.3g} >= 1: outside the subcritical regime")
        H = gen_star(n)
        rep.events = {"unicyclic_components": 0}
        for i in range(trials):
            G = sample_gnp(n, p, trial_seed(seed, i))
            ok = at_most_one_cycle(G)
            rep.events["unicyclic_components"] += ok
            rep.passes += ok
        rep.details["delta"] = H.max_degree()
        return rep

    if which == "2":
        if p > 1 / (params.c * n):
            warn(f"p = {p:.3g} > 1/(cn) = {1 / (params.c * n):.3g}")
        base = gen_star_of_stars(n, p, params.c)
        H, r = base.graph, base.root
        L = np.asarray(base.leaves, dtype=np.int64)
        rep.events = {"forest_minus_root": 0, "no_root_leaf_edge": 0}
        rep.details.update(t=base.t, x=base.x)
        for i in range(trials):
            G = sample_gnp(n, p, trial_seed(seed, i))
            R = union_graphs(H, G)
            forest = is_forest(_remove(R, [r]))
            nb = G.neighbors(r)
            no_edge = not np.isin(nb, L).any()
            rep.events["forest_minus_root"] += forest
            rep.events["no_root_leaf_edge"] += no_edge
            rep.passes += forest and no_edge
        return rep

    if which == "3":
        if n * p >= 1:
            warn(f"np = {n * p:.3g} >= 1: outside the subcritical regime")
        base = gen_caterpillar(n, params.delta)
        H, L = base.graph, base.leaves
        rep.events = {"leaf_graph_unicyclic": 0}
        rep.details["tw_witness"] = 2 + len(base.path)
        for i in range(trials):
            G = sample_gnp(n, p, trial_seed(seed, i))
            RL = union_graphs(H, G).induced(L)[0]
            ok = at_most_one_cycle(RL)
            rep.events["leaf_graph_unicyclic"] += ok
            rep.passes += ok
        return rep

    if which == "4":
        if p > 1 / (params.c * n):
            warn(f"p = {p:.3g} > 1/(cn) = {1 / (params.c * n):.3g}")
        base = gen_path_with_trees(n, params.delta, p, params.c)
        H = base.graph
        rep.events = {"forest_minus_path": 0}
        sizes = []
        for i in range(trials):
            G = sample_gnp(n, p, trial_seed(seed, i))
            rest = _remove(union_graphs(H, G), base.path)
            ok = is_forest(rest)
            rep.events["forest_minus_path"] += ok
            rep.passes += ok
            sizes.append(max((len(c) for c in connected_components(rest)), default=0))
        x = base.x
        rep.details.update(t=base.t, x=x, path=len(base.path), max_component=float(np.mean(sizes)),
                           scale=x * math.log(n / x))
        return rep

    if which == "forest-lemma":
        x = params.x if params.x is not None else (choose_block_size(n, p, params.c) if p > 0 else 3)
        if n * p * x >= 1:
            warn(f"npx = {n * p * x:.3g} >= 1: the lemma needs npx = o(1)")
        base = forest_of_trees(n, x)
        H0 = base.graph
        rep.events = {"forest": 0, "no_inner_edge": 0, "single_cross_edge": 0}
        rep.details.update(t=base.t, x=x)
        sizes = []
        for i in range(trials):
            G = sample_gnp(n, p, trial_seed(seed, i))
            R0 = union_graphs(H0, G)
            forest = is_forest(R0)
            inner_ok, cross_ok = _random_edge_events(G, base.blocks)
            rep.events["forest"] += forest
            rep.events["no_inner_edge"] += inner_ok
            rep.events["single_cross_edge"] += cross_ok
            rep.passes += forest
            sizes.append(max((len(c) for c in connected_components(R0)), default=0))
        rep.details.update(max_component=float(np.mean(sizes)), scale=x * math.log(n / x))
        return rep

    raise ValueError(f"unknown example {which!r}; choose 1, 2, 3, 4 or forest-lemma")


def record_dict(rec: TrialRecord) -> dict:
    d = asdict(rec)
    d.pop("family_obj", None)
    return d


def record_fields() -> list[str]:
    return [f.name for f in fields(TrialRecord)]


__all__ = [
    "CSV_COLUMNS", "TrialRecord", "run_trial", "run_experiment", "write_csv", "read_csv",
    "fit_slope", "fit_slope_xy", "validate_example", "ExampleParams", "ExampleReport",
    "at_most_one_cycle", "ParamBounds",
]

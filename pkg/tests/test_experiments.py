import math

import numpy as np
import pytest

from perturb_lab.config import ConfigError, ExperimentConfig, parse_config, parse_p_rule
from perturb_lab.experiments import (
    CSV_COLUMNS,
    ExampleParams,
    _remove,
    at_most_one_cycle,
    fit_slope,
    fit_slope_xy,
    read_csv,
    run_experiment,
    run_trial,
    validate_example,
    write_csv,
)
from perturb_lab.families import gen_star_of_stars
from perturb_lab.graph import (
    Graph,
    connected_components,
    cycle_graph,
    is_forest,
    path_graph,
    union_graphs,
)


def small_cfg(**kw):
    base = dict(family="bounded-degree-random-tree", n_grid=(2000,), p_rule="20/n", trials=2, seed=3,
                ell=4, window=2, c_scale=0.01, timing=False, effort=1)
    base.update(kw)
    return ExperimentConfig(**base)


def test_trial_is_deterministic():
    cfg = small_cfg()
    a, b = run_trial(cfg, 1), run_trial(cfg, 1)
    assert a == b and a.elapsed_ms == 0
    assert run_trial(cfg, 0).seed != a.seed


def test_edgeless_random_graph_is_reported_not_raised():
    rec = run_trial(small_cfg(p_rule="0", trials=1), 0)
    assert rec.success is False and rec.fail_stage
    assert rec.tw_pred == ""


def test_strict_mode_refuses():
    with pytest.raises(Exception, match="strict-mode"):
        run_trial(small_cfg(mode="strict", ell=None), 0)


def test_parallel_matches_serial(tmp_path):
    cfg = small_cfg(n_grid=(1000, 2000), trials=2)
    serial = run_experiment(cfg)
    par = run_experiment(cfg.with_overrides(workers=2))
    assert serial == par
    write_csv(serial, tmp_path / "a.csv")
    write_csv(par, tmp_path / "b.csv")
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_csv_header_only(tmp_path):
    out = tmp_path / "e.csv"
    write_csv([], out)
    assert out.read_text().splitlines() == [",".join(CSV_COLUMNS)]
    assert read_csv(out) == []


def test_csv_round_trip(tmp_path):
    recs = run_experiment(small_cfg())
    out = tmp_path / "r.csv"
    write_csv(recs[:1], out)
    assert len(out.read_text().splitlines()) == 2
    write_csv(recs, out)
    assert read_csv(out) == recs


def test_fit_slope_synthetic():
    x = np.array([10.0, 20, 40, 80, 160])
    s, _ = fit_slope_xy(x, x ** 2)
    assert abs(s - 2) < 1e-9
    s, _ = fit_slope_xy(x, np.full(5, 7.0))
    assert abs(s) < 1e-12
    rng = np.random.default_rng(0)
    xs = np.geomspace(100, 1e6, 20)
    s, _ = fit_slope_xy(xs, xs ** 0.5 * (1 + 0.01 * rng.standard_normal(20)))
    assert abs(s - 0.5) <= 0.02
    with pytest.raises(ValueError):
        fit_slope_xy([1, 1, 2], [1, 2, 3])


def test_fit_slope_on_records():
    recs = run_experiment(small_cfg(n_grid=(1000, 2000, 4000), trials=1))
    s, se = fit_slope(recs, "m", against="n")
    assert math.isfinite(s) and se >= 0


def test_p_rules():
    assert parse_p_rule("2/n")(100) == pytest.approx(0.02)
    assert parse_p_rule("0.5*n^-1.5")(100) == pytest.approx(0.5e-3)
    assert parse_p_rule("0.01")(5) == 0.01
    with pytest.raises(ConfigError):
        parse_p_rule("n/2")


def test_config_file_parsing():
    cfg = parse_config("""
[experiment]
family = path-bundle
n = 1000, 2000
p = 4/n
trials = 3
[family]
k_paths = 8
[constants]
C = 9
c = 1.5
[pipeline]
ell = 8
""")
    assert cfg.n_grid == (1000, 2000) and cfg.C == 9 and cfg.c_const == 1.5
    assert cfg.k_paths == 8 and cfg.ell == 8 and cfg.p_of(1000) == 0.004
    with pytest.raises(ConfigError):
        parse_config("[experiment]\nfamily = path\nn = 10, 5\n")
    with pytest.raises(ConfigError):
        parse_config("[experiment]\nfamily = path\nn = 10\nbogus = 1\n")


def test_unicyclic_check():
    assert at_most_one_cycle(path_graph(5)) and at_most_one_cycle(cycle_graph(5))
    two = union_graphs(cycle_graph(4), Graph.from_edges(4, [(0, 2)]))
    assert not at_most_one_cycle(two)


def test_forest_lemma_without_random_edges():
    rep = validate_example("forest-lemma", ExampleParams(n=600, p=0.0, x=5), trials=5)
    assert rep.rate == 1.0 and rep.event_rate("no_inner_edge") == 1.0


def test_star_of_stars_minus_root_without_random_edges():
    n, c = 4000, 20.0
    base = gen_star_of_stars(n, 2 / (3 * c * n), c)
    R = union_graphs(base.graph, Graph.empty(n))
    rest = _remove(R, [base.root])
    assert is_forest(rest) and len(connected_components(rest)) == base.t
    rep = validate_example("2", ExampleParams(n=n, p=2 / (3 * c * n), c=c), trials=20)
    assert rep.details["t"] == base.t and rep.rate >= 0.8


def test_caterpillar_example_small():
    rep = validate_example("3", ExampleParams(n=2000, p=0.5 / 2000, delta=20), trials=10)
    assert rep.rate >= 0.8 and not rep.warnings


def test_unknown_example():
    with pytest.raises(ValueError):
        validate_example("5", ExampleParams(n=10, p=0.1), 1)

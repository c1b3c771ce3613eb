import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from oracles import brute_hadwiger, brute_treewidth, random_edges, recursive_treedepth
from perturb_lab.bounds import (
    SizeError,
    contraction_degeneracy,
    euler_genus_bound,
    genus_lower_bound,
    genus_upper_bound,
    hadwiger_exact_small,
    hadwiger_lower_bound,
    kernel,
    param_bounds,
    ringel_youngs,
    spectral_treewidth_bound,
    treedepth_exact,
    treewidth_exact,
    verify_clique_minor,
)
from perturb_lab.families import gen_bounded_degree_tree
from perturb_lab.graph import (
    ClusterFamily,
    Graph,
    complete_graph,
    contract_family,
    cycle_graph,
    family_is_valid,
    grid_graph,
    is_forest,
    path_graph,
    petersen_graph,
)
from perturb_lab.rng import sample_gnp


def test_treewidth_examples():
    assert treewidth_exact(gen_bounded_degree_tree(15, 3, 1)) == 1
    assert treewidth_exact(path_graph(2)) == 1
    for t in range(1, 9):
        assert treewidth_exact(complete_graph(t)) == t - 1
    assert treewidth_exact(cycle_graph(6)) == 2
    assert treewidth_exact(grid_graph(3, 3)) == 3
    assert brute_treewidth(9, grid_graph(3, 3).edges().tolist()) == 3
    assert treewidth_exact(petersen_graph()) == 4


def test_treedepth_examples():
    assert treedepth_exact(Graph.empty(1)) == 1
    assert treedepth_exact(complete_graph(4)) == 4
    assert treedepth_exact(path_graph(7)) == 3
    assert recursive_treedepth(7, path_graph(7).edges().tolist()) == 3
    assert treedepth_exact(Graph.empty(0)) == 0


def test_size_caps():
    with pytest.raises(SizeError):
        treewidth_exact(path_graph(30), cap=20)
    with pytest.raises(SizeError):
        treedepth_exact(path_graph(20), cap=14)
    with pytest.raises(SizeError):
        hadwiger_exact_small(path_graph(11), cap=10)


def test_genus_examples():
    assert genus_lower_bound(grid_graph(4, 4)) == 0
    assert genus_lower_bound(complete_graph(4)) == 0
    assert genus_lower_bound(complete_graph(7)) == 1
    assert genus_lower_bound(complete_graph(8)) == 2
    assert euler_genus_bound(complete_graph(7)) == 1


def test_ringel_youngs_values():
    expected = {3: 0, 4: 0, 5: 1, 6: 1, 7: 1, 8: 2, 9: 3, 10: 4, 11: 5, 12: 6}
    assert {t: ringel_youngs(t) for t in expected} == expected


def test_genus_upper_bound_small():
    assert genus_upper_bound(path_graph(5)) == 0
    assert genus_upper_bound(complete_graph(5)) == 1
    assert genus_upper_bound(complete_graph(8)) == 2


def test_hadwiger_examples():
    for t in range(1, 8):
        h, wit = hadwiger_lower_bound(complete_graph(t))
        assert h == t and verify_clique_minor(complete_graph(t), wit)
    for g in (path_graph(2), gen_bounded_degree_tree(40, 3, 2)):
        assert hadwiger_lower_bound(g)[0] == 2
    assert hadwiger_exact_small(complete_graph(5)) == 5
    assert hadwiger_exact_small(cycle_graph(5)) == 3
    assert hadwiger_exact_small(Graph.empty(3)) == 1


def test_petersen_hadwiger_number():
    # 15 edges: a K_6 model needs 15 edges between branch sets plus 4 inside them
    pg = petersen_graph()
    assert hadwiger_exact_small(pg) == 5
    assert brute_hadwiger(10, pg.edges().tolist()) == 5
    h, wit = hadwiger_lower_bound(pg, effort=64, seed=1)
    assert h <= 5 and verify_clique_minor(pg, wit)


def test_witness_verification_rejects_bad_models():
    g = cycle_graph(4)
    assert not verify_clique_minor(g, ClusterFamily.of([[0], [2]], 4))
    assert not verify_clique_minor(g, ClusterFamily.of([[0, 2], [1]], 4))
    assert verify_clique_minor(g, ClusterFamily.of([[0], [1], [2, 3]], 4))


def small_graphs(max_n):
    return st.builds(lambda n, s, p: (n, random_edges(random.Random(s), n, p)),
                     st.integers(1, max_n), st.integers(0, 2**32 - 1), st.floats(0, 1))


@settings(max_examples=300, deadline=None)
@given(small_graphs(9))
def test_parameter_relations(inst):
    n, edges = inst
    g = Graph.from_edges(n, edges)
    tw, td, h = treewidth_exact(g), treedepth_exact(g), hadwiger_exact_small(g)
    assert td >= tw + 1
    if n >= 2:
        assert td <= (tw + 1) * math.log2(n) + 1e-9
    assert h - 1 <= tw
    assert contraction_degeneracy(g) <= tw
    hl, wit = hadwiger_lower_bound(g, effort=2, seed=n)
    assert hl <= h and verify_clique_minor(g, wit)
    assert genus_lower_bound(g) <= genus_upper_bound(g)


@settings(max_examples=200, deadline=None)
@given(small_graphs(7))
def test_hadwiger_matches_contraction_oracle(inst):
    n, edges = inst
    assert hadwiger_exact_small(Graph.from_edges(n, edges)) == brute_hadwiger(n, edges)


@settings(max_examples=150, deadline=None)
@given(small_graphs(12))
def test_spectral_bound_is_sound(inst):
    n, edges = inst
    g = Graph.from_edges(n, edges)
    assert spectral_treewidth_bound(g) <= treewidth_exact(g)


def test_spectral_bound_on_grids_and_random_graphs():
    assert spectral_treewidth_bound(grid_graph(20, 20)) <= 20
    assert spectral_treewidth_bound(path_graph(50)) <= 1
    g = sample_gnp(400, 0.05, 3)
    assert spectral_treewidth_bound(g) >= 10


def test_kernel_is_smaller_minor():
    g = cycle_graph(10)
    k = kernel(g)
    assert k.n <= 3
    assert kernel(gen_bounded_degree_tree(30, 3, 0)).m == 0


def test_param_bounds_exact_route():
    b = param_bounds(complete_graph(6))
    assert (b.tw_lb, b.td_lb, b.hadwiger_lb, b.genus_lb) == (5, 6, 6, 1)
    assert b.methods["tw"] == "exact"
    g = sample_gnp(200, 0.05, 1)
    b = param_bounds(g, effort=2)
    assert b.td_lb >= b.tw_lb + 1 >= b.hadwiger_lb
    assert verify_clique_minor(g, b.witness)


def test_minor_bounds_below_host_parameters():
    rng = random.Random(11)
    for _ in range(40):
        n = rng.randint(4, 10)
        g = Graph.from_edges(n, random_edges(rng, n, rng.uniform(0.2, 0.8)))
        perm = list(range(n))
        rng.shuffle(perm)
        cut = sorted(rng.sample(range(1, n), rng.randint(1, n - 1)))
        parts = [perm[a:b] for a, b in zip([0] + cut, cut + [n])]
        fam = ClusterFamily.of(parts, n)
        if not family_is_valid(g, fam):
            continue  # a disconnected branch set does not give a minor
        minor = contract_family(g, fam)
        b = param_bounds(minor, exact_cap=0)
        assert b.tw_lb <= treewidth_exact(g)
        assert b.hadwiger_lb <= hadwiger_exact_small(g)
        assert b.genus_lb <= genus_upper_bound(g)


def test_forest_bounds():
    b = param_bounds(gen_bounded_degree_tree(300, 3, 5))
    assert b.tw_lb == 1 and b.hadwiger_lb == 2 and b.genus_lb == 0
    assert is_forest(gen_bounded_degree_tree(300, 3, 5))

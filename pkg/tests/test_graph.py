import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import bfs_components, cycle_dfs_has_cycle
from perturb_lab.graph import (
    ClusterFamily,
    Graph,
    InvalidFamilyError,
    MultiEdgePairError,
    NonCoverError,
    NonTreeClusterError,
    SelfLoopError,
    SizeMismatchError,
    complete_graph,
    connected_components,
    contract_family,
    cycle_graph,
    format_clusters,
    format_edge_list,
    is_forest,
    lift_forest_check,
    parse_clusters,
    parse_edge_list,
    path_graph,
    spanning_forest,
    union_graphs,
    validate_family,
)


def edge_set(g):
    return {tuple(e) for e in g.edges().tolist()}


def test_graph_normalises_edges():
    g = Graph.from_edges(3, [(1, 0), (0, 1), (2, 1)])
    assert edge_set(g) == {(0, 1), (1, 2)}
    assert g.m == 2 and g.max_degree() == 2


def test_self_loop_rejected():
    with pytest.raises(SelfLoopError):
        Graph.from_edges(2, [(1, 1)])


def test_union_with_edgeless_is_identity():
    assert union_graphs(path_graph(3), Graph.empty(3)) == path_graph(3)


def test_union_closes_a_triangle():
    g = union_graphs(path_graph(3), Graph.from_edges(3, [(0, 2)]))
    assert g == cycle_graph(3) and g.m == 3


def test_union_restores_missing_edge_of_k4():
    k4 = complete_graph(4)
    minus = Graph.from_edges(4, [e for e in edge_set(k4) if e != (0, 1)])
    g = union_graphs(minus, Graph.from_edges(4, [(0, 1)]))
    assert g.m == 6 and edge_set(g) == {(u, v) for u in range(4) for v in range(u + 1, 4)}


def test_union_size_mismatch():
    with pytest.raises(SizeMismatchError):
        union_graphs(path_graph(3), path_graph(4))


def test_components_small_cases():
    assert connected_components(Graph.empty(3)) == [[0], [1], [2]]
    assert connected_components(path_graph(5)) == [[0, 1, 2, 3, 4]]
    g = Graph.from_edges(5, [(0, 1), (1, 2), (2, 0), (3, 4)])
    comps = connected_components(g)
    assert sorted(len(c) for c in comps) == [2, 3]
    assert sorted(map(sorted, comps)) == bfs_components(5, [(0, 1), (1, 2), (2, 0), (3, 4)])


def test_spanning_forest_cases():
    t = Graph.from_edges(5, [(0, 1), (1, 2), (1, 3), (3, 4)])
    assert spanning_forest(t) == t
    f = spanning_forest(cycle_graph(4))
    assert f.m == 3 and is_forest(f)
    assert connected_components(f) == connected_components(cycle_graph(4))
    assert spanning_forest(Graph.empty(2)).m == 0


def test_contract_examples():
    pairs = ClusterFamily.of([[0, 1], [2, 3], [4, 5]], 6)
    assert contract_family(complete_graph(6), pairs) == complete_graph(3)
    assert contract_family(path_graph(6), pairs) == path_graph(3)
    whole = ClusterFamily.of([range(6)], 6)
    single = contract_family(complete_graph(6), whole)
    assert single.n == 1 and single.m == 0


def test_contract_rejects_overlap():
    with pytest.raises(InvalidFamilyError):
        contract_family(path_graph(4), ClusterFamily.of([[0, 1], [1, 2]], 4))


def test_is_forest_examples():
    assert is_forest(path_graph(10))
    assert not is_forest(cycle_graph(3))
    two = Graph.from_edges(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)])
    assert not is_forest(two)
    assert cycle_dfs_has_cycle(6, two.edges().tolist())


def test_validate_family_connectivity():
    validate_family(path_graph(4), ClusterFamily.of([[0, 1], [2, 3]], 4))
    with pytest.raises(InvalidFamilyError):
        validate_family(path_graph(4), ClusterFamily.of([[0, 2]], 4))


def test_lift_forest_examples():
    pairs = ClusterFamily.of([[0, 1], [2, 3], [4, 5]], 6)
    assert lift_forest_check(path_graph(6), pairs) is True
    assert lift_forest_check(cycle_graph(6), pairs) is False
    assert contract_family(cycle_graph(6), pairs) == cycle_graph(3)
    tree = Graph.from_edges(5, [(0, 1), (0, 2), (2, 3), (2, 4)])
    assert lift_forest_check(tree, ClusterFamily.of([[v] for v in range(5)], 5)) is True


def test_lift_forest_error_variants():
    with pytest.raises(NonCoverError):
        lift_forest_check(path_graph(4), ClusterFamily.of([[0, 1]], 4))
    with pytest.raises(NonTreeClusterError):
        lift_forest_check(cycle_graph(3), ClusterFamily.of([[0, 1, 2]], 3))
    # two clusters joined by two edges
    g = Graph.from_edges(4, [(0, 1), (2, 3), (0, 2), (1, 3)])
    with pytest.raises(MultiEdgePairError):
        lift_forest_check(g, ClusterFamily.of([[0, 1], [2, 3]], 4))


@st.composite
def lift_instances(draw):
    """A graph plus a cover by tree-inducing clusters with at most one edge per cluster pair."""
    n = draw(st.integers(1, 30))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = random.Random(seed)
    perm = list(range(n))
    rng.shuffle(perm)
    # chop a permutation into clusters, each a random tree
    clusters, edges = [], set()
    i = 0
    while i < n:
        sz = rng.randint(1, min(5, n - i))
        c = perm[i:i + sz]
        for j in range(1, sz):
            a, b = c[j], c[rng.randrange(j)]
            edges.add((min(a, b), max(a, b)))
        clusters.append(c)
        i += sz
    lab = {v: k for k, c in enumerate(clusters) for v in c}
    used = set()
    for _ in range(rng.randint(0, 2 * n)):
        a, b = rng.randrange(n), rng.randrange(n)
        ka, kb = lab[a], lab[b]
        if ka == kb or (min(ka, kb), max(ka, kb)) in used:
            continue
        used.add((min(ka, kb), max(ka, kb)))
        edges.add((min(a, b), max(a, b)))
    return Graph.from_edges(n, sorted(edges)), ClusterFamily.of(clusters, n)


@settings(max_examples=10_000, deadline=None)
@given(lift_instances())
def test_lift_forest_matches_direct_forest_check(inst):
    g, fam = inst
    assert lift_forest_check(g, fam) == is_forest(g)


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 40), st.integers(0, 2**32 - 1), st.floats(0, 0.3))
def test_components_match_bfs_oracle(n, seed, p):
    rng = random.Random(seed)
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
    g = Graph.from_edges(n, edges)
    assert sorted(map(sorted, connected_components(g))) == bfs_components(n, edges)
    assert is_forest(g) == (not cycle_dfs_has_cycle(n, edges))
    f = spanning_forest(g)
    assert is_forest(f) and edge_set(f) <= edge_set(g)
    assert sorted(map(sorted, connected_components(f))) == bfs_components(n, edges)


def test_edge_list_round_trip():
    g = Graph.from_edges(6, [(0, 5), (1, 2), (3, 4), (2, 5)])
    text = format_edge_list(g)
    assert text.splitlines()[0] == "6 4"
    assert parse_edge_list(text) == g
    assert parse_edge_list(format_edge_list(Graph.empty(3))) == Graph.empty(3)


def test_cluster_list_round_trip():
    fam = ClusterFamily.of([[3, 1], [0], [4, 5, 2]], 7)
    assert parse_clusters(format_clusters(fam), 7) == fam
    assert fam.labels().tolist() == [1, 0, 2, 0, 2, 2, -1]
    assert fam.covered() == 6 and fam.sizes() == [2, 1, 3]


def test_induced_subgraph():
    sub, ids = complete_graph(5).induced([4, 1, 3])
    assert sub == complete_graph(3)
    assert sorted(np.asarray(ids).tolist()) == [1, 3, 4]

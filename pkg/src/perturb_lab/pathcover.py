"""Covering a graph by vertex-disjoint k-vertex paths, and the contraction of
those paths in a perturbed graph.

A spanning forest with few leaves splits into few paths (heavy-path peeling),
and chopping each path into k-vertex pieces loses fewer than k vertices per
path. Contracting the pieces in H + G gives a graph that contains a random
graph on about n/k vertices with edge probability 1 - (1-p)^(k^2).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bounds import ParamBounds, param_bounds
from .graph import (
    ClusterFamily,
    Graph,
    GraphError,
    contract_family,
    is_forest,
    spanning_forest,
    union_graphs,
    validate_family,
)


class CyclicInputError(GraphError):
    pass


class ConfigError(ValueError):
    pass


@dataclass
class PathCover:
    paths: list[list[int]]
    k: int
    alpha_observed: int

    def check(self, H: Graph) -> None:
        seen = set()
        for path in self.paths:
            if len(path) != self.k:
                raise AssertionError(f"path {path} does not have {self.k} vertices")
            for a, b in zip(path, path[1:]):
                if not H.has_edge(a, b):
                    raise AssertionError(f"{a}-{b} is not an edge")
            if seen.intersection(path):
                raise AssertionError("paths overlap")
            seen.update(path)
        floor = max(0, math.ceil(H.n / self.k - self.alpha_observed))
        if len(self.paths) < floor:
            raise AssertionError(f"{len(self.paths)} paths < n/k - alpha = {floor}")


def low_degree_count(forest: Graph) -> int:
    return int(np.sum(forest.degrees() <= 1))


def tree_path_partition(forest: Graph) -> list[list[int]]:
    """Split an acyclic graph into paths, each ending at a degree-<=1 vertex.

    Each component is rooted at its smallest vertex and every vertex continues
    the path of its largest child subtree (smaller id on ties), so the number
    of paths is the number of rooted leaves.
    """
    if not is_forest(forest):
        raise CyclicInputError("tree_path_partition needs an acyclic graph")
    n = forest.n
    adj = forest.adjacency
    parent = [-1] * n
    seen = [False] * n
    order = []
    for r in range(n):
        if seen[r]:
            continue
        seen[r] = True
        start = len(order)
        order.append(r)
        while start < len(order):
            v = order[start]
            start += 1
            for u in adj[v]:
                if not seen[u]:
                    seen[u] = True
                    parent[u] = v
                    order.append(u)
    size = np.ones(n, dtype=np.int64)
    for v in reversed(order):
        if parent[v] >= 0:
            size[parent[v]] += size[v]
    heavy = np.full(n, -1, dtype=np.int64)
    for v in order:
        pv = parent[v]
        if pv >= 0:
            h = heavy[pv]
            if h < 0 or size[v] > size[h] or (size[v] == size[h] and v < h):
                heavy[pv] = v
    paths = []
    for v in sorted(order):
        pv = parent[v]
        if pv >= 0 and heavy[pv] == v:
            continue
        path = [v]
        while heavy[path[-1]] >= 0:
            path.append(int(heavy[path[-1]]))
        paths.append(path)
    return paths


def k_path_cover(H: Graph, k: int) -> PathCover:
    if k < 1:
        raise ConfigError(f"k must be >= 1 (got {k})")
    forest = spanning_forest(H)
    pieces = []
    for path in tree_path_partition(forest):
        for s in range(0, len(path) - k + 1, k):
            pieces.append(path[s:s + k])
    return PathCover(pieces, k, low_degree_count(forest))


def choose_k(n: int, p: float) -> tuple[int, str]:
    """Smallest integer in [2.9/(np), 3/(np)].

    When np > 3 that range lies inside (0, 1); paths of one vertex are used,
    which leaves R itself as the contracted graph.
    """
    if p <= 0:
        raise ConfigError("p must be positive to choose a path length")
    lo, hi = 2.9 / (n * p), 3 / (n * p)
    k = math.ceil(lo - 1e-12)
    if k <= hi + 1e-12:
        return max(k, 1), "range"
    if hi < 1:
        return 1, "np>3"
    raise ConfigError(
        f"no integer k in [2.9/(np), 3/(np)] = [{lo:.4g}, {hi:.4g}]; "
        f"adjust p so that this interval contains an integer (e.g. p = 3/(k n))")


@dataclass
class IndepResult:
    meta: Graph
    bounds: ParamBounds
    cover: PathCover
    family: ClusterFamily
    k: int
    k_rule: str
    q: float
    mq: float
    info: dict = field(default_factory=dict)


def indep_pipeline(H: Graph, G: Graph, p: float, k: int | None = None, effort: int = 4,
                   seed=0, exact_cap: int = 10, spectral: bool = True) -> IndepResult:
    if H.n != G.n:
        raise GraphError(f"H has {H.n} vertices, G has {G.n}")
    n = H.n
    if k is None:
        k, rule = choose_k(n, p)
    else:
        rule = "override"
    cover = k_path_cover(H, k)
    cover.check(H)
    fam = ClusterFamily.of(cover.paths, n)
    R = union_graphs(H, G)
    validate_family(R, fam)
    meta = contract_family(R, fam)
    q = -math.expm1(k * k * math.log1p(-p)) if p < 1 else 1.0
    m = len(cover.paths)
    info = {"alpha": cover.alpha_observed, "m": m, "mq": m * q,
            "mq_ok": m * q >= 1.2 if m >= n * n * p / 6 else None}
    bounds = param_bounds(meta, effort=effort, seed=seed, exact_cap=exact_cap, spectral=spectral)
    return IndepResult(meta, bounds, cover, fam, k, rule, q, m * q, info)

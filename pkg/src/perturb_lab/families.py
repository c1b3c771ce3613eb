"""Base graphs H: generic connected hosts and the sharpness constructions."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .graph import Graph
from .rng import make_rng


class ConstructionError(ValueError):
    pass


FAMILIES = (
    "path",
    "star",
    "bounded-degree-random-tree",
    "caterpillar-path",
    "star-of-stars",
    "path-with-trees",
    "path-bundle",
)


@dataclass(frozen=True)
class FamilySpec:
    family: str
    n: int
    delta: int = 3
    c: float = 20.0
    p: float = 0.0
    k_paths: int = 1

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConstructionError(f"unknown family {self.family!r}; choose from {', '.join(FAMILIES)}")


@dataclass
class BaseGraph:
    """A generated host together with the marked vertex sets some families carry."""

    graph: Graph
    leaves: list[int] = field(default_factory=list)
    root: int | None = None
    path: list[int] = field(default_factory=list)
    blocks: list[list[int]] = field(default_factory=list)
    t: int = 0
    x: int = 0


def gen_path(n: int) -> Graph:
    if n < 1:
        raise ConstructionError("path needs n >= 1")
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def gen_star(n: int) -> Graph:
    if n < 2:
        raise ConstructionError("star needs n >= 2")
    return Graph.from_edges(n, [(0, i) for i in range(1, n)])


def gen_bounded_degree_tree(n: int, delta: int, seed) -> Graph:
    """Random recursive tree where a vertex stops accepting children at degree delta."""
    if n < 1 or delta < 2:
        raise ConstructionError("need n >= 1 and delta >= 2")
    rng = make_rng(seed)
    open_ = [0]
    cap = [delta] + [delta - 1] * (n - 1)
    edges = np.empty((max(n - 1, 0), 2), dtype=np.int64)
    draws = rng.random(n)
    for i in range(1, n):
        j = int(draws[i] * len(open_))
        par = open_[j]
        edges[i - 1] = (par, i)
        cap[par] -= 1
        if cap[par] == 0:
            last = open_.pop()
            if last != par:
                open_[j] = last
        open_.append(i)
    return Graph.from_edges(n, edges)


def gen_caterpillar(n: int, delta: int) -> BaseGraph:
    """Spine of ceil(n/delta) vertices, each carrying delta-1 or delta-2 leaves."""
    if not (n >= delta >= 3):
        raise ConstructionError(f"caterpillar needs n >= delta >= 3 (n={n}, delta={delta})")
    s = -(-n // delta)
    leaves_total = n - s
    base = delta - 2
    extra = leaves_total - s * base
    if extra < 0 or extra > s:
        raise ConstructionError(
            f"cannot hang {leaves_total} leaves on a {s}-vertex spine with delta-2..delta-1 "
            f"leaves per spine vertex (need {s * base} <= n - s <= {s * (delta - 1)})")
    edges = [(i, i + 1) for i in range(s - 1)]
    nxt = s
    for i in range(s):
        for _ in range(base + (1 if i < extra else 0)):
            edges.append((i, nxt))
            nxt += 1
    assert nxt == n
    return BaseGraph(_graph(n, edges), leaves=list(range(s, n)), path=list(range(s)))


def _graph(n, edges):
    return Graph.from_edges(n, np.asarray(edges, dtype=np.int64).reshape(-1, 2))


def _balanced(total: int, parts: int) -> list[int]:
    q, r = divmod(total, parts)
    return [q + 1] * r + [q] * (parts - r)


def _int_range(lo: float, hi: float) -> tuple[int, int]:
    return math.ceil(lo - 1e-12), math.floor(hi + 1e-12)


def choose_block_size(n: int, p: float, c: float) -> int:
    """Smallest integer x with 2/(cnp) <= x <= 3/(cnp)."""
    if p <= 0 or c <= 0:
        raise ConstructionError("need p > 0 and c > 0")
    lo, hi = _int_range(2 / (c * n * p), 3 / (c * n * p))
    if lo > hi:
        raise ConstructionError(f"no integer x in [2/(cnp), 3/(cnp)] = [{2 / (c * n * p):.4g}, {3 / (c * n * p):.4g}]")
    return max(lo, 1)


def star_of_stars(n: int, t: int, x: int) -> BaseGraph:
    """Root 0 joined to the centres of t stars of at most x vertices each."""
    if t < 1 or x < 1:
        raise ConstructionError("need t >= 1 and x >= 1")
    if n - 1 > t * x:
        raise ConstructionError(f"n <= 1 + x*t violated: {n} > {1 + t * x}")
    if n - 1 < t:
        raise ConstructionError(f"each star needs a vertex: n - 1 = {n - 1} < t = {t}")
    sizes = _balanced(n - 1, t)
    edges, blocks, leaves = [], [], []
    nxt = 1
    for sz in sizes:
        centre = nxt
        block = list(range(nxt, nxt + sz))
        edges.append((0, centre))
        edges.extend((centre, v) for v in block[1:])
        leaves.extend(block[1:] if sz > 1 else [centre])
        blocks.append(block)
        nxt += sz
    return BaseGraph(_graph(n, edges), leaves=leaves, root=0, blocks=blocks, t=t, x=x)


def gen_star_of_stars(n: int, p: float, c: float) -> BaseGraph:
    """Largest admissible t in [cn^2p/2, cn^2p], smallest admissible x."""
    x = choose_block_size(n, p, c)
    lo, hi = _int_range(c * n * n * p / 2, c * n * n * p)
    hi = min(hi, n - 1)
    if lo > hi:
        raise ConstructionError(f"no integer t in [cn^2p/2, min(cn^2p, n-1)] = [{lo}, {hi}]")
    t = hi
    if 1 + t * x < n:
        raise ConstructionError(f"n <= 1 + x*t violated: {n} > {1 + t * x}")
    return star_of_stars(n, t, x)


def _binaryish_tree(first: int, size: int) -> list[tuple[int, int]]:
    # heap layout: vertex j hangs under (j-1)//2, so degrees stay <= 3
    return [(first + (j - 1) // 2, first + j) for j in range(1, size)]


def path_with_trees(n: int, t: int, x: int, delta: int) -> BaseGraph:
    """Path on ceil(t/delta) vertices, each carrying at most delta-2 pendant trees."""
    if delta < 3:
        raise ConstructionError("need delta >= 3")
    plen = -(-t // delta)
    if t > plen * (delta - 2):
        raise ConstructionError(
            f"per-vertex capacity exceeded: {t} trees on {plen} path vertices allows at most "
            f"{plen * (delta - 2)} (delta-2 = {delta - 2} per vertex)")
    rest = n - plen
    if rest < t:
        raise ConstructionError(f"each tree needs a vertex: n - |P| = {rest} < t = {t}")
    if rest > t * x:
        raise ConstructionError(f"|V(P)| + sum|B_i| = n needs n - |P| <= t*x: {rest} > {t * x}")
    edges = [(i, i + 1) for i in range(plen - 1)]
    blocks = []
    nxt = plen
    for i, sz in enumerate(_balanced(rest, t)):
        edges.extend(_binaryish_tree(nxt, sz))
        hook = nxt + sz - 1
        edges.append((i // (delta - 2), hook))
        blocks.append(list(range(nxt, nxt + sz)))
        nxt += sz
    return BaseGraph(_graph(n, edges), path=list(range(plen)), blocks=blocks, t=t, x=x)


def _capacity_ok(t: int, delta: int) -> bool:
    return t <= -(-t // delta) * (delta - 2)


def gen_path_with_trees(n: int, delta: int, p: float, c: float) -> BaseGraph:
    """Largest t in [cn^2p/2, cn^2p] that fits the per-vertex capacity and n."""
    x = choose_block_size(n, p, c)
    lo, hi = _int_range(c * n * n * p / 2, c * n * n * p)
    if lo > hi:
        raise ConstructionError(f"no integer t in [cn^2p/2, cn^2p] = [{c * n * n * p / 2:.4g}, {c * n * n * p:.4g}]")
    reasons = []
    for t in range(hi, max(lo, 1) - 1, -1):
        plen = -(-t // delta)
        if not _capacity_ok(t, delta):
            reasons.append("capacity")
            continue
        if n - plen < t:
            reasons.append("n - |P| >= t")
            continue
        if n - plen > t * x:
            reasons.append("n - |P| <= t*x")
            break  # smaller t only makes this worse
        return path_with_trees(n, t, x, delta)
    why = reasons[-1] if reasons else "empty range"
    raise ConstructionError(f"no feasible t in [{lo}, {hi}] (last violated: {why})")


def forest_of_trees(n: int, x: int) -> BaseGraph:
    """t = floor(n/x) trees of x vertices each; leftover vertices are isolated."""
    if x < 1 or x > n:
        raise ConstructionError(f"need 1 <= x <= n (x={x})")
    t = n // x
    edges, blocks = [], []
    for i in range(t):
        edges.extend(_binaryish_tree(i * x, x))
        blocks.append(list(range(i * x, (i + 1) * x)))
    return BaseGraph(_graph(n, edges), blocks=blocks, t=t, x=x)


def gen_path_bundle(n: int, k_paths: int) -> Graph:
    if k_paths < 1 or n < k_paths:
        raise ConstructionError(f"need 1 <= k_paths <= n (k_paths={k_paths}, n={n})")
    edges = []
    start = 0
    for sz in _balanced(n, k_paths):
        edges.extend((start + i, start + i + 1) for i in range(sz - 1))
        start += sz
    return _graph(n, edges)


def build_family(spec: FamilySpec, seed=0) -> BaseGraph:
    f = spec.family
    if f == "path":
        return BaseGraph(gen_path(spec.n))
    if f == "star":
        return BaseGraph(gen_star(spec.n), root=0, leaves=list(range(1, spec.n)))
    if f == "bounded-degree-random-tree":
        return BaseGraph(gen_bounded_degree_tree(spec.n, spec.delta, seed))
    if f == "caterpillar-path":
        return gen_caterpillar(spec.n, spec.delta)
    if f == "star-of-stars":
        return gen_star_of_stars(spec.n, spec.p, spec.c)
    if f == "path-with-trees":
        return gen_path_with_trees(spec.n, spec.delta, spec.p, spec.c)
    return BaseGraph(gen_path_bundle(spec.n, spec.k_paths))

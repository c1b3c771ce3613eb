"""Treewidth, treedepth, genus and Hadwiger number: exact small-graph solvers
and lower bounds that scale.

Every lower bound here is certified by a minor of the input: the Hadwiger
bound returns verified branch sets, the treewidth bounds come from a
contraction sequence or from a separator argument on a contracted kernel, and
the genus bound combines Euler's formula with the genus of complete graphs.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import numpy as np

from .graph import (
    ClusterFamily,
    Graph,
    GraphError,
    InvalidFamilyError,
    component_labels,
    contract_family,
    validate_family,
)
from .rng import make_rng

TREEWIDTH_CAP = 20
TREEDEPTH_CAP = 14
HADWIGER_CAP = 10


class SizeError(GraphError):
    pass


def _masks(g: Graph) -> list[int]:
    adj = [0] * g.n
    for u, v in g.edges().tolist():
        adj[u] |= 1 << v
        adj[v] |= 1 << u
    return adj


def _bits(x: int):
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def _flood(adj: list[int], start: int, within: int) -> int:
    """Vertices of ``within`` reachable from ``start`` (start must lie in within)."""
    seen = frontier = 1 << start
    while frontier:
        nxt = 0
        for v in _bits(frontier):
            nxt |= adj[v]
        frontier = nxt & within & ~seen
        seen |= frontier
    return seen


def _components(adj: list[int], within: int) -> list[int]:
    out = []
    rest = within
    while rest:
        c = _flood(adj, (rest & -rest).bit_length() - 1, rest)
        out.append(c)
        rest &= ~c
    return out


# -- treewidth ---------------------------------------------------------------

def _greedy_width(adj: list[int], n: int) -> int:
    """Width of the min-fill elimination order; an upper bound on treewidth."""
    adj = adj[:]
    alive = (1 << n) - 1
    width = 0
    for _ in range(n):
        best, best_fill = -1, None
        for v in _bits(alive):
            nb = adj[v] & alive
            fill = sum(bin(nb & ~adj[u] & ~(1 << u)).count("1") for u in _bits(nb))
            if best_fill is None or fill < best_fill:
                best, best_fill = v, fill
        nb = adj[best] & alive
        width = max(width, bin(nb).count("1"))
        for u in _bits(nb):
            adj[u] |= nb & ~(1 << u)
        alive &= ~(1 << best)
    return width


def _tw_feasible(adj: list[int], n: int, k: int) -> bool:
    # layered search over eliminated sets S; v may go next when the set of
    # outside vertices it reaches through S has at most k members
    full = (1 << n) - 1
    frontier = {0}
    while frontier:
        nxt = set()
        for S in frontier:
            if n - bin(S).count("1") <= k + 1:
                return True
            for v in _bits(full & ~S):
                comp = _flood(adj, v, S | (1 << v))
                reach = 0
                for u in _bits(comp):
                    reach |= adj[u]
                if bin(reach & ~S & ~(1 << v)).count("1") <= k:
                    nxt.add(S | (1 << v))
        frontier = nxt
    return False


def treewidth_exact(g: Graph, cap: int = TREEWIDTH_CAP) -> int:
    if g.n > cap:
        raise SizeError(f"treewidth_exact is capped at {cap} vertices (got {g.n})")
    if g.m == 0:
        return 0
    adj = _masks(g)
    lo = max(1, contraction_degeneracy(g))
    hi = _greedy_width(adj, g.n)
    while lo < hi:
        if _tw_feasible(adj, g.n, lo):
            return lo
        lo += 1
    return hi


# -- treedepth ---------------------------------------------------------------

def treedepth_exact(g: Graph, cap: int = TREEDEPTH_CAP) -> int:
    if g.n > cap:
        raise SizeError(f"treedepth_exact is capped at {cap} vertices (got {g.n})")
    if g.n == 0:
        return 0
    adj = _masks(g)
    memo: dict[int, int] = {}

    def td_connected(S: int) -> int:
        if S & (S - 1) == 0:
            return 1
        if S in memo:
            return memo[S]
        size = bin(S).count("1")
        # a clique needs all its vertices on one root path
        if all(adj[v] & S == S & ~(1 << v) for v in _bits(S)):
            memo[S] = size
            return size
        best = size
        for v in _bits(S):
            rest = S & ~(1 << v)
            d = max(td_connected(c) for c in _components(adj, rest))
            best = min(best, 1 + d)
        memo[S] = best
        return best

    return max(td_connected(c) for c in _components(adj, (1 << g.n) - 1))


# -- Hadwiger number ------------------------------------------------------------

def _connected_sets(adj: list[int], v: int, within: int):
    """All connected subsets of ``within`` containing v (each once)."""
    def grow(cur: int, frontier: int, banned: int):
        yield cur
        cand = frontier & ~banned
        for u in _bits(cand):
            b = 1 << u
            banned |= b
            yield from grow(cur | b, (frontier | adj[u]) & within & ~cur & ~b, banned)

    yield from grow(1 << v, adj[v] & within, 1 << v)


def _has_clique_minor(adj: list[int], verts: int, t: int) -> bool:
    # a model inside a connected vertex set extends to a partition of it, so it
    # suffices to enumerate partitions into connected blocks, each block taken
    # as the one holding the smallest uncovered vertex
    def rec(rest: int, blocks: list[int], nbrs: list[int]) -> bool:
        need = t - len(blocks)
        if need == 0:
            return True
        if bin(rest).count("1") < need:
            return False
        v = (rest & -rest).bit_length() - 1
        for B in _connected_sets(adj, v, rest):
            nb = 0
            for u in _bits(B):
                nb |= adj[u]
            if not all(nb & b for b in blocks):
                continue
            left = rest & ~B
            # every block must touch each later block, and later blocks are
            # disjoint subsets of what is left
            if any(bin(x & left).count("1") < need - 1 for x in nbrs + [nb]):
                continue
            if need > 1:
                k = need - 1
                inner = sum(bin(adj[u] & left).count("1") for u in _bits(left)) // 2
                if inner < k * (k - 1) // 2 + bin(left).count("1") - k:
                    continue
            if rec(left, blocks + [B], nbrs + [nb]):
                return True
        return False

    return rec(verts, [], [])


def hadwiger_exact_small(g: Graph, cap: int = HADWIGER_CAP) -> int:
    if g.n > cap:
        raise SizeError(f"hadwiger_exact_small is capped at {cap} vertices (got {g.n})")
    if g.n == 0:
        return 0
    adj = _masks(g)
    best = max(1, hadwiger_lower_bound(g, effort=4, seed=0)[0])
    for comp in _components(adj, (1 << g.n) - 1):
        size = bin(comp).count("1")
        edges = sum(bin(adj[v] & comp).count("1") for v in _bits(comp)) // 2
        t = best + 1
        # a K_t model covering the component uses t(t-1)/2 + size - t edges
        while t <= size and t * (t - 1) // 2 + size - t <= edges and _has_clique_minor(adj, comp, t):
            best = t
            t += 1
    return best


def _contraction_run(g: Graph, rng: np.random.Generator):
    """Contract a minimum-degree vertex into its least-connected neighbour until
    the graph is complete; isolated vertices are deleted.

    Returns (clique branch-set representatives, union-find parents, largest
    minimum degree seen). The last value is a treewidth lower bound.
    """
    n = g.n
    adj = [set(a) for a in g.adjacency]
    alive = [True] * n
    uf = list(range(n))
    noise = rng.random(n)
    heap = [(len(adj[v]), noise[v], v) for v in range(n)]
    heapq.heapify(heap)
    live = n
    mmd = 0

    def find(x):
        while uf[x] != x:
            uf[x] = uf[uf[x]]
            x = uf[x]
        return x

    while heap:
        d, _, v = heapq.heappop(heap)
        if not alive[v] or d != len(adj[v]):
            continue
        mmd = max(mmd, d)
        if d == live - 1:
            break  # minimum degree live-1 means the remaining graph is complete
        alive[v] = False
        live -= 1
        if d == 0:
            continue
        u = min(adj[v], key=lambda w: (len(adj[w]), noise[w]))
        uf[v] = u
        for w in adj[v]:
            adj[w].discard(v)
            if w != u and w not in adj[u]:
                adj[u].add(w)
                adj[w].add(u)
            elif w != u:
                heapq.heappush(heap, (len(adj[w]), noise[w], w))
        adj[v] = set()
        heapq.heappush(heap, (len(adj[u]), noise[u], u))
    reps = [v for v in range(n) if alive[v]]
    return reps, [find(x) for x in range(n)], mmd


def contraction_degeneracy(g: Graph, seed=0) -> int:
    """Largest minimum degree met along a min-degree contraction sequence."""
    if g.m == 0:
        return 0
    return _contraction_run(g, make_rng(seed))[2]


def verify_clique_minor(g: Graph, fam: ClusterFamily) -> bool:
    try:
        validate_family(g, fam)
    except InvalidFamilyError:
        return False
    k = len(fam)
    return contract_family(g, fam).m == k * (k - 1) // 2


def hadwiger_lower_bound(g: Graph, effort: int = 4, seed=0) -> tuple[int, ClusterFamily]:
    if g.n == 0:
        return 0, ClusterFamily((), 0)
    best = 1
    best_fam = ClusterFamily(((0,),), g.n)
    if g.m == 0:
        return best, best_fam
    rng = make_rng(seed)
    for _ in range(max(1, effort)):
        reps, root, _ = _contraction_run(g, rng)
        if len(reps) <= best:
            continue
        rank = {r: i for i, r in enumerate(reps)}
        groups = [[] for _ in reps]
        for x, r in enumerate(root):
            if r in rank:
                groups[rank[r]].append(x)
        fam = ClusterFamily.of(groups, g.n)
        if verify_clique_minor(g, fam):
            best, best_fam = len(reps), fam
    return best, best_fam


# -- spectral treewidth bound --------------------------------------------------

def kernel(g: Graph) -> Graph:
    """Minor left after repeatedly deleting vertices of degree <= 1 and
    contracting vertices of degree 2 into a neighbour."""
    adj = [set(a) for a in g.adjacency]
    alive = [True] * g.n
    stack = [v for v in range(g.n) if len(adj[v]) <= 2]
    while stack:
        v = stack.pop()
        if not alive[v]:
            continue
        d = len(adj[v])
        if d > 2:
            continue
        alive[v] = False
        nb = list(adj[v])
        for w in nb:
            adj[w].discard(v)
        if d == 2:
            a, b = nb
            adj[a].add(b)
            adj[b].add(a)
        adj[v] = set()
        stack.extend(w for w in nb if len(adj[w]) <= 2)
    keep = [v for v in range(g.n) if alive[v]]
    new = {v: i for i, v in enumerate(keep)}
    edges = [(new[v], new[w]) for v in keep for w in adj[v] if v < w]
    return Graph.from_edges(len(keep), np.asarray(edges, dtype=np.int64).reshape(-1, 2))


def _largest_component(g: Graph) -> Graph:
    if g.n == 0:
        return g
    k, lab = component_labels(g)
    if k == 1:
        return g
    big = np.argmax(np.bincount(lab))
    return g.induced(np.nonzero(lab == big)[0])[0]


def algebraic_connectivity(g: Graph, dense_cutoff: int = 600) -> float:
    """A safe underestimate of the second-smallest Laplacian eigenvalue.

    Small graphs use a dense symmetric eigensolver. Large ones run Lanczos on
    (c I - L) restricted to the complement of the all-ones vector and subtract
    the residual norm plus a relative margin from the resulting estimate.
    """
    from scipy.sparse import csr_matrix, diags
    from scipy.sparse.linalg import LinearOperator, eigsh

    n = g.n
    if n < 2:
        return 0.0
    deg = g.degrees().astype(float)
    A = csr_matrix((np.ones(len(g.indices)), g.indices, g.indptr), shape=(n, n))
    L = diags(deg) - A
    if n <= dense_cutoff:
        ev = np.linalg.eigvalsh(L.toarray())
        return max(0.0, float(ev[1]) - 1e-9 * max(1.0, float(ev[-1])))
    c = 2.0 * deg.max()

    def mv(x):
        x = x - x.mean()
        y = c * x - L @ x
        return y - y.mean()

    op = LinearOperator((n, n), matvec=mv, dtype=float)
    v0 = make_rng(n).standard_normal(n)
    v0 -= v0.mean()
    vals, vecs = eigsh(op, k=1, which="LA", v0=v0, tol=1e-8, maxiter=20 * n)
    theta, x = float(vals[0]), vecs[:, 0]
    resid = float(np.linalg.norm(mv(x) - theta * x))
    mu = c - theta - resid
    return max(0.0, mu - 1e-6 * c)


def spectral_treewidth_bound(g: Graph) -> int:
    """Treewidth lower bound from the algebraic connectivity of the kernel.

    If a graph on N vertices has treewidth k it has a separator S of size
    s <= k + 1 splitting the rest into two sides of sizes between (N-s)/3 and
    2(N-s)/3 with no edges across. Testing the Laplacian against the vector
    that is b on one side and -a on the other gives mu <= 2 D_s / (N - s),
    with D_s the sum of the s largest degrees. The smallest s meeting that
    inequality, minus one, is therefore a lower bound.
    """
    if g.m == 0:
        return 0
    h = _largest_component(kernel(g))
    N = h.n
    if N < 4:
        return 0
    mu = algebraic_connectivity(h)
    if mu <= 0:
        return 0
    Ds = np.cumsum(np.sort(h.degrees())[::-1])
    s = np.arange(1, N + 1)
    ok = 2 * Ds >= mu * (N - s)
    first = int(s[np.argmax(ok)]) if ok.any() else N
    return max(0, first - 1)


# -- genus ---------------------------------------------------------------------

def ringel_youngs(t: int) -> int:
    """Genus of K_t."""
    if t < 3:
        return 0
    return -(-((t - 3) * (t - 4)) // 12)


def euler_genus_bound(g: Graph) -> int:
    """Sum over components of ceil((E - 3V + 6)/6), clamped at zero each."""
    if g.n == 0:
        return 0
    k, lab = component_labels(g)
    V = np.bincount(lab, minlength=k)
    e = g.edges()
    E = np.bincount(lab[e[:, 0]], minlength=k) if len(e) else np.zeros(k, dtype=np.int64)
    total = 0
    for vi, ei in zip(V.tolist(), E.tolist()):
        if vi >= 3:
            total += max(0, -(-(ei - 3 * vi + 6) // 6))
    return total


def genus_lower_bound(g: Graph, effort: int = 4, seed=0, hadwiger: int | None = None) -> int:
    if hadwiger is None:
        hadwiger = hadwiger_lower_bound(g, effort, seed)[0]
    return max(euler_genus_bound(g), ringel_youngs(hadwiger))


def genus_upper_bound(g: Graph) -> int:
    """Per component, the smaller of floor(cycle rank / 2) and the genus of K_V."""
    if g.n == 0:
        return 0
    k, lab = component_labels(g)
    V = np.bincount(lab, minlength=k)
    e = g.edges()
    E = np.bincount(lab[e[:, 0]], minlength=k) if len(e) else np.zeros(k, dtype=np.int64)
    return sum(min((ei - vi + 1) // 2, ringel_youngs(vi)) for vi, ei in zip(V.tolist(), E.tolist()))


# -- combined -------------------------------------------------------------------

def dfs_path_length(g: Graph, seed=0) -> int:
    """Vertices on the longest root-to-node path of a DFS tree from a random root,
    restricted to the largest component."""
    if g.n == 0:
        return 0
    h = _largest_component(g)
    root = int(make_rng(seed).integers(h.n))
    adj = h.adjacency
    depth = {root: 1}
    best = 1
    stack = [(root, iter(adj[root]))]
    while stack:
        v, it = stack[-1]
        for u in it:
            if u not in depth:
                depth[u] = depth[v] + 1
                best = max(best, depth[u])
                stack.append((u, iter(adj[u])))
                break
        else:
            stack.pop()
    return best


@dataclass
class ParamBounds:
    tw_lb: int
    td_lb: int
    genus_lb: int
    hadwiger_lb: int
    witness: ClusterFamily | None = None
    methods: dict = field(default_factory=dict)

    def as_row(self) -> dict:
        return {"tw_lb": self.tw_lb, "td_lb": self.td_lb, "genus_lb": self.genus_lb,
                "hadwiger_lb": self.hadwiger_lb}


def param_bounds(g: Graph, effort: int = 4, seed=0, exact_cap: int = 10, spectral: bool = True) -> ParamBounds:
    """Lower bounds on all four parameters; exact values when n <= exact_cap."""
    methods = {}
    h, wit = hadwiger_lower_bound(g, effort, seed)
    methods["hadwiger"] = "greedy-contraction"
    if g.n <= min(exact_cap, HADWIGER_CAP):
        h = hadwiger_exact_small(g)
        methods["hadwiger"] = "exact"
    if g.n <= min(exact_cap, TREEWIDTH_CAP):
        tw = treewidth_exact(g)
        methods["tw"] = "exact"
    else:
        tw = max(h - 1, contraction_degeneracy(g, seed))
        methods["tw"] = "contraction-degeneracy"
        if spectral:
            sp = spectral_treewidth_bound(g)
            if sp > tw:
                tw, methods["tw"] = sp, "spectral-kernel"
    if g.n <= min(exact_cap, TREEDEPTH_CAP):
        td = treedepth_exact(g)
        methods["td"] = "exact"
    else:
        L = dfs_path_length(g, seed)
        td = max(tw + 1, h, math.ceil(math.log2(L + 1)) if L else 0)
        methods["td"] = "tw+1/clique/path"
    genus = max(euler_genus_bound(g), ringel_youngs(h))
    methods["genus"] = "euler/ringel-youngs"
    return ParamBounds(tw, td, genus, h, wit, methods)

"""Cluster-partition pipeline: grow many equal-sized connected pieces in H + G1.

Stages
  S1  bucket the fragmentation clusters by dyadic size and keep the buckets
      whose total mass reaches the activity threshold c_i;
  S2  inside each bucket, find a sequence of clusters with a random edge
      between every consecutive pair (fixed order for huge buckets, DFS path
      on the cluster graph otherwise);
  S3  trim a tenth of the mass off both ends of each sequence and splice the
      sequences of consecutive buckets together through random edges;
  S4  cut the spliced line greedily into groups whose size lands in the
      target window.

Strict mode uses the literal constants and refuses inputs outside the
lemma's hypotheses. Relaxed mode keeps the same formulas but lets the caller
rescale ell, the activity thresholds, the coverage target and the window,
because the literal constants are vacuous below astronomically large n.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .fragment import fragment
from .graph import (
    ClusterFamily,
    Graph,
    InvalidFamilyError,
    SizeMismatchError,
    contract_family,
    is_connected,
    union_graphs,
    validate_family,
)

Mode = Literal["strict", "relaxed"]
EdgesMode = Literal["random-only", "all"]


class PreconditionError(ValueError):
    pass


class ContractViolation(ValueError):
    pass


def strict_violations(n: int, p: float, delta: int, C: float, Cprime: float) -> list[str]:
    out = []
    if C < 8:
        out.append(f"C = {C} < 8")
    if Cprime < C:
        out.append(f"C' = {Cprime} < C = {C}")
    if not (0 < p <= 2 / n):
        out.append(f"p = {p:.6g} outside (0, 2/n = {2 / n:.6g}]")
    if delta > n * n * p / (4800 * Cprime):
        out.append(f"Delta = {delta} > n^2 p / (4800 C') = {n * n * p / (4800 * Cprime):.6g}")
    return out


@dataclass(frozen=True)
class PipelineParams:
    """Constants of one pipeline run; ``p`` is the edge probability of G1."""

    n: int
    p: float
    delta: int
    C: float = 8.0
    Cprime: float | None = None
    ell: int | None = None
    mode: Mode = "relaxed"
    edges_mode: EdgesMode = "random-only"
    c_scale: float = 1.0
    coverage: float = 1 / 24
    window: float | None = None

    def __post_init__(self):
        if self.Cprime is None:
            object.__setattr__(self, "Cprime", self.C)
        if self.mode not in ("strict", "relaxed"):
            raise ValueError(f"mode must be strict or relaxed, got {self.mode!r}")
        if self.edges_mode not in ("random-only", "all"):
            raise ValueError(f"edges_mode must be random-only or all, got {self.edges_mode!r}")
        if self.n < 1 or self.delta < 1:
            raise PreconditionError("need n >= 1 and delta >= 1")
        if self.mode == "strict":
            bad = strict_violations(self.n, self.p, self.delta, self.C, self.Cprime)
            if bad:
                raise PreconditionError("strict-mode hypotheses violated: " + "; ".join(bad))
        elif not (0 <= self.p <= 1):
            raise PreconditionError(f"p = {self.p} outside [0, 1]")
        elif self.p == 0 and self.ell is None:
            raise PreconditionError("ell must be given explicitly when p = 0")

    @property
    def ell_exact(self) -> float:
        return 96 * self.C / (self.n * self.p)

    @property
    def ell_int(self) -> int:
        if self.mode == "relaxed" and self.ell is not None:
            return int(self.ell)
        return max(1, math.ceil(self.ell_exact - 1e-9))

    @property
    def delta_prime(self) -> float:
        return self.Cprime * self.delta / self.C

    @property
    def n2p(self) -> float:
        return self.n * self.n * self.p

    def num_levels(self) -> int:
        dp = self.delta_prime
        return max(0, math.ceil(math.log2(dp) - 1e-12)) if dp > 1 else 0

    def activity_threshold(self, i: int) -> float:
        if self.p == 0:
            return math.inf
        u = 2 ** (i - 1) * self.ell_int
        lg = math.log2(self.n2p) if self.n2p > 1 else 0.0
        second = self.n / (50 * lg) if lg > 0 else math.inf
        c = max(80 / (u * self.p), second)
        return c if self.mode == "strict" else c * self.c_scale

    def window_bounds(self) -> tuple[float, float]:
        if self.mode == "strict":
            lo = 96 * self.Cprime * self.delta / (self.n * self.p)
            return lo, 2 * lo
        a = self.delta_prime if self.window is None else self.window
        lo = a * self.ell_int
        return lo, 2 * lo

    def coverage_target(self) -> float:
        return self.n / 24 if self.mode == "strict" else self.coverage * self.n

    def count_floor(self) -> float:
        if self.mode == "strict":
            return self.n2p / (9600 * self.Cprime * self.delta)
        lo, hi = self.window_bounds()
        return max(0.0, (self.coverage_target() - lo) / hi)


@dataclass
class Level:
    index: int
    u: int
    clusters: list[tuple[int, ...]]
    threshold: float
    mass: int
    active: bool
    klass: str  # "A1", "A2" or "-" when inactive


@dataclass
class LevelDecomposition:
    levels: list[Level]
    unplaced: list[tuple[int, ...]] = field(default_factory=list)

    @property
    def active(self) -> list[Level]:
        return [lv for lv in self.levels if lv.active]


@dataclass
class LinkResult:
    sequence: list[int]          # indices into the level's cluster list
    target: int
    shortfall: bool


@dataclass
class ConcatResult:
    sequence: list[tuple[int, ...]]
    mass: int
    linked_mass: int             # mass of the level lines that were spliced in
    fallback_levels: list[int]
    skipped_levels: list[int]
    ledger_ok: bool


@dataclass
class PipelineReport:
    levels: list[dict] = field(default_factory=list)
    clusters: int = 0
    covered_after_s3: int = 0
    coverage_target: float = 0.0
    coverage_ok: bool = False
    mass_ledger_ok: bool = True
    fallback_levels: list[int] = field(default_factory=list)
    skipped_levels: list[int] = field(default_factory=list)
    m: int = 0
    count_floor: float = 0.0
    window: tuple[float, float] = (0.0, 0.0)
    min_size: int = 0
    max_size: int = 0
    discarded: int = 0
    contract: dict = field(default_factory=dict)
    success: bool = False
    fail_stage: str = ""
    reason: str = ""

    def fail(self, stage: str, reason: str) -> "PipelineReport":
        if not self.fail_stage:
            self.fail_stage, self.reason = stage, reason
        return self


# -- S1 --------------------------------------------------------------------

def dyadic_levels(fam: ClusterFamily, params: PipelineParams) -> LevelDecomposition:
    ell = params.ell_int
    k = params.num_levels()
    buckets: list[list[tuple[int, ...]]] = [[] for _ in range(k)]
    unplaced = []
    for c in fam.clusters:
        if len(c) < ell:
            raise ContractViolation(f"cluster of size {len(c)} below ell = {ell}")
        i = (len(c) // ell).bit_length()  # 2^(i-1) ell <= |S| < 2^i ell
        if i <= k:
            buckets[i - 1].append(c)
        else:
            unplaced.append(c)
    thresh = (params.n2p) ** (2 / 3)
    levels = []
    for i in range(1, k + 1):
        cl = sorted(buckets[i - 1], key=lambda s: s[0])
        mass = sum(len(s) for s in cl)
        c_i = params.activity_threshold(i)
        active = mass >= c_i and mass > 0
        klass = ("A1" if 2 ** i > thresh else "A2") if active else "-"
        levels.append(Level(i, 2 ** (i - 1) * ell, cl, c_i, mass, active, klass))
    return LevelDecomposition(levels, unplaced)


# -- S2 --------------------------------------------------------------------

def _cluster_graph(clusters: list[tuple[int, ...]], links: Graph) -> list[list[int]]:
    lab = np.full(links.n, -1, dtype=np.int64)
    for i, c in enumerate(clusters):
        lab[list(c)] = i
    e = links.edges()
    a, b = lab[e[:, 0]], lab[e[:, 1]]
    keep = (a >= 0) & (b >= 0) & (a != b)
    meta = Graph.from_edges(len(clusters), np.stack([a[keep], b[keep]], axis=1))
    return meta.adjacency


def dfs_long_path(adj: list[list[int]], root: int = 0) -> list[int]:
    """Root-to-deepest path of a DFS tree (neighbours visited in id order)."""
    if not adj:
        return []
    parent = {root: -1}
    depth = {root: 1}
    best = root
    stack = [(root, iter(adj[root]))]
    while stack:
        v, it = stack[-1]
        for u in it:
            if u not in parent:
                parent[u] = v
                depth[u] = depth[v] + 1
                if depth[u] > depth[best]:
                    best = u
                stack.append((u, iter(adj[u])))
                break
        else:
            stack.pop()
    path = []
    while best != -1:
        path.append(best)
        best = parent[best]
    return path[::-1]


def link_within_level(clusters: list[tuple[int, ...]], links: Graph, klass: str) -> LinkResult:
    n_i = len(clusters)
    if n_i == 0:
        return LinkResult([], 0, True)
    adj = _cluster_graph(clusters, links)
    if klass == "A1":
        # fixed order; keep the longest run of consecutively linked clusters
        best_start, best_len, start = 0, 1, 0
        for j in range(1, n_i + 1):
            linked = j < n_i and j in set(adj[j - 1])
            if not linked:
                if j - start > best_len:
                    best_start, best_len = start, j - start
                start = j
        seq = list(range(best_start, best_start + best_len))
        return LinkResult(seq, n_i, len(seq) < n_i)
    target = -(-n_i // 5)
    seq = dfs_long_path(adj, 0)
    return LinkResult(seq, target, len(seq) < target)


# -- S3 --------------------------------------------------------------------

def _trim_points(sizes: list[int]) -> tuple[int, int]:
    """0-based (a, b): a is the last index of the shortest prefix holding a tenth
    of the mass, b the first index of the shortest such suffix."""
    total = sum(sizes)
    need = total / 10
    acc, a = 0, len(sizes) - 1
    for k, s in enumerate(sizes):
        acc += s
        if acc >= need:
            a = k
            break
    acc, b = 0, 0
    for k in range(len(sizes) - 1, -1, -1):
        acc += sizes[k]
        if acc >= need:
            b = k
            break
    return a, b


def _find_link(out_cands: list[int], in_cands: list[int], seq_a: list[tuple[int, ...]],
               seq_b: list[tuple[int, ...]], links: Graph, lab_b: np.ndarray) -> tuple[int, int] | None:
    """Smallest out index, then smallest in index, joined by an edge of ``links``."""
    allowed = set(in_cands)
    for beta in out_cands:
        verts = np.asarray(seq_a[beta], dtype=np.int64)
        nbrs = np.concatenate([links.neighbors(v) for v in verts]) if len(verts) else np.zeros(0, np.int64)
        hits = lab_b[nbrs]
        hits = [h for h in np.unique(hits[hits >= 0]).tolist() if h in allowed]
        if hits:
            return beta, min(hits)
    return None


def concatenate_levels(lines: list[list[tuple[int, ...]]], links: Graph,
                       level_ids: list[int] | None = None) -> ConcatResult:
    """Splice per-level lines (in increasing level order) into one linked line."""
    level_ids = level_ids or list(range(1, len(lines) + 1))
    lines = [ln for ln in lines]
    if not lines:
        return ConcatResult([], 0, 0, [], [], True)
    info = []
    fallback = []
    for j, ln in enumerate(lines):
        a, b = _trim_points([len(s) for s in ln])
        if a < b:
            info.append((list(range(0, a + 1)), list(range(b + 1, len(ln)))))
        else:
            fallback.append(level_ids[j])
            info.append(([0], [len(ln) - 1]))

    def labels_of(ln):
        lab = np.full(links.n, -1, dtype=np.int64)
        for k, s in enumerate(ln):
            lab[list(s)] = k
        return lab

    seq: list[tuple[int, ...]] = []
    included = [0]
    skipped = []
    cur, alpha = 0, 0
    nxt = 1
    while True:
        linked = None
        while nxt < len(lines) and linked is None:
            outs = [k for k in info[cur][1] if k >= alpha]
            linked = _find_link(outs, info[nxt][0], lines[cur], lines[nxt], links, labels_of(lines[nxt]))
            if linked is None:
                skipped.append(level_ids[nxt])
                nxt += 1
        if linked is None:
            seq.extend(lines[cur][alpha:])
            break
        beta, alpha_next = linked
        seq.extend(lines[cur][alpha:beta + 1])
        included.append(nxt)
        cur, alpha = nxt, alpha_next
        nxt = cur + 1
    mass = sum(len(s) for s in seq)
    linked_mass = sum(len(s) for j in included for s in lines[j])
    return ConcatResult(seq, mass, linked_mass, fallback, skipped, 5 * mass >= 4 * linked_mass)


# -- S4 --------------------------------------------------------------------

def merge_sequence(seq: list[tuple[int, ...]], window_lo: float, host_n: int) -> tuple[ClusterFamily, int]:
    """Greedy left-to-right grouping; returns the groups and the discarded mass."""
    groups, cur, size = [], [], 0
    for s in seq:
        cur.extend(s)
        size += len(s)
        if size >= window_lo:
            groups.append(cur)
            cur, size = [], 0
    return ClusterFamily.of(groups, host_n), size


# -- full run ----------------------------------------------------------------

def check_contract(r0: Graph, fam: ClusterFamily, params: PipelineParams) -> dict:
    lo, hi = params.window_bounds()
    out = {"disjoint_connected": True, "window": True, "count": True}
    try:
        validate_family(r0, fam)
    except InvalidFamilyError:
        out["disjoint_connected"] = False
    sizes = fam.sizes()
    out["window"] = all(lo - 1e-9 <= s <= hi + 1e-9 for s in sizes)
    out["count"] = len(fam) >= params.count_floor() - 1e-9 and len(fam) > 0
    return out


def build_partition(H: Graph, G1: Graph, params: PipelineParams) -> tuple[ClusterFamily, PipelineReport]:
    if H.n != G1.n or H.n != params.n:
        raise SizeMismatchError(f"H has {H.n} vertices, G1 {G1.n}, params {params.n}")
    if H.max_degree() > params.delta:
        raise PreconditionError(f"H has max degree {H.max_degree()} > declared Delta = {params.delta}")
    if not is_connected(H):
        raise PreconditionError("H must be connected")
    rep = PipelineReport(window=params.window_bounds(), count_floor=params.count_floor(),
                         coverage_target=params.coverage_target())
    empty = ClusterFamily((), H.n)
    r0 = union_graphs(H, G1)
    links = G1 if params.edges_mode == "random-only" else r0

    clusters = fragment(H, params.ell_int)
    rep.clusters = len(clusters)
    dec = dyadic_levels(clusters, params)
    if not dec.levels:
        return empty, rep.fail("S1", f"no dyadic levels (Delta' = {params.delta_prime:g})")
    if dec.unplaced:
        rep.fail("S1", f"{len(dec.unplaced)} clusters larger than the top level")
    active = dec.active
    if not active:
        rep.levels = [_level_row(lv, None) for lv in dec.levels]
        return empty, rep.fail("S1", "no active level")

    lines, ids = [], []
    link_by_level = {}
    for lv in active:
        res = link_within_level(lv.clusters, links, lv.klass)
        link_by_level[lv.index] = res
        if res.shortfall:
            rep.fail("S2", f"level {lv.index} linked {len(res.sequence)} < target {res.target}")
        lines.append([lv.clusters[k] for k in res.sequence])
        ids.append(lv.index)
    rep.levels = [_level_row(lv, link_by_level.get(lv.index)) for lv in dec.levels]

    cat = concatenate_levels(lines, links, ids)
    rep.covered_after_s3 = cat.mass
    rep.fallback_levels = cat.fallback_levels
    rep.skipped_levels = cat.skipped_levels
    rep.mass_ledger_ok = cat.ledger_ok
    rep.coverage_ok = cat.mass >= rep.coverage_target
    if cat.skipped_levels:
        rep.fail("S3", f"levels {cat.skipped_levels} could not be spliced in")
    if not rep.coverage_ok:
        rep.fail("S3", f"covered {cat.mass} < target {rep.coverage_target:.1f}")

    lo, _ = params.window_bounds()
    fam, discarded = merge_sequence(cat.sequence, lo, H.n)
    rep.m = len(fam)
    rep.discarded = discarded
    sizes = fam.sizes()
    rep.min_size = min(sizes) if sizes else 0
    rep.max_size = max(sizes) if sizes else 0
    rep.contract = check_contract(r0, fam, params)
    if not rep.contract["count"]:
        rep.fail("S4", f"m = {rep.m} < floor {rep.count_floor:.2f}")
    if not rep.contract["window"]:
        rep.fail("S4", f"group sizes [{rep.min_size}, {rep.max_size}] outside window")
    if not rep.contract["disjoint_connected"]:
        rep.fail("validate", "merged groups are not disjoint connected subgraphs of R0")
    rep.success = all(rep.contract.values())
    if rep.success:
        rep.fail_stage, rep.reason = "", ""
    return fam, rep


def _level_row(lv: Level, res: LinkResult | None) -> dict:
    return {
        "level": lv.index, "u": lv.u, "n_i": len(lv.clusters), "mass": lv.mass,
        "c_i": lv.threshold, "active": lv.active, "class": lv.klass,
        "target": res.target if res else 0,
        "linked": len(res.sequence) if res else 0,
        "shortfall": res.shortfall if res else False,
    }


def meta_minor(R: Graph, fam: ClusterFamily, G2: Graph, edges_mode: EdgesMode = "all") -> Graph:
    """Contract the pieces of ``fam`` in R + G2 (only G2 edges with random-only)."""
    validate_family(R, fam)
    host = union_graphs(R, G2) if edges_mode == "all" else G2
    return contract_family(host, fam)


def meta_edge_probability(size_a: int, size_b: int, p2: float) -> float:
    return -math.expm1(size_a * size_b * math.log1p(-p2)) if p2 < 1 else 1.0

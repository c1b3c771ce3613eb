"""Simple undirected graphs on dense vertex ids 0..n-1.

Adjacency is stored in CSR form (``indptr``/``indices``) with each neighbour
list sorted, which keeps construction vectorised for the 10^5-vertex graphs
the pipeline works on while still giving O(deg) neighbour access.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


class GraphError(ValueError):
    pass


class SizeMismatchError(GraphError):
    pass


class SelfLoopError(GraphError):
    pass


class InvalidFamilyError(GraphError):
    pass


class NonTreeClusterError(InvalidFamilyError):
    pass


class MultiEdgePairError(InvalidFamilyError):
    pass


class NonCoverError(InvalidFamilyError):
    pass


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


class Graph:
    """Immutable simple graph. Build with :meth:`from_edges`."""

    __slots__ = ("n", "indptr", "indices", "_edges")

    def __init__(self, n: int, indptr: np.ndarray, indices: np.ndarray):
        self.n = int(n)
        self.indptr = _freeze(np.asarray(indptr, dtype=np.int64))
        self.indices = _freeze(np.asarray(indices, dtype=np.int64))
        self._edges = None

    @classmethod
    def from_edges(cls, n: int, edges) -> "Graph":
        """Build from an iterable or (m, 2) array of pairs.

        Duplicate edges are merged; a self-loop raises :class:`SelfLoopError`.
        """
        if n < 0:
            raise GraphError(f"negative vertex count {n}")
        e = np.asarray(edges if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
        if e.size == 0:
            e = e.reshape(0, 2)
        if e.ndim != 2 or e.shape[1] != 2:
            raise GraphError("edges must be pairs")
        if e.shape[0] and (e.min() < 0 or e.max() >= n):
            raise GraphError(f"edge endpoint outside [0, {n})")
        if np.any(e[:, 0] == e[:, 1]):
            v = int(e[e[:, 0] == e[:, 1]][0, 0])
            raise SelfLoopError(f"self-loop at vertex {v}")
        lo = np.minimum(e[:, 0], e[:, 1])
        hi = np.maximum(e[:, 0], e[:, 1])
        keys = np.unique(lo * max(n, 1) + hi)
        lo, hi = keys // max(n, 1), keys % max(n, 1)
        return cls._from_canonical(n, lo, hi)

    @classmethod
    def _from_canonical(cls, n: int, lo: np.ndarray, hi: np.ndarray) -> "Graph":
        # lo < hi, pairs unique and sorted lexicographically
        src = np.concatenate([lo, hi])
        dst = np.concatenate([hi, lo])
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
        g = cls(n, indptr, dst)
        g._edges = _freeze(np.stack([lo, hi], axis=1).astype(np.int64))
        return g

    @classmethod
    def empty(cls, n: int) -> "Graph":
        return cls.from_edges(n, np.zeros((0, 2), dtype=np.int64))

    # -- queries ---------------------------------------------------------
    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    @property
    def adjacency(self) -> list[list[int]]:
        ptr, idx = self.indptr.tolist(), self.indices.tolist()
        return [idx[ptr[v]:ptr[v + 1]] for v in range(self.n)]

    def edges(self) -> np.ndarray:
        """(m, 2) array of edges with u < v, lexicographically sorted."""
        if self._edges is None:
            src = np.repeat(np.arange(self.n), np.diff(self.indptr))
            keep = src < self.indices
            self._edges = _freeze(np.stack([src[keep], self.indices[keep]], axis=1))
        return self._edges

    @property
    def m(self) -> int:
        return len(self.indices) // 2

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def max_degree(self) -> int:
        return int(self.degrees().max()) if self.n else 0

    def has_edge(self, u: int, v: int) -> bool:
        nb = self.neighbors(u)
        i = np.searchsorted(nb, v)
        return bool(i < len(nb) and nb[i] == v)

    def induced(self, vertices: Sequence[int]) -> tuple["Graph", np.ndarray]:
        """Induced subgraph relabelled to 0..k-1, plus the old ids."""
        vs = np.unique(np.asarray(vertices, dtype=np.int64))
        pos = np.full(self.n, -1, dtype=np.int64)
        pos[vs] = np.arange(len(vs))
        e = self.edges()
        a, b = pos[e[:, 0]], pos[e[:, 1]]
        keep = (a >= 0) & (b >= 0)
        return Graph.from_edges(len(vs), np.stack([a[keep], b[keep]], axis=1)), vs

    def validate(self) -> None:
        """Check simplicity, symmetry and id range; raise GraphError on failure."""
        for v in range(self.n):
            nb = self.neighbors(v)
            if len(nb) and (nb[0] < 0 or nb[-1] >= self.n):
                raise GraphError(f"neighbour of {v} out of range")
            if np.any(np.diff(nb) <= 0):
                raise GraphError(f"adjacency of {v} unsorted or duplicated")
            if np.any(nb == v):
                raise GraphError(f"self-loop at {v}")
            for u in nb.tolist():
                if not self.has_edge(u, v):
                    raise GraphError(f"asymmetric edge {v}->{u}")

    def __eq__(self, other) -> bool:
        return (isinstance(other, Graph) and self.n == other.n
                and np.array_equal(self.edges(), other.edges()))

    def __hash__(self):
        return hash((self.n, self.edges().tobytes()))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


@dataclass(frozen=True)
class ClusterFamily:
    """Ordered disjoint vertex sets; each is a sorted tuple of ids."""

    clusters: tuple[tuple[int, ...], ...]
    host_n: int

    @classmethod
    def of(cls, clusters: Iterable[Iterable[int]], host_n: int) -> "ClusterFamily":
        return cls(tuple(tuple(sorted(int(v) for v in c)) for c in clusters), int(host_n))

    def __len__(self) -> int:
        return len(self.clusters)

    def __iter__(self):
        return iter(self.clusters)

    def sizes(self) -> list[int]:
        return [len(c) for c in self.clusters]

    def covered(self) -> int:
        return sum(len(c) for c in self.clusters)

    def labels(self) -> np.ndarray:
        """Per-vertex cluster index, -1 for uncovered. Raises on overlap or bad id."""
        lab = np.full(self.host_n, -1, dtype=np.int64)
        for i, c in enumerate(self.clusters):
            if not c:
                raise InvalidFamilyError(f"cluster {i} is empty")
            idx = np.asarray(c, dtype=np.int64)
            if idx[0] < 0 or idx[-1] >= self.host_n:
                raise InvalidFamilyError(f"cluster {i} has ids outside [0, {self.host_n})")
            if np.any(lab[idx] >= 0):
                j = int(lab[idx][lab[idx] >= 0][0])
                raise InvalidFamilyError(f"clusters {j} and {i} overlap")
            lab[idx] = i
        return lab


# -- structural operations --------------------------------------------------

def union_graphs(a: Graph, b: Graph) -> Graph:
    if a.n != b.n:
        raise SizeMismatchError(f"cannot union graphs on {a.n} and {b.n} vertices")
    return Graph.from_edges(a.n, np.concatenate([a.edges(), b.edges()]))


def component_labels(g: Graph) -> tuple[int, np.ndarray]:
    """Components numbered in order of their smallest vertex."""
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import connected_components as _cc

    if g.n == 0:
        return 0, np.zeros(0, dtype=np.int64)
    mat = csr_matrix((np.ones(len(g.indices), dtype=np.int8), g.indices, g.indptr), shape=(g.n, g.n))
    k, lab = _cc(mat, directed=False)
    _, first = np.unique(lab, return_index=True)
    rank = np.empty(k, dtype=np.int64)
    rank[np.argsort(first)] = np.arange(k)
    return int(k), rank[lab]


def connected_components(g: Graph) -> list[list[int]]:
    k, lab = component_labels(g)
    order = np.argsort(lab, kind="stable")
    bounds = np.cumsum(np.bincount(lab, minlength=k))[:-1]
    return [part.tolist() for part in np.split(order, bounds)] if k else []


def is_connected(g: Graph) -> bool:
    return g.n <= 1 or component_labels(g)[0] == 1


def bfs_tree(g: Graph, root: int = 0) -> tuple[list[int], list[int]]:
    """BFS order and parent array (-1 for root/unreached) of root's component."""
    adj = g.adjacency
    parent = [-1] * g.n
    seen = [False] * g.n
    seen[root] = True
    order = [root]
    q = deque([root])
    while q:
        v = q.popleft()
        for u in adj[v]:
            if not seen[u]:
                seen[u] = True
                parent[u] = v
                order.append(u)
                q.append(u)
    return order, parent


def spanning_forest(g: Graph) -> Graph:
    """BFS forest, each tree rooted at the smallest id of its component."""
    adj = g.adjacency
    seen = [False] * g.n
    edges = []
    for s in range(g.n):
        if seen[s]:
            continue
        seen[s] = True
        q = deque([s])
        while q:
            v = q.popleft()
            for u in adj[v]:
                if not seen[u]:
                    seen[u] = True
                    edges.append((v, u))
                    q.append(u)
    return Graph.from_edges(g.n, np.asarray(edges, dtype=np.int64).reshape(-1, 2))


def is_forest(g: Graph) -> bool:
    k, _ = component_labels(g)
    return g.m == g.n - k


def contract_family(g: Graph, fam: ClusterFamily) -> Graph:
    """Contract each cluster to one vertex; uncovered vertices are deleted."""
    if fam.host_n != g.n:
        raise SizeMismatchError(f"family over {fam.host_n} vertices, graph has {g.n}")
    lab = fam.labels()
    e = g.edges()
    a, b = lab[e[:, 0]], lab[e[:, 1]]
    keep = (a >= 0) & (b >= 0) & (a != b)
    return Graph.from_edges(len(fam), np.stack([a[keep], b[keep]], axis=1))


def family_is_valid(g: Graph, fam: ClusterFamily) -> bool:
    try:
        validate_family(g, fam)
    except InvalidFamilyError:
        return False
    return True


def validate_family(g: Graph, fam: ClusterFamily) -> None:
    """Disjointness plus connectivity of every cluster in ``g``."""
    if fam.host_n != g.n:
        raise InvalidFamilyError(f"family over {fam.host_n} vertices, graph has {g.n}")
    lab = fam.labels()
    e = g.edges()
    inner = lab[e[:, 0]] == lab[e[:, 1]]
    inner &= lab[e[:, 0]] >= 0
    ce = e[inner]
    # every cluster must be one component of the graph on its internal edges
    _, comp = component_labels(Graph._from_canonical(g.n, ce[:, 0], ce[:, 1]))
    covered = np.nonzero(lab >= 0)[0]
    heads = np.array([c[0] for c in fam.clusters], dtype=np.int64)
    first = comp[heads]
    bad = comp[covered] != first[lab[covered]]
    if bad.any():
        i = int(lab[covered[np.argmax(bad)]])
        raise InvalidFamilyError(f"cluster {i} does not induce a connected subgraph")


def lift_forest_check(g: Graph, fam: ClusterFamily) -> bool:
    """Forest test on the contraction, valid under the forest-lifting hypotheses.

    Every cluster must induce a tree, any two clusters may share at most one
    edge, and the clusters must cover V(g); then the contraction is a forest
    exactly when ``g`` is.
    """
    lab = fam.labels()
    if np.any(lab < 0):
        raise NonCoverError(f"{int(np.sum(lab < 0))} vertices are not covered")
    e = g.edges()
    a, b = lab[e[:, 0]], lab[e[:, 1]]
    inner = np.bincount(a[a == b], minlength=len(fam))
    sizes = np.asarray(fam.sizes())
    bad = np.nonzero(inner != sizes - 1)[0]
    if len(bad):
        raise NonTreeClusterError(f"cluster {int(bad[0])} does not induce a tree")
    try:
        validate_family(g, fam)
    except InvalidFamilyError as exc:
        raise NonTreeClusterError(str(exc)) from None
    cross = a != b
    lo = np.minimum(a[cross], b[cross])
    hi = np.maximum(a[cross], b[cross])
    keys, counts = np.unique(lo * len(fam) + hi, return_counts=True)
    if np.any(counts > 1):
        k = int(keys[counts > 1][0])
        raise MultiEdgePairError(f"clusters {k // len(fam)} and {k % len(fam)} share {int(counts.max())} edges")
    return is_forest(contract_family(g, fam))


# -- edge-list text format ----------------------------------------------------

def format_edge_list(g: Graph) -> str:
    lines = [f"{g.n} {g.m}"]
    lines.extend(f"{u} {v}" for u, v in g.edges().tolist())
    return "\n".join(lines) + "\n"


def parse_edge_list(text: str) -> Graph:
    tokens = text.split()
    if len(tokens) < 2:
        raise GraphError("edge list needs a header 'n m'")
    n, m = int(tokens[0]), int(tokens[1])
    body = tokens[2:]
    if len(body) != 2 * m:
        raise GraphError(f"header declares {m} edges, found {len(body) / 2:g}")
    e = np.asarray(body, dtype=np.int64).reshape(m, 2)
    return Graph.from_edges(n, e)


def write_edge_list(g: Graph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_edge_list(g))


def read_edge_list(path) -> Graph:
    with open(path, encoding="utf-8") as fh:
        return parse_edge_list(fh.read())


def format_clusters(fam: ClusterFamily) -> str:
    return "".join("c " + " ".join(map(str, c)) + "\n" for c in fam.clusters)


def parse_clusters(text: str, host_n: int) -> ClusterFamily:
    clusters = []
    for line in text.splitlines():
        parts = line.split()
        if not parts:
            continue
        if parts[0] != "c":
            raise GraphError(f"cluster line must start with 'c': {line!r}")
        clusters.append([int(x) for x in parts[1:]])
    return ClusterFamily.of(clusters, host_n)


# -- small named graphs used across tests and examples ----------------------

def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def petersen_graph() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph.from_edges(10, outer + spokes + inner)


def grid_graph(rows: int, cols: int) -> Graph:
    e = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                e.append((v, v + 1))
            if r + 1 < rows:
                e.append((v, v + cols))
    return Graph.from_edges(rows * cols, e)

"""Cutting a connected bounded-degree graph into connected pieces of size >= ell.

Root a BFS tree at vertex 0 and sweep vertices deepest-first (ties by smaller
id). Each vertex's residual subtree is itself plus its children's residual
subtrees; as soon as that reaches ``ell`` vertices it is emitted and removed.
All children were already swept and hold fewer than ``ell`` vertices, so an
emitted piece has at most ``1 + deg * (ell - 1) < ell * Delta`` vertices, and
whatever stays attached to the root at the end is smaller than ``ell``.
"""
from __future__ import annotations

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import breadth_first_order

from .graph import ClusterFamily, Graph, GraphError, InvalidFamilyError, validate_family


class DisconnectedError(GraphError):
    pass


def _bfs(g: Graph) -> tuple[np.ndarray, np.ndarray]:
    mat = csr_matrix((np.ones(len(g.indices), dtype=np.int8), g.indices, g.indptr), shape=(g.n, g.n))
    order, pred = breadth_first_order(mat, 0, directed=False, return_predecessors=True)
    return order, pred


def fragment(g: Graph, ell: int) -> ClusterFamily:
    if ell < 1:
        raise ValueError(f"ell must be >= 1 (got {ell})")
    if g.n == 0:
        return ClusterFamily((), 0)
    order, pred = _bfs(g)
    if len(order) != g.n:
        raise DisconnectedError(f"fragment needs a connected graph ({len(order)} of {g.n} reachable)")
    parent = pred.tolist()
    depth = [0] * g.n
    for v in order[1:].tolist():
        depth[v] = depth[parent[v]] + 1
    sweep = np.lexsort((np.arange(g.n), -np.asarray(depth))).tolist()

    residual = [1] * g.n
    cut = [False] * g.n
    emitted = []
    for v in sweep:
        if residual[v] >= ell:
            cut[v] = True
            emitted.append(v)
        elif parent[v] >= 0:
            residual[parent[v]] += residual[v]

    # owner of a vertex = nearest cut vertex on its root path (itself included)
    owner = [-1] * g.n
    for v in order.tolist():
        owner[v] = v if cut[v] else (owner[parent[v]] if parent[v] >= 0 else -1)
    owner_arr = np.asarray(owner)
    slot = np.full(g.n, -1, dtype=np.int64)
    slot[emitted] = np.arange(len(emitted))
    covered = np.nonzero(owner_arr >= 0)[0]
    idx = slot[owner_arr[covered]]
    by = np.argsort(idx, kind="stable")
    bounds = np.cumsum(np.bincount(idx, minlength=len(emitted)))[:-1]
    pieces = np.split(covered[by], bounds) if emitted else []
    return ClusterFamily(tuple(tuple(p.tolist()) for p in pieces), g.n)


def check_fragmentation(g: Graph, fam: ClusterFamily, ell: int) -> list[str]:
    """Violations of the three fragmentation guarantees (empty list when all hold)."""
    problems = []
    try:
        validate_family(g, fam)
    except InvalidFamilyError as exc:
        problems.append(str(exc))
    if fam.covered() < g.n - ell:
        problems.append(f"covered {fam.covered()} < n - ell = {g.n - ell}")
    delta = g.max_degree()
    for i, size in enumerate(fam.sizes()):
        if size < ell or (delta >= 2 and size >= ell * delta):
            problems.append(f"cluster {i} has size {size} outside [{ell}, {ell * delta})")
    return problems

"""Seeded randomness and binomial random graph sampling.

Generator identity: numpy ``PCG64`` seeded through ``SeedSequence``. Trial
``i`` of master seed ``s`` uses ``SeedSequence(entropy=s, spawn_key=(i,))``,
which is what :func:`trial_seed` returns. Edge lists are reproducible for a
fixed numpy major version of ``PCG64``.
"""
from __future__ import annotations

import math

import numpy as np

from .graph import Graph, union_graphs

MASK64 = (1 << 64) - 1


class DomainError(ValueError):
    pass


def trial_seed(master: int, index: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(entropy=int(master) & MASK64, spawn_key=(int(index),))


def make_rng(seed) -> np.random.Generator:
    """Accepts an int, a SeedSequence or an existing Generator (used as is)."""
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, np.random.SeedSequence):
        return np.random.Generator(np.random.PCG64(seed))
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed) & MASK64)))


def spawn(seed, k: int) -> list:
    """k independent child seeds (SeedSequences, or Generators if given one)."""
    if isinstance(seed, np.random.Generator):
        return list(seed.spawn(k))
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(int(seed) & MASK64)
    return seed.spawn(k)


def check_probability(p: float) -> float:
    p = float(p)
    if not (0.0 <= p <= 1.0) or math.isnan(p):
        raise DomainError(f"edge probability {p} outside [0, 1]")
    return p


def _pair_from_index(idx: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    # lexicographic order of pairs (u, v), u < v: row u starts at u*(2n-u-1)/2
    b = 2 * n - 1
    u = np.floor((b - np.sqrt(np.maximum(b * b - 8.0 * idx, 0.0))) / 2).astype(np.int64)
    start = u * (2 * n - u - 1) // 2
    # float rounding can put u off by one near row boundaries
    over = start > idx
    u[over] -= 1
    start = u * (2 * n - u - 1) // 2
    nxt = (u + 1) * (2 * n - u - 2) // 2
    under = idx >= nxt
    u[under] += 1
    start = u * (2 * n - u - 1) // 2
    v = idx - start + u + 1
    return u, v


def sample_gnp(n: int, p: float, seed) -> Graph:
    """G(n, p) by geometric skipping over the lexicographic pair order."""
    p = check_probability(p)
    if n < 0:
        raise DomainError(f"negative vertex count {n}")
    total = n * (n - 1) // 2
    if p == 0.0 or total == 0:
        return Graph.empty(n)
    if p == 1.0:
        iu = np.triu_indices(n, 1)
        return Graph._from_canonical(n, iu[0].astype(np.int64), iu[1].astype(np.int64))
    rng = make_rng(seed)
    log_q = math.log1p(-p)
    mean = total * p
    chunk = int(mean + 6 * math.sqrt(mean) + 64)
    picks = []
    pos = -1
    while True:
        u = rng.random(chunk)
        # 1 - u lies in (0, 1], so the log is finite
        skip = np.floor(np.log1p(-u) / log_q)
        # large skips saturate: anything past the end terminates the scan
        skip = np.minimum(skip, float(total))
        steps = np.cumsum(skip.astype(np.int64) + 1) + pos
        inside = steps < total
        picks.append(steps[inside])
        if not inside.all():
            break
        pos = int(steps[-1])
    idx = np.concatenate(picks)
    lo, hi = _pair_from_index(idx, n)
    return Graph._from_canonical(n, lo, hi)


def two_round_split(p: float) -> tuple[float, float]:
    """Symmetric split with (1 - p1)(1 - p2) = 1 - p."""
    p = check_probability(p)
    if p == 1.0:
        return 1.0, 1.0
    p1 = -math.expm1(0.5 * math.log1p(-p))
    return p1, p1


def sample_two_round(n: int, p: float, seed) -> tuple[Graph, Graph]:
    """Two independent rounds whose union is distributed as G(n, p)."""
    p1, p2 = two_round_split(p)
    s1, s2 = spawn(seed, 2)
    return sample_gnp(n, p1, s1), sample_gnp(n, p2, s2)


def sample_perturbation(n: int, p: float, seed) -> Graph:
    g1, g2 = sample_two_round(n, p, seed)
    return union_graphs(g1, g2)

"""Closed-form lower-bound predictions for a perturbed graph R = H + G(n, p).

All quantities that are rational in the inputs (n^2 p, L, M, m and the
corollary-level ratios) are kept as ``Fraction`` when p is given as a
Fraction or an exact decimal; exponentials, logs and square roots are floats.
Unspecified constants (r for the random-graph bounds, r_h and C'_h for the
clique-minor bound) are inputs, so predictions are in "units of r".
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational


class DomainError(ValueError):
    pass


def _exact(x) -> Fraction | float:
    if isinstance(x, Rational):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    return float(x)


@dataclass(frozen=True)
class BoundFormulaInput:
    n: int
    p: Fraction | float
    delta: int
    C: Fraction | float = 6
    c: float = 1.2
    r: Fraction | float = 1
    r_h: float = 1.0
    Cprime_h: float = 4.0

    @property
    def n2p(self):
        return self.n * self.n * _exact(self.p)


def h_tilde(m: float, q: float, r_h: float = 1.0, Cprime_h: float = 4.0) -> float | None:
    """Piecewise clique-minor lower bound for G(m, q); None where it is undefined."""
    m, q = float(m), float(q)
    if m <= 1 or q <= 0:
        return None
    if q > 0.5:
        return m / (2 * math.sqrt(math.log2(m)))
    if q < 2 / m:
        return None
    if q < Cprime_h / m:
        return r_h * math.sqrt(m)
    base = -math.log1p(-q)  # log of 1/(1-q)
    mq = m * q
    return m / (2 * math.sqrt(math.log(mq) / base))


@dataclass
class TheoremBound:
    n2p: Fraction | float
    L: Fraction | float
    M: Fraction | float
    m: Fraction | float
    q: float
    branch: str                       # "random" or "clique"
    tw: Fraction | float | int
    td: Fraction | float | int
    genus: float | int
    h: float | int | None
    cor_tw: Fraction | float
    cor_td: Fraction | float
    cor_genus: Fraction | float
    cor_h: float
    cor_h_branch: int
    hypotheses: dict = field(default_factory=dict)


def theorem_bound(inp: BoundFormulaInput) -> TheoremBound:
    if inp.delta < 1:
        raise DomainError(f"Delta must be >= 1 (got {inp.delta})")
    n2p = inp.n2p
    if n2p <= 1:
        raise DomainError(f"n^2 p = {float(n2p):.6g} <= 1: the branch selector log(n^2 p) is not positive")
    C = _exact(inp.C)
    r = _exact(inp.r)
    D = inp.delta
    L = 19200 * C * D
    M = (96 * C * D) ** 2 / n2p
    m = n2p / L
    q = -math.expm1(-float(M))
    log_n2p = math.log(float(n2p))
    random_branch = D * D <= float(n2p) * log_n2p
    if random_branch:
        tw = td = r * m
        genus = float(r) * float(m) ** 2 * q
        h = h_tilde(m, q, inp.r_h, inp.Cprime_h)
        branch = "random"
    else:
        k = math.floor(m)
        tw, td, h = max(k - 1, 0), k, k
        genus = -(-((k - 3) * (k - 4)) // 12) if k >= 3 else 0
        branch = "clique"

    ratio = n2p / D
    cor_genus = min(n2p, ratio * ratio)
    logD = max(math.log(D), 1.0)
    if D * D <= n2p:
        cor_h, hb = math.sqrt(float(n2p) / logD), 1
    elif random_branch:
        cor_h, hb = float(n2p) / (D * math.sqrt(logD)), 2
    else:
        cor_h, hb = float(ratio), 3
    hyp = {
        "p_le_2_over_n": _exact(inp.p) <= Fraction(2, inp.n) if isinstance(_exact(inp.p), Fraction) else float(inp.p) <= 2 / inp.n,
        "delta_le_n2p_over_9600C": D <= n2p / (9600 * C),
        "C_ge_10c": float(C) >= 10 * inp.c,
    }
    return TheoremBound(n2p, L, M, m, q, branch, tw, td, genus, h,
                        ratio, ratio, cor_genus, cor_h, hb, hyp)


def predicted_row(n: int, p, delta: int, C=6, r=1) -> dict:
    """Predictions flattened for CSV output; empty strings where undefined."""
    try:
        tb = theorem_bound(BoundFormulaInput(n=n, p=p, delta=delta, C=C, r=r))
    except DomainError:
        return {"tw_pred": "", "td_pred": "", "genus_pred": "", "h_pred": ""}

    def f(x):
        return "" if x is None else float(x)

    return {"tw_pred": f(tb.tw), "td_pred": f(tb.td), "genus_pred": f(tb.genus), "h_pred": f(tb.h)}

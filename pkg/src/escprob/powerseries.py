"""Escape probabilities from the truncated series I + A + A^2 + ... by repeated squaring.

Only for undirected graphs with integer weights in [1, n^c] (or with a
caller-supplied hitting-time bound).  Cost grows with log of the hitting
time; the recursive solver has no such dependence.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import dense
from .errors import UnsupportedForBound
from .graphio import Graph, classify_vertices
from .mpfloat import ceil_log2, precision_bits
from .walkmatrix import EscapeResult, TransitionMatrix, build_transition, merge_result, validate_eps


@dataclass(frozen=True)
class SeriesPlan:
    """Truncation length ``k = 2**r`` and the per-rounding budget for the squaring chain."""

    h: int
    n: int
    c: int
    eps: Fraction
    k: int
    r: int
    per_op_eps: Fraction

    @property
    def bits(self) -> int:
        return precision_bits(self.per_op_eps)


def weight_exponent(g: Graph) -> int:
    """Smallest c with every positive weight an integer in [1, n**c]."""
    top = 1
    for row in g.adjacency:
        for w in row.values():
            if w.sign == 0:
                continue
            x = w.as_fraction()
            if x.denominator != 1 or x < 1:
                raise UnsupportedForBound(f"weight {x} is not an integer >= 1")
            top = max(top, x.numerator)
    if top == 1:
        return 0
    if g.n < 2:
        raise UnsupportedForBound("cannot bound weights on a single vertex")
    c = 0
    while g.n**c < top:
        c += 1
    return c


def hitting_bound(g: Graph, c: int) -> int:
    """``n**c * m**2 + 1``: max hitting time of an unweighted graph is at most m^2,
    weights in [1, n^c] stretch it by at most n^c."""
    if g.directed:
        raise UnsupportedForBound("no hitting-time bound for directed graphs; pass h_override")
    m = g.edge_count()
    return g.n**c * m * m + 1


def truncation_length(h: int, n: int, c: int, eps) -> SeriesPlan:
    eps = Fraction(eps)
    if h < 1:
        raise ValueError("h must be >= 1")
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    span = 2 * h + 1
    raw = span * (2 * n * (c + 1) * ceil_log2(Fraction(span * n) / eps) + 1)
    k = 1 << raw.bit_length()  # smallest power of two strictly above raw
    r = k.bit_length() - 1
    # squaring doubles relative error, so A^(2^j) carries ~2^j * 2n roundings;
    # the products into X add (2n+1) per level
    per_op = eps / (3 * n * k + (2 * n + 1) * r)
    return SeriesPlan(h, n, c, eps, k, r, per_op)


def power_series_inverse(A: TransitionMatrix, plan: SeriesPlan):
    """``X = (I + A)(I + A^2)(I + A^4) ... (I + A^(k/2)) = sum_{i<k} A^i``."""
    prec = plan.bits
    power = [[x.with_precision(prec) for x in row] for row in A.rows]
    X = dense.add_identity(power, prec)
    for _ in range(1, plan.r):
        power = dense.matmul(power, power, prec)
        X = dense.matmul(X, dense.add_identity(power, prec), prec)
    return X


def escape_via_powerseries(g: Graph, t: int, p: int, eps,
                           h_override: Optional[int] = None) -> EscapeResult:
    """P(s, t, p) for every s, each within ``exp(eps)``.

    Half of ``eps`` goes to truncation, half to rounding.
    """
    eps = validate_eps(eps)
    cls = classify_vertices(g, t, p)
    out_prec = precision_bits(eps)
    if not cls.generic:
        return merge_result(g, cls, {}, eps, "powerseries", out_prec)
    if h_override is not None:
        if h_override < 1:
            raise ValueError("h_override must be >= 1")
        h, c = h_override, 0
        try:
            c = weight_exponent(g)
        except UnsupportedForBound:
            pass
    else:
        c = weight_exponent(g)
        h = hitting_bound(g, c)
    plan = truncation_length(h, g.n, c, eps / 2)
    A = build_transition(g, t, p, plan.bits, exclude=cls.undefined)
    X = power_series_inverse(A, plan)
    values = {v: X[v][t] for v in cls.generic}
    return merge_result(g, cls, values, eps, "powerseries", plan.bits)

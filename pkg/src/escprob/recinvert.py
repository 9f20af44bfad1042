"""Recursive Schur-complement inversion of RDDL matrices with an excess vector.

All quantities are carried as magnitudes.  Writing ``a`` for the
off-diagonal magnitudes and ``e`` for the excess magnitudes, one step on
the split ``F = first ceil(m/2)``, ``C = rest`` computes

    p    = e_F + a_FC 1                 (excess of the F block)
    Z_FF = inv(a_FF, p)
    W    = a_CF Z_FF
    S    = a_CC + W a_FC                (off-diagonals only)
    u    = e_C + W e_F
    Z_CC = inv(S, u)

and assembles ``[[Z_FF + Z_FF a_FC Z_CC W, Z_FF a_FC Z_CC], [Z_CC W, Z_CC]]``.
Every term is a sum of products of nonnegative numbers.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional

from . import dense
from .errors import SingularError
from .graphio import Graph, classify_vertices
from .mpfloat import MPFloat, mp_add, mp_div, precision_bits
from .walkmatrix import (
    EscapeResult,
    RDDLSystem,
    build_escape_system,
    build_transition,
    merge_result,
    validate_eps,
)


@dataclass(frozen=True)
class InverseApprox:
    """``Z`` with ``exp(-eps) Z_ij <= inv(N)_ij <= exp(eps) Z_ij`` for every entry."""

    Z: list
    eps_achieved: Fraction


@dataclass(frozen=True)
class CallBudget:
    """Error budgets of one call of the recursion on an ``m x m`` block."""

    depth: int
    m: int
    eps: Fraction
    excess_sum: Fraction
    f_call: Fraction
    schur: Fraction
    c_call: Fraction
    assemble: Fraction
    op_eps: Fraction
    bits: int


def call_budget(m: int, eps: Fraction, depth: int = 0) -> CallBudget:
    """Budgets for a call at dimension ``m``.

    The divisors use the current call's ``m``.  ``op_eps`` is the per-rounding
    budget: the tightest stage target divided by ``m``, since no stage chains
    more than ~3m roundings and ``precision_bits`` keeps 8 guard bits.
    """
    eps = Fraction(eps)
    if m == 1:
        return CallBudget(depth, 1, eps, eps, eps, eps, eps, eps, eps, precision_bits(eps))
    excess_sum = eps / (160 * m**8)
    op_eps = excess_sum / m
    return CallBudget(
        depth=depth,
        m=m,
        eps=eps,
        excess_sum=excess_sum,
        f_call=eps / (80 * m**7),
        schur=eps / (40 * m**7),
        c_call=eps / (20 * m**7),
        assemble=eps / (5 * m),
        op_eps=op_eps,
        bits=precision_bits(op_eps),
    )


@dataclass(frozen=True)
class Schedule:
    calls: tuple

    @property
    def max_bits(self) -> int:
        return max(c.bits for c in self.calls)

    @property
    def deepest_eps(self) -> Fraction:
        return min(c.eps for c in self.calls)

    def by_depth(self):
        """(depth, smallest call eps, widest significand) per recursion level."""
        levels = {}
        for c in self.calls:
            lo, hi = levels.get(c.depth, (c.eps, c.bits))
            levels[c.depth] = (min(lo, c.eps), max(hi, c.bits))
        return [(d, *levels[d]) for d in sorted(levels)]


def precision_schedule(m: int, eps, depth: Optional[int] = None) -> Schedule:
    """Evaluate the whole call tree of ``rec_invert`` for dimension ``m`` symbolically.

    ``depth`` truncates the evaluation at that recursion level.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    eps = Fraction(eps)
    calls = []

    def walk(k, e, d):
        b = call_budget(k, e, d)
        calls.append(b)
        if k == 1 or (depth is not None and d >= depth):
            return
        h = (k + 1) // 2
        walk(h, b.f_call, d + 1)
        walk(k - h, b.c_call, d + 1)

    walk(m, eps, 0)
    return Schedule(tuple(calls))


def _split(a, h):
    top, bottom = a[:h], a[h:]
    return ([r[:h] for r in top], [r[h:] for r in top],
            [r[:h] for r in bottom], [r[h:] for r in bottom])


def _rec(off: List[list], exc: list, eps: Fraction) -> List[list]:
    m = len(exc)
    if m == 1:
        if exc[0].sign == 0:
            raise SingularError("1x1 block with zero excess: some vertex cannot reach the dummy")
        prec = precision_bits(eps)
        return [[mp_div(MPFloat.one(prec), exc[0], prec)]]

    b = call_budget(m, eps)
    prec = b.bits
    h = (m + 1) // 2
    a_ff, a_fc, a_cf, a_cc = _split(off, h)
    e_f, e_c = exc[:h], exc[h:]

    p_tilde = []
    for i in range(h):
        acc = e_f[i]
        for x in a_fc[i]:
            acc = mp_add(acc, x, prec)
        p_tilde.append(acc)
    z_ff = _rec(a_ff, p_tilde, b.f_call)

    w = dense.matmul(a_cf, z_ff, prec)
    through_f = dense.matmul(w, a_fc, prec)
    k = m - h
    zero = MPFloat.zero(prec)
    s = [[mp_add(a_cc[i][j], through_f[i][j], prec) if i != j else zero for j in range(k)]
         for i in range(k)]
    u = [mp_add(e_c[i], dense.dot(w[i], e_f, prec), prec) for i in range(k)]
    z_cc = _rec(s, u, b.c_call)

    z_ff_fc = dense.matmul(z_ff, a_fc, prec)
    top_right = dense.matmul(z_ff_fc, z_cc, prec)
    bottom_left = dense.matmul(z_cc, w, prec)
    correction = dense.matmul(top_right, w, prec)
    top_left = dense.add_matrices(z_ff, correction, prec)
    return [tl + tr for tl, tr in zip(top_left, top_right)] + \
           [bl + bc for bl, bc in zip(bottom_left, z_cc)]


def rec_invert(system: RDDLSystem, eps) -> InverseApprox:
    """Entry-wise ``exp(eps)``-accurate inverse of the RDDL matrix implied by ``system``.

    Raises SingularError when the implied matrix is singular.
    """
    eps = Fraction(eps)
    m = system.m
    if m == 0:
        return InverseApprox([], eps)
    if len(system.offdiag) != m or any(len(r) != m for r in system.offdiag):
        raise ValueError("offdiag must be m x m")
    if any(x.sign < 0 for x in system.excess) or any(x.sign < 0 for r in system.offdiag for x in r):
        raise ValueError("offdiag and excess must be given as nonnegative magnitudes")
    return InverseApprox(_rec(system.offdiag, system.excess, eps), eps)


def escape_via_recinvert(g: Graph, t: int, p: int, eps) -> EscapeResult:
    """P(s, t, p) for every s, each within a factor ``exp(eps)``.

    Budget split: transition entries at ``eps/(8 n^2)`` per op (their
    perturbation moves the inverse by at most ``2 m n`` times that), the
    inverse at ``eps/2``, the final product at ``eps/(2m+2)`` per op.
    """
    eps = validate_eps(eps)
    cls = classify_vertices(g, t, p)
    out_prec = precision_bits(eps)
    if not cls.generic:
        return merge_result(g, cls, {}, eps, "recinvert", out_prec)
    n = g.n
    A = build_transition(g, t, p, precision_bits(eps / (8 * n * n)), exclude=cls.undefined)
    system = build_escape_system(A, cls)
    m = system.m
    Z = rec_invert(system.rddl(), eps / 2).Z
    prec = precision_bits(eps / (2 * m + 2))
    probs = dense.matvec(Z, system.col_t, prec)
    return merge_result(g, cls, dict(zip(system.vertices, probs)), eps, "recinvert", prec)

"""Random-walk transition matrices and the reduced system both solvers consume.

Signs are structural: the off-diagonal block of ``I - A`` and the excess
vector are nonpositive, so they are stored as magnitudes and the sign is
implied by the field.  No subtraction is ever performed.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .errors import ZeroOutDegree
from .graphio import GENERIC, ONE, UNDEFINED, ZERO, Classification, Graph, check_query
from .mpfloat import MPFloat, as_fraction, mp_div, mp_sum


@dataclass(frozen=True)
class TransitionMatrix:
    """Dense ``A`` with ``A[i][j] = w(i, j) / sum_k w(i, k)``.

    Rows of ``t``, ``p`` and every vertex in ``excluded`` are exact zeros.
    """

    n: int
    rows: list
    t: int
    p: int
    excluded: frozenset = frozenset()

    def to_fractions(self):
        return [[x.as_fraction() for x in row] for row in self.rows]


def build_transition(g: Graph, t: int, p: int, prec: int,
                     exclude: Sequence[int] = ()) -> TransitionMatrix:
    check_query(g, t, p)
    excluded = frozenset(exclude)
    zero = MPFloat.zero(prec)
    rows = []
    for u in range(g.n):
        row = [zero] * g.n
        if u != t and u != p and u not in excluded:
            nbrs = [(v, w) for v, w in g.adjacency[u].items() if w.sign > 0]
            if not nbrs:
                raise ZeroOutDegree(f"vertex {u} has no positive out-weight")
            total = mp_sum((w for _, w in nbrs), prec)
            for v, w in nbrs:
                row[v] = mp_div(w, total, prec)
        rows.append(row)
    return TransitionMatrix(g.n, rows, t, p, excluded)


@dataclass(frozen=True)
class RDDLSystem:
    """``N`` given by nonpositive off-diagonals and a nonpositive excess vector.

    ``offdiag[i][j]`` holds ``|N_ij|`` (diagonal slots are ignored) and
    ``excess[i]`` holds ``|v_i|``.  The diagonal is never stored; it is
    ``N_ii = |v_i| + sum_{j != i} |N_ij|``.
    """

    offdiag: list
    excess: list

    @property
    def m(self) -> int:
        return len(self.excess)

    def implied_matrix(self):
        """Exact rational ``N`` including the reconstructed diagonal."""
        m = self.m
        mags = [[x.as_fraction() for x in row] for row in self.offdiag]
        ex = [x.as_fraction() for x in self.excess]
        out = []
        for i in range(m):
            row = [-mags[i][j] if j != i else Fraction(0) for j in range(m)]
            row[i] = ex[i] + sum(mags[i][j] for j in range(m) if j != i)
            out.append(row)
        return out


@dataclass(frozen=True)
class EscapeSystem:
    """``M = (I - A)`` restricted to the generic vertices, with its excess.

    ``vertices[i]`` is the graph vertex of row ``i``.  ``col_t`` / ``col_p``
    hold the one-step probability of being absorbed on the t side / p side
    (t or p itself, or a vertex whose outcome is already forced).
    ``excess`` holds all probability mass leaving the generic set.
    """

    vertices: tuple
    offdiag: list
    excess: list
    col_t: list
    col_p: list

    @property
    def m(self) -> int:
        return len(self.vertices)

    def rddl(self) -> RDDLSystem:
        return RDDLSystem(self.offdiag, self.excess)


def build_escape_system(A: TransitionMatrix,
                        classification: Optional[Classification] = None) -> EscapeSystem:
    """Split ``I - A`` into the generic block plus absorbing columns.

    Without a classification every vertex except t and p (and the
    excluded rows of ``A``) is treated as generic.
    """
    t, p = A.t, A.p
    if classification is None:
        generic = [v for v in range(A.n) if v not in (t, p) and v not in A.excluded]
        t_side, p_side = {t}, {p}
    else:
        generic = sorted(classification.generic)
        t_side = {t} | set(classification.forced_one)
        p_side = {p} | set(classification.forced_zero)
    index = {v: i for i, v in enumerate(generic)}
    prec = max((x.precision for row in A.rows for x in row), default=64)
    zero = MPFloat.zero(prec)
    offdiag, excess, col_t, col_p = [], [], [], []
    for v in generic:
        row = A.rows[v]
        off = [zero] * len(generic)
        for u, a in enumerate(row):
            if u != v and u in index:
                off[index[u]] = a
        offdiag.append(off)
        excess.append(mp_sum((row[u] for u in range(A.n) if u not in index), prec))
        col_t.append(mp_sum((row[u] for u in sorted(t_side)), prec))
        col_p.append(mp_sum((row[u] for u in sorted(p_side)), prec))
    return EscapeSystem(tuple(generic), offdiag, excess, col_t, col_p)


@dataclass(frozen=True)
class EscapeResult:
    """Per-vertex P(s, t, p) with a tag saying how it was obtained.

    Tags are ``generic`` (computed to within a factor ``exp(eps)``),
    ``one`` / ``zero`` (exact, from reachability) and ``undefined``
    (probability ``None``).
    """

    t: int
    p: int
    tags: tuple
    probabilities: tuple
    eps: Fraction
    method: str

    def __len__(self):
        return len(self.tags)

    def probability(self, v: int) -> Optional[MPFloat]:
        return self.probabilities[v]

    def as_fractions(self):
        return [x.as_fraction() if x is not None else None for x in self.probabilities]


def merge_result(g: Graph, cls: Classification, generic_values: dict, eps: Fraction,
                 method: str, prec: int) -> EscapeResult:
    one, zero = MPFloat.one(prec), MPFloat.zero(prec)
    tags, probs = [], []
    for v in range(g.n):
        tag = cls.tag(v)
        tags.append(tag)
        if tag == ONE:
            probs.append(one)
        elif tag == ZERO:
            probs.append(zero)
        elif tag == UNDEFINED:
            probs.append(None)
        else:
            assert tag == GENERIC
            probs.append(generic_values[v])
    return EscapeResult(cls.t, cls.p, tuple(tags), tuple(probs), eps, method)


def validate_eps(eps) -> Fraction:
    e = as_fraction(eps)
    if not 0 < e < 1:
        raise ValueError(f"eps must lie in (0, 1), got {eps!r}")
    return e


__all__ = [
    "TransitionMatrix",
    "RDDLSystem",
    "EscapeSystem",
    "EscapeResult",
    "build_transition",
    "build_escape_system",
    "merge_result",
    "validate_eps",
    "check_query",
]

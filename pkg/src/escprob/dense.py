"""Dense kernels over nonnegative MPFloat matrices (lists of rows).

Every entry is accumulated left to right in index order, so results are
bit-identical run to run.  All operands are nonnegative, so every add is
same-sign.
"""

from __future__ import annotations

from .mpfloat import MPFloat, mp_add, mp_mul


def zeros(rows: int, cols: int, prec: int):
    z = MPFloat.zero(prec)
    return [[z] * cols for _ in range(rows)]


def identity(n: int, prec: int):
    out = zeros(n, n, prec)
    one = MPFloat.one(prec)
    for i in range(n):
        out[i][i] = one
    return out


def dot(xs, ys, prec: int) -> MPFloat:
    if not xs:
        return MPFloat.zero(prec)
    acc = mp_mul(xs[0], ys[0], prec)
    for k in range(1, len(xs)):
        acc = mp_add(acc, mp_mul(xs[k], ys[k], prec), prec)
    return acc


def matmul(a, b, prec: int):
    """``a @ b`` for an (r x k) and a (k x c) matrix."""
    if not a:
        return []
    inner = len(b)
    cols = list(zip(*b)) if inner else []
    ncols = len(b[0]) if inner else 0
    mul, add = mp_mul, mp_add
    if not inner:
        return zeros(len(a), ncols, prec)
    out = []
    for row in a:
        new = []
        for j in range(ncols):
            col = cols[j]
            acc = mul(row[0], col[0], prec)
            for k in range(1, inner):
                acc = add(acc, mul(row[k], col[k], prec), prec)
            new.append(acc)
        out.append(new)
    return out


def matvec(a, x, prec: int):
    return [dot(row, x, prec) for row in a]


def add_matrices(a, b, prec: int):
    return [[mp_add(x, y, prec) for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def add_identity(a, prec: int):
    one = MPFloat.one(prec)
    out = [list(row) for row in a]
    for i in range(len(out)):
        out[i][i] = mp_add(out[i][i], one, prec)
    return out


def to_fractions(a):
    return [[x.as_fraction() for x in row] for row in a]


def vector_to_fractions(xs):
    return [x.as_fraction() if x is not None else None for x in xs]


def is_nonnegative(a) -> bool:
    return all(x.sign >= 0 for row in a for x in row)


__all__ = [
    "zeros", "identity", "dot", "matmul", "matvec", "add_matrices",
    "add_identity", "to_fractions", "vector_to_fractions", "is_nonnegative",
]

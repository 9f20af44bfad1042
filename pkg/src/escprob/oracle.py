"""Exact ground truth at desk scale.

Rational linear algebra by fraction-free (Bareiss) elimination, arborescence
enumeration for the matrix-tree identities, and a seeded Monte-Carlo walk.
Nothing here touches MPFloat arithmetic; MPFloat inputs are read through
their exact rational values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import List, Optional, Sequence

from .errors import SingularError
from .graphio import Graph, check_query
from .mpfloat import as_fraction

RationalMatrix = List[List[Fraction]]

MAX_TREE_VERTICES = 12


def _frac_matrix(M) -> RationalMatrix:
    return [[as_fraction(x) for x in row] for row in M]


def identity(n: int) -> RationalMatrix:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def matmul(A: RationalMatrix, B: RationalMatrix) -> RationalMatrix:
    cols = list(zip(*B))
    return [[sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in cols] for row in A]


def _integer_rows(M: RationalMatrix):
    """Scale each row to integers; returns (rows, scales) with rows[i] = scales[i] * M[i]."""
    rows, scales = [], []
    for row in M:
        s = reduce(math.lcm, (x.denominator for x in row), 1)
        rows.append([x.numerator * (s // x.denominator) for x in row])
        scales.append(s)
    return rows, scales


def _bareiss(a: List[List[int]], n: int) -> int:
    """Fraction-free forward elimination of the first n columns, in place.

    Returns the determinant of the leading n x n block (0 if singular).
    Rows are swapped in place; the caller's augmented columns follow along.
    """
    sign, prev = 1, 1
    width = len(a[0]) if a else 0
    for k in range(n):
        piv = next((i for i in range(k, n) if a[i][k] != 0), None)
        if piv is None:
            return 0
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            sign = -sign
        akk = a[k][k]
        rowk = a[k]
        for i in range(k + 1, n):
            rowi = a[i]
            aik = rowi[k]
            for j in range(k + 1, width):
                rowi[j] = (rowi[j] * akk - aik * rowk[j]) // prev
            rowi[k] = 0
        prev = akk
    return sign * a[n - 1][n - 1] if n else 1


def det_rational(M) -> Fraction:
    """Exact determinant."""
    M = _frac_matrix(M)
    n = len(M)
    if n == 0:
        return Fraction(1)
    rows, scales = _integer_rows(M)
    d = _bareiss(rows, n)
    return Fraction(d, reduce(lambda x, y: x * y, scales, 1))


def exact_solve(M, rhs) -> RationalMatrix:
    """Solve ``M X = rhs`` exactly; ``rhs`` is a list of rows (n x r)."""
    M = _frac_matrix(M)
    R = _frac_matrix(rhs)
    n = len(M)
    r = len(R[0]) if R else 0
    aug = [list(M[i]) + list(R[i]) for i in range(n)]
    rows, _ = _integer_rows(aug)
    if _bareiss(rows, n) == 0:
        raise SingularError("matrix is singular")
    X = [[Fraction(0)] * r for _ in range(n)]
    for c in range(r):
        for i in range(n - 1, -1, -1):
            acc = Fraction(rows[i][n + c])
            for j in range(i + 1, n):
                if rows[i][j]:
                    acc -= rows[i][j] * X[j][c]
            X[i][c] = acc / rows[i][i]
    return X


def exact_inverse(M) -> RationalMatrix:
    return exact_solve(M, identity(len(M)))


def rddl_matrix(offdiag, excess) -> RationalMatrix:
    """N from off-diagonal magnitudes and excess magnitudes (diagonal rebuilt)."""
    m = len(excess)
    a = _frac_matrix(offdiag)
    e = [as_fraction(x) for x in excess]
    N = []
    for i in range(m):
        row = [-a[i][j] if j != i else Fraction(0) for j in range(m)]
        row[i] = e[i] + sum((a[i][j] for j in range(m) if j != i), Fraction(0))
        N.append(row)
    return N


# --- walks on graphs -------------------------------------------------------


def exact_transition(g: Graph, t: int, p: int) -> RationalMatrix:
    """Rational twin of the transition matrix; rows t, p and dead ends are zero."""
    check_query(g, t, p)
    A = [[Fraction(0)] * g.n for _ in range(g.n)]
    for u in range(g.n):
        if u in (t, p):
            continue
        ws = {v: w.as_fraction() for v, w in g.adjacency[u].items() if w.sign > 0}
        total = sum(ws.values(), Fraction(0))
        for v, w in ws.items():
            A[u][v] = w / total
    return A


def exact_escape(g: Graph, t: int, p: int) -> List[Optional[Fraction]]:
    """Exact P(s, t, p) for every s; ``None`` where no walk can reach t or p.

    Solves ``(I - A)_RR x = A_Rt`` on the vertices R that reach t or p.
    """
    A = exact_transition(g, t, p)
    n = g.n
    rev = [[] for _ in range(n)]
    for u in range(n):
        for v in range(n):
            if A[u][v]:
                rev[v].append(u)
    reach = {t, p}
    stack = [t, p]
    while stack:
        v = stack.pop()
        for u in rev[v]:
            if u not in reach:
                reach.add(u)
                stack.append(u)
    R = [v for v in range(n) if v in reach and v not in (t, p)]
    out: List[Optional[Fraction]] = [None] * n
    out[t], out[p] = Fraction(1), Fraction(0)
    if R:
        M = [[(Fraction(1) if i == j else Fraction(0)) - A[i][j] for j in R] for i in R]
        x = exact_solve(M, [[A[i][t]] for i in R])
        for k, v in enumerate(R):
            out[v] = x[k][0]
    return out


def matrix_power(A, k: int) -> RationalMatrix:
    """Exact ``A**k`` via integer repeated squaring over a common denominator."""
    A = _frac_matrix(A)
    n = len(A)
    D = reduce(math.lcm, (x.denominator for row in A for x in row), 1)
    B = [[x.numerator * (D // x.denominator) for x in row] for row in A]
    result = [[int(i == j) for j in range(n)] for i in range(n)]
    base, e = B, k
    while e:
        if e & 1:
            result = _int_matmul(result, base)
        e >>= 1
        if e:
            base = _int_matmul(base, base)
    Dk = D**k
    return [[Fraction(x, Dk) for x in row] for row in result]


def _int_matmul(A, B):
    cols = list(zip(*B))
    return [[sum(x * y for x, y in zip(row, col)) for col in cols] for row in A]


# --- matrix-tree machinery -------------------------------------------------


def dummy_augmented(M) -> RationalMatrix:
    """Weighted digraph of an RDDL matrix plus a sink vertex (index n).

    ``W[i][j] = -M_ij`` off the diagonal and ``W[i][n]`` is row i's sum.
    """
    M = _frac_matrix(M)
    n = len(M)
    W = [[Fraction(0)] * (n + 1) for _ in range(n + 1)]
    for i in range(n):
        for j in range(n):
            if i != j:
                W[i][j] = -M[i][j]
        W[i][n] = sum(M[i], Fraction(0))
    return W


def spanning_tree_sum(W, root: int) -> Fraction:
    """Sum over arborescences oriented toward ``root`` of the product of edge weights.

    ``W[u][v]`` is the weight of edge u -> v; diagonal entries are ignored.
    Every non-root vertex picks one out-edge; choices closing a cycle are
    pruned.  Exponential, limited to 12 vertices.
    """
    W = _frac_matrix(W)
    n = len(W)
    if n > MAX_TREE_VERTICES:
        raise ValueError(f"enumeration limited to {MAX_TREE_VERTICES} vertices")
    if any(W[u][v] < 0 for u in range(n) for v in range(n) if u != v):
        raise ValueError("edge weights must be nonnegative")
    D = reduce(math.lcm, (x.denominator for row in W for x in row), 1)
    Wi = [[x.numerator * (D // x.denominator) for x in row] for row in W]
    others = [v for v in range(n) if v != root]
    choices = {v: [(u, Wi[v][u]) for u in range(n) if u != v and Wi[v][u] > 0] for v in others}
    parent = [None] * n
    parent[root] = root

    def closes_cycle(v, u):
        while u is not None and u != root:
            if u == v:
                return True
            u = parent[u]
        return False

    def assign(idx):
        if idx == len(others):
            return 1
        v = others[idx]
        total = 0
        for u, w in choices[v]:
            if closes_cycle(v, u):
                continue
            parent[v] = u
            total += w * assign(idx + 1)
            parent[v] = None
        return total

    return Fraction(assign(0), D ** len(others))


def _tree_sum_of_rddl(M) -> Fraction:
    n = len(M)
    return spanning_tree_sum(dummy_augmented(M), n)


def tree_surgery(M, i: int, j: int) -> RationalMatrix:
    """RDDL matrix whose determinant equals ``det(M with column i replaced by e_j)``.

    For ``i == j`` this is the principal submatrix without i.  Otherwise row
    j and column i are deleted, row i is paired with column j, and the
    column at row i's position is replaced by minus the sum of all columns,
    which keeps the matrix RDDL.  Rows are permuted with the sign tracked so
    the determinant identity is exact.
    """
    M = _frac_matrix(M)
    n = len(M)
    if i == j:
        keep = [k for k in range(n) if k != i]
        return [[M[r][c] for c in keep] for r in keep]
    rows = [k for k in range(n) if k != j]
    cols = [k if k != i else j for k in rows]
    B = [[M[r][c] for c in cols] for r in rows]
    pos = rows.index(i)
    for r in range(n - 1):
        B[r][pos] = -sum(B[r], Fraction(0))
    # sign bookkeeping: minor(j, i) has rows `rows`, columns sorted(k != i);
    # B's columns are that ordering with j moved to i's slot, then negated.
    natural = [k for k in range(n) if k != i]
    perm = [natural.index(c) for c in cols]
    sign = _perm_sign(perm) * (-1) * (-1) ** (i + j)
    if sign < 0:
        raise AssertionError("column surgery changed the determinant's sign")
    return B


def _perm_sign(perm) -> int:
    sign, seen = 1, [False] * len(perm)
    for s in range(len(perm)):
        if seen[s]:
            continue
        length, k = 0, s
        while not seen[k]:
            seen[k] = True
            k = perm[k]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def surgery_case(i: int, j: int) -> int:
    return 1 if i == j else (2 if i > j else 3)


def inverse_entry_as_tree_ratio(M, i: int, j: int):
    """(tree sum of the surgery matrix, tree sum of M); their ratio is inv(M)[i][j].

    Raises SingularError if M is singular and AssertionError if the ratio
    disagrees with the eliminated inverse.
    """
    M = _frac_matrix(M)
    n = len(M)
    if n > 6:
        raise ValueError("tree-ratio check is limited to n <= 6")
    den = _tree_sum_of_rddl(M)
    if den == 0:
        raise SingularError("no arborescence toward the dummy vertex")
    B = tree_surgery(M, i, j)
    num = _tree_sum_of_rddl(B) if B else Fraction(1)
    expected = exact_inverse(M)[i][j]
    if num / den != expected:
        raise AssertionError(f"tree ratio {num}/{den} != inverse entry {expected}")
    return num, den


# --- Monte Carlo -----------------------------------------------------------

_MASK64 = (1 << 64) - 1


class SplitMix64:
    """SplitMix64: state += 0x9e3779b97f4a7c15, then a two-round xor-multiply finalizer."""

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def random(self) -> float:
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))


@dataclass(frozen=True)
class SimulationResult:
    """Per-vertex frequency of reaching t first, over ``trials`` walks each."""

    trials: int
    hits_t: tuple
    hits_p: tuple
    capped: tuple

    def estimate(self, v: int) -> Optional[Fraction]:
        done = self.hits_t[v] + self.hits_p[v]
        return Fraction(self.hits_t[v], done) if done else None

    def stderr(self, v: int) -> Optional[float]:
        done = self.hits_t[v] + self.hits_p[v]
        if not done:
            return None
        q = self.hits_t[v] / done
        return math.sqrt(q * (1 - q) / done)


def simulate_escape(g: Graph, t: int, p: int, trials: int, seed: int,
                    max_steps: int = 10**6, starts: Optional[Sequence[int]] = None) -> SimulationResult:
    """Run ``trials`` walks from every start vertex; walks longer than ``max_steps`` are capped.

    Each start vertex uses its own SplitMix64 stream seeded from ``(seed, v)``.
    """
    check_query(g, t, p)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    nbrs, cum = [], []
    for u in range(g.n):
        ws = [(v, float(w)) for v, w in g.adjacency[u].items() if w.sign > 0]
        total = sum(w for _, w in ws)
        acc, c = 0.0, []
        for _, w in ws:
            acc += w / total
            c.append(acc)
        nbrs.append([v for v, _ in ws])
        cum.append(c)
    hits_t = [0] * g.n
    hits_p = [0] * g.n
    capped = [0] * g.n
    for s in (range(g.n) if starts is None else starts):
        rng = SplitMix64(SplitMix64(seed ^ (s * 0x9E3779B97F4A7C15)).next_u64())
        for _ in range(trials):
            v = s
            for _step in range(max_steps):
                if v == t or v == p or not nbrs[v]:
                    break
                r = rng.random()
                c = cum[v]
                k = 0
                while k < len(c) - 1 and r >= c[k]:
                    k += 1
                v = nbrs[v][k]
            if v == t:
                hits_t[s] += 1
            elif v == p:
                hits_p[s] += 1
            else:
                capped[s] += 1
    return SimulationResult(trials, tuple(hits_t), tuple(hits_p), tuple(capped))

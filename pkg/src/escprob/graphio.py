"""Weighted graphs, the edge-list file format and reachability classification."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import GraphFormatError, InvalidQuery
from .mpfloat import MPFloat, MPParseError, as_fraction, mp_from_fraction

DEFAULT_PRECISION = 64

GENERIC = "generic"
ONE = "one"
ZERO = "zero"
UNDEFINED = "undefined"


@dataclass(frozen=True)
class Graph:
    """Directed weighted graph on vertices ``0..n-1``.

    ``adjacency[u]`` maps each out-neighbour to the total (parallel edges
    summed) weight.  Undirected graphs store both directions; a self-loop is
    stored once.  ``edges`` keeps the edges as given.
    """

    n: int
    directed: bool
    edges: tuple
    adjacency: tuple

    @classmethod
    def from_edges(cls, n: int, edges: Iterable, directed: bool = False,
                   precision: int = DEFAULT_PRECISION) -> "Graph":
        if n < 1:
            raise ValueError("a graph needs at least one vertex")
        totals = [dict() for _ in range(n)]
        kept = []
        for u, v, w in edges:
            for x in (u, v):
                if not (isinstance(x, int) and 0 <= x < n):
                    raise InvalidQuery(f"vertex id {x!r} outside [0, {n})")
            wf = as_fraction(w)
            if wf < 0:
                raise ValueError(f"negative weight on edge ({u}, {v})")
            kept.append((u, v, w if isinstance(w, MPFloat) else mp_from_fraction(wf, precision)))
            pairs = [(u, v)] if directed or u == v else [(u, v), (v, u)]
            for a, b in pairs:
                totals[a][b] = totals[a].get(b, Fraction(0)) + wf
        adjacency = tuple(
            {v: mp_from_fraction(w, precision) for v, w in sorted(row.items())}
            for row in totals
        )
        return cls(n, directed, tuple(kept), adjacency)

    def out_neighbors(self, u: int):
        """Out-neighbours of ``u`` along strictly positive weight."""
        return [v for v, w in self.adjacency[u].items() if w.sign > 0]

    def edge_count(self) -> int:
        """Number of positive-weight edges, each unordered pair once when undirected."""
        seen = set()
        for u in range(self.n):
            for v in self.out_neighbors(u):
                seen.add((u, v) if self.directed else (min(u, v), max(u, v)))
        return len(seen)

    def reversed_positive(self):
        rev = [[] for _ in range(self.n)]
        for u in range(self.n):
            for v in self.out_neighbors(u):
                rev[v].append(u)
        return rev


def parse_graph(text: str, precision: int = DEFAULT_PRECISION) -> Graph:
    """Parse ``directed <n>`` / ``undirected <n>`` followed by ``u v w`` lines.

    ``#`` starts a comment.  Weights are decimal or scientific literals,
    rounded to ``precision`` bits after parallel edges are summed exactly.
    """
    header = None
    edges = []
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.split("#", 1)[0]
        tokens = _tokens(line)
        if not tokens:
            continue
        if header is None:
            if len(tokens) != 2 or tokens[0][1] not in ("directed", "undirected"):
                raise GraphFormatError("expected 'directed <n>' or 'undirected <n>'", lineno, 1)
            col, word = tokens[1]
            if not word.isdigit() or int(word) < 1:
                raise GraphFormatError(f"bad vertex count {word!r}", lineno, col)
            header = (tokens[0][1] == "directed", int(word))
            continue
        directed, n = header
        if len(tokens) != 3:
            raise GraphFormatError(f"expected 'u v w', got {len(tokens)} fields", lineno, tokens[0][0])
        ids = []
        for col, word in tokens[:2]:
            if not word.isdigit() or int(word) >= n:
                raise GraphFormatError(f"bad vertex id {word!r} (n={n})", lineno, col)
            ids.append(int(word))
        col, word = tokens[2]
        try:
            w = as_fraction(word)
        except MPParseError:
            raise GraphFormatError(f"malformed weight {word!r}", lineno, col) from None
        if w < 0:
            raise GraphFormatError(f"negative weight {word!r}", lineno, col)
        edges.append((ids[0], ids[1], w))
    if header is None:
        raise GraphFormatError("empty graph file", 1, 1)
    directed, n = header
    return Graph.from_edges(n, edges, directed=directed, precision=precision)


def _tokens(line: str):
    """(1-based column, token) pairs."""
    out = []
    i = 0
    while i < len(line):
        if line[i].isspace():
            i += 1
            continue
        j = i
        while j < len(line) and not line[j].isspace():
            j += 1
        out.append((i + 1, line[i:j]))
        i = j
    return out


def format_graph(g: Graph) -> str:
    lines = [f"{'directed' if g.directed else 'undirected'} {g.n}"]
    for u, v, w in g.edges:
        lines.append(f"{u} {v} {_exact_decimal(w.as_fraction())}")
    return "\n".join(lines) + "\n"


def _exact_decimal(x: Fraction) -> str:
    """Finite decimal expansion of a dyadic rational."""
    k = x.denominator.bit_length() - 1
    if x.denominator != 1 << k:
        raise ValueError("not a dyadic rational")
    if k == 0:
        return str(x.numerator)
    digits = str(abs(x.numerator) * 5**k).rjust(k + 1, "0")
    sign = "-" if x < 0 else ""
    return f"{sign}{digits[:-k]}.{digits[-k:]}"


@dataclass(frozen=True)
class Classification:
    """Partition of ``V \\ {t, p}`` by what reachability alone says about P(s, t, p)."""

    t: int
    p: int
    forced_one: frozenset
    forced_zero: frozenset
    undefined: frozenset
    generic: frozenset

    def tag(self, v: int) -> str:
        if v == self.t or v in self.forced_one:
            return ONE
        if v == self.p or v in self.forced_zero:
            return ZERO
        if v in self.undefined:
            return UNDEFINED
        return GENERIC


def check_query(g: Graph, t: int, p: int):
    for name, x in (("t", t), ("p", p)):
        if not (isinstance(x, int) and 0 <= x < g.n):
            raise InvalidQuery(f"{name}={x!r} is not a vertex of a graph with n={g.n}")
    if t == p:
        raise InvalidQuery("t and p must differ")


def _backward(rev, sources: Sequence[int], blocked: set) -> set:
    """Vertices with a positive path into ``sources`` that avoids ``blocked``."""
    seen = set(sources)
    queue = deque(sources)
    while queue:
        v = queue.popleft()
        for u in rev[v]:
            if u not in seen and u not in blocked:
                seen.add(u)
                queue.append(u)
    return seen


def classify_vertices(g: Graph, t: int, p: int) -> Classification:
    """Three backward searches over positive-weight edges.

    ``reach_t``: vertices reaching t while avoiding p; ``reach_p`` likewise.
    A vertex in exactly one of them is forced unless, on a directed graph, it
    can wander into a vertex that reaches neither (then the walk may never
    be absorbed and the vertex is left to the solvers).
    """
    check_query(g, t, p)
    rev = g.reversed_positive()
    reach_t = _backward(rev, [t], {p}) - {t}
    reach_p = _backward(rev, [p], {t}) - {p}
    rest = set(range(g.n)) - {t, p}
    undefined = rest - reach_t - reach_p
    leaky = _backward(rev, sorted(undefined), {t, p}) if undefined else set()
    forced_one = (reach_t - reach_p) - leaky
    forced_zero = (reach_p - reach_t) - leaky
    generic = rest - undefined - forced_one - forced_zero
    return Classification(t, p, frozenset(forced_one), frozenset(forced_zero),
                          frozenset(undefined), frozenset(generic))


def hub_path_graph(n: int) -> Graph:
    """Path ``0 - 1 - ... - (n-2)`` plus hub ``n-1`` joined to every path vertex.

    With s = 0, t = n - 2 and p = n - 1 the escape probability is below
    ``2 * (2/3)**(n-3)``.
    """
    if n < 4:
        raise ValueError("hub_path_graph needs n >= 4")
    hub = n - 1
    edges = [(i, i + 1, 1) for i in range(n - 2)]
    edges += [(i, hub, 1) for i in range(n - 1)]
    return Graph.from_edges(n, edges, directed=False)


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1, 1) for i in range(n - 1)], directed=False)

"""Escape probabilities of random walks to entry-wise multiplicative accuracy.

Two solvers share one sign-disciplined floating-point layer:

* ``escape_via_recinvert``: recursive Schur-complement inversion of the
  walk system carried with an excess vector.
* ``escape_via_powerseries``: truncated series ``I + A + A^2 + ...``
  by repeated squaring, for undirected graphs with bounded hitting time.

``escprob.oracle`` holds the exact rational and tree-enumeration checks.
"""

from .errors import (
    EscapeError,
    GraphFormatError,
    InvalidQuery,
    SingularError,
    UnsupportedForBound,
    ZeroOutDegree,
)
from .graphio import Graph, classify_vertices, hub_path_graph, parse_graph, path_graph
from .mpfloat import MPFloat, mp_add, mp_div, mp_from_decimal, mp_from_fraction, mp_mul, precision_bits
from .powerseries import escape_via_powerseries
from .recinvert import escape_via_recinvert, precision_schedule, rec_invert
from .walkmatrix import EscapeResult, RDDLSystem, build_escape_system, build_transition

__version__ = "0.1.0"

__all__ = [
    "EscapeError",
    "EscapeResult",
    "Graph",
    "GraphFormatError",
    "InvalidQuery",
    "MPFloat",
    "RDDLSystem",
    "SingularError",
    "UnsupportedForBound",
    "ZeroOutDegree",
    "build_escape_system",
    "build_transition",
    "classify_vertices",
    "escape_via_powerseries",
    "escape_via_recinvert",
    "hub_path_graph",
    "mp_add",
    "mp_div",
    "mp_from_decimal",
    "mp_from_fraction",
    "mp_mul",
    "parse_graph",
    "path_graph",
    "precision_bits",
    "precision_schedule",
    "rec_invert",
]

"""Command-line front end.

    escprob --graph FILE --t ID --p ID --eps E --method recinvert
    escprob --bench 16,32,64 --method recinvert --eps 1e-6

Exit codes: 0 success, 2 singular system, 3 bad input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional

from .errors import EscapeError, GraphFormatError, InvalidQuery, SingularError, UnsupportedForBound
from .graphio import Graph, classify_vertices, hub_path_graph, parse_graph, path_graph
from .mpfloat import (
    MPParseError,
    as_fraction,
    count_ops,
    format_decimal,
    mp_from_fraction,
    precision_bits,
)
from .oracle import exact_escape, simulate_escape
from .powerseries import escape_via_powerseries
from .recinvert import escape_via_recinvert, precision_schedule

EXIT_OK, EXIT_SINGULAR, EXIT_INPUT = 0, 2, 3
METHODS = ("recinvert", "powerseries", "oracle", "simulate")
THREADS_ENV = "ESC_PROB_THREADS"


class InputError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    graph_path: Optional[str]
    t: int
    p: int
    eps: Fraction
    method: str = "recinvert"
    h_override: Optional[int] = None
    trials: int = 10000
    seed: int = 0
    output_format: str = "tsv"

    def __post_init__(self):
        if not 0 < self.eps < 1:
            raise InputError("--eps must lie in (0, 1)")
        if self.t == self.p:
            raise InputError("--t and --p must differ")
        if self.method not in METHODS:
            raise InputError(f"unknown method {self.method!r}")
        if self.output_format not in ("tsv", "jsonl"):
            raise InputError(f"unknown format {self.output_format!r}")


def significant_digits(eps: Fraction) -> int:
    """ceil(-log10 eps) + 2."""
    k = 0
    while Fraction(10) ** k * eps < 1:
        k += 1
    return k + 2


def _rows(g: Graph, cfg: RunConfig):
    """(vertex, tag, exact-or-MPFloat value or None, extra json fields) per vertex."""
    if cfg.method == "recinvert":
        res = escape_via_recinvert(g, cfg.t, cfg.p, cfg.eps)
        return [(v, res.tags[v], res.probabilities[v], {}) for v in range(g.n)]
    if cfg.method == "powerseries":
        res = escape_via_powerseries(g, cfg.t, cfg.p, cfg.eps, h_override=cfg.h_override)
        return [(v, res.tags[v], res.probabilities[v], {}) for v in range(g.n)]
    cls = classify_vertices(g, cfg.t, cfg.p)
    if cfg.method == "oracle":
        exact = exact_escape(g, cfg.t, cfg.p)
        return [(v, cls.tag(v), exact[v], {}) for v in range(g.n)]
    sim = simulate_escape(g, cfg.t, cfg.p, cfg.trials, cfg.seed)
    rows = []
    for v in range(g.n):
        est = sim.estimate(v)
        if v == cfg.t:
            est = Fraction(1)
        elif v == cfg.p:
            est = Fraction(0)
        extra = {"stderr": sim.stderr(v) if v not in (cfg.t, cfg.p) else 0.0,
                 "unabsorbed": sim.capped[v]}
        rows.append((v, cls.tag(v), est, extra))
    return rows


def render(g: Graph, cfg: RunConfig) -> List[str]:
    digits = significant_digits(cfg.eps)
    prec = precision_bits(cfg.eps)
    lines = []
    for v, tag, value, extra in _rows(g, cfg):
        if value is None:
            dec, hx = "-", "-"
        else:
            dec = format_decimal(as_fraction(value), digits)
            mp = value if hasattr(value, "to_hex") else mp_from_fraction(value, prec)
            hx = mp.to_hex()
        if cfg.output_format == "tsv":
            lines.append(f"{v}\t{tag}\t{dec}\t{hx}")
        else:
            rec = {"vertex": v, "tag": tag, "probability": None if value is None else dec,
                   "hex": None if value is None else hx, "method": cfg.method}
            rec.update(extra)
            lines.append(json.dumps(rec, sort_keys=True))
    return lines


def run(cfg: RunConfig, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        with open(cfg.graph_path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"error: cannot read graph: {exc}", file=err)
        return EXIT_INPUT
    try:
        g = parse_graph(text, precision=max(64, precision_bits(cfg.eps)))
        lines = render(g, cfg)
    except SingularError as exc:
        print(f"error: singular system: {exc}", file=err)
        return EXIT_SINGULAR
    except (GraphFormatError, InvalidQuery, UnsupportedForBound, MPParseError, ValueError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_INPUT
    except EscapeError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_INPUT
    for line in lines:
        print(line, file=out)
    return EXIT_OK


@dataclass(frozen=True)
class BenchRow:
    size: int
    adds: int
    muls: int
    divs: int
    bit_work: int
    max_bits: int
    predicted_bits: int
    seconds: float

    @property
    def ops(self) -> int:
        return self.adds + self.muls + self.divs


def bench_graph(size: int):
    """Graph whose escape system has exactly ``size`` generic vertices, with (t, p)."""
    if size < 1:
        raise ValueError("size must be >= 1")
    if size == 1:
        return path_graph(3), 0, 2
    n = size + 2
    return hub_path_graph(n), n - 2, n - 1


def bench(sizes, eps, method: str = "recinvert") -> List[BenchRow]:
    """Operation counts of one solve per size on the hub-path family."""
    if method not in ("recinvert", "powerseries"):
        raise InputError("bench supports recinvert and powerseries")
    eps = as_fraction(eps)
    solve = escape_via_recinvert if method == "recinvert" else escape_via_powerseries
    rows = []
    for size in sizes:
        g, t, p = bench_graph(size)
        start = time.perf_counter()
        with count_ops() as st:
            solve(g, t, p, eps)
        elapsed = time.perf_counter() - start
        predicted = precision_schedule(size, eps / 2).max_bits if method == "recinvert" else 0
        rows.append(BenchRow(size, st.adds, st.muls, st.divs, st.bit_work, st.max_bits,
                             predicted, elapsed))
    return rows


def format_bench(rows: List[BenchRow]) -> List[str]:
    out = ["size\tadds\tmuls\tdivs\tops\tratio\tbit_work\tmax_bits\tschedule_bits\tseconds"]
    prev = None
    for r in rows:
        ratio = f"{r.ops / prev.ops:.2f}" if prev else "-"
        out.append(f"{r.size}\t{r.adds}\t{r.muls}\t{r.divs}\t{r.ops}\t{ratio}\t{r.bit_work}"
                   f"\t{r.max_bits}\t{r.predicted_bits}\t{r.seconds:.3f}")
        prev = r
    return out


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="escprob", description="Escape probabilities of random walks, "
                 "accurate to a multiplicative factor exp(eps).")
    ap.add_argument("--graph", help="graph file (see README for the format)")
    ap.add_argument("--t", type=int, help="target vertex")
    ap.add_argument("--p", type=int, help="vertex to avoid")
    ap.add_argument("--eps", default="1e-6", help="multiplicative accuracy, in (0, 1)")
    ap.add_argument("--method", default="recinvert", choices=METHODS)
    ap.add_argument("--h-override", type=int, default=None,
                    help="hitting-time bound for powerseries (required for directed graphs)")
    ap.add_argument("--trials", type=int, default=10000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--format", dest="output_format", default="tsv", choices=("tsv", "jsonl"))
    ap.add_argument("--bench", metavar="SIZES",
                    help="comma-separated system sizes; print an operation-count table instead")
    return ap


def _threads() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return 1
    if not raw.isdigit() or int(raw) < 1:
        raise InputError(f"{THREADS_ENV} must be a positive integer")
    return int(raw)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        _threads()
        eps = as_fraction(args.eps)
        if args.bench:
            sizes = [int(s) for s in args.bench.split(",") if s.strip()]
            if not 0 < eps < 1:
                raise InputError("--eps must lie in (0, 1)")
            for line in format_bench(bench(sizes, eps, args.method)):
                print(line)
            return EXIT_OK
        if args.graph is None or args.t is None or args.p is None:
            raise InputError("--graph, --t and --p are required")
        cfg = RunConfig(args.graph, args.t, args.p, eps, args.method, args.h_override,
                        args.trials, args.seed, args.output_format)
    except (InputError, MPParseError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())

"""Binary floating point with unbounded exponent and a hard ban on mixed-sign addition.

Every operation rounds its exact result to nearest (ties to even) at a
caller-chosen significand width ``p``, so each result is within a factor
``exp(2**-(p-1))`` of the exact value.  Adding a positive number to a
negative one is never attempted: it raises :class:`SignDisciplineError`.
"""

from __future__ import annotations

import math
import re
from contextlib import contextmanager
from contextvars import ContextVar
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Optional, Union

__all__ = [
    "MPFloat",
    "PrecisionBudget",
    "OpStats",
    "SignDisciplineError",
    "DivisionByZero",
    "MPParseError",
    "precision_bits",
    "ceil_log2",
    "as_fraction",
    "mp_from_decimal",
    "mp_from_fraction",
    "mp_from_int",
    "mp_from_hex",
    "mp_add",
    "mp_mul",
    "mp_div",
    "mp_cmp",
    "mp_sum",
    "format_decimal",
    "count_ops",
    "set_sign_hook",
    "sign_hook",
]

MIN_PRECISION = 32
GUARD_BITS = 8

NEGATIVE, ZERO, POSITIVE = -1, 0, 1


class SignDisciplineError(ArithmeticError):
    """An addition would have combined a positive and a negative operand."""


class DivisionByZero(ZeroDivisionError):
    pass


class MPParseError(ValueError):
    pass


Number = Union["MPFloat", Fraction, int, str]


def as_fraction(x) -> Fraction:
    """Exact rational value of ``x`` (MPFloat, int, Fraction, float or decimal string)."""
    if isinstance(x, MPFloat):
        return x.as_fraction()
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        if not _DECIMAL_RE.match(x.strip()):
            raise MPParseError(f"not a decimal literal: {x!r}")
        return Fraction(x.strip())
    return Fraction(x)


def ceil_log2(x) -> int:
    """Smallest integer k with 2**k >= x, for rational x > 0."""
    x = as_fraction(x)
    if x <= 0:
        raise ValueError("ceil_log2 needs a positive argument")
    a, b = x.numerator, x.denominator

    def covers(k):  # 2**k >= a/b
        return (b << k) >= a if k >= 0 else b >= (a << -k)

    k = a.bit_length() - b.bit_length()
    while not covers(k):
        k += 1
    while covers(k - 1):
        k -= 1
    return k


def precision_bits(eps) -> int:
    """Significand width for a per-operation budget ``eps``: max(32, ceil(log2(1/eps)) + 8)."""
    eps = as_fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    return max(MIN_PRECISION, ceil_log2(1 / eps) + GUARD_BITS)


@dataclass(frozen=True)
class PrecisionBudget:
    """Target multiplicative log-error ``eps`` and the significand width it implies."""

    eps: Fraction

    def __post_init__(self):
        eps = as_fraction(self.eps)
        if eps <= 0:
            raise ValueError("eps must be positive")
        object.__setattr__(self, "eps", eps)

    @property
    def bits(self) -> int:
        return precision_bits(self.eps)


def _bits_of(prec) -> int:
    if isinstance(prec, PrecisionBudget):
        return prec.bits
    if not isinstance(prec, int) or prec < 1:
        raise ValueError(f"precision must be a positive integer, got {prec!r}")
    return prec


# --- instrumentation -------------------------------------------------------


@dataclass
class OpStats:
    adds: int = 0
    muls: int = 0
    divs: int = 0
    bit_work: int = 0
    max_bits: int = 0

    @property
    def total(self) -> int:
        return self.adds + self.muls + self.divs


_stats: ContextVar[Optional[OpStats]] = ContextVar("escprob_opstats", default=None)


@contextmanager
def count_ops():
    """Count MPFloat operations performed in this context."""
    stats = OpStats()
    token = _stats.set(stats)
    try:
        yield stats
    finally:
        _stats.reset(token)


_sign_hook: Optional[Callable[["MPFloat", "MPFloat"], None]] = None


def set_sign_hook(fn):
    """Install ``fn(a, b)``, called just before a mixed-sign add raises. Returns the old hook."""
    global _sign_hook
    old, _sign_hook = _sign_hook, fn
    return old


@contextmanager
def sign_hook(fn):
    old = set_sign_hook(fn)
    try:
        yield
    finally:
        set_sign_hook(old)


# --- the number type -------------------------------------------------------


class MPFloat:
    """``sign * significand * 2**(exponent - precision + 1)``.

    Nonzero values keep ``2**(precision-1) <= significand < 2**precision``;
    zero has sign 0, significand 0 and exponent 0.  Instances are treated as
    immutable.  There is deliberately no ``__sub__``.
    """

    __slots__ = ("sign", "significand", "exponent", "precision")

    def __init__(self, sign: int, significand: int, exponent: int, precision: int):
        if precision < 1:
            raise ValueError("precision must be >= 1")
        if sign == 0:
            if significand != 0:
                raise ValueError("zero must have a zero significand")
            exponent = 0
        elif sign not in (-1, 1):
            raise ValueError("sign must be -1, 0 or 1")
        elif significand.bit_length() != precision:
            raise ValueError("significand must have exactly `precision` bits")
        self.sign = sign
        self.significand = significand
        self.exponent = exponent
        self.precision = precision

    @classmethod
    def _make(cls, sign, significand, exponent, precision):
        self = object.__new__(cls)
        self.sign = sign
        self.significand = significand
        self.exponent = exponent
        self.precision = precision
        return self

    @classmethod
    def zero(cls, precision: int = MIN_PRECISION) -> "MPFloat":
        return cls._make(0, 0, 0, precision)

    @classmethod
    def one(cls, precision: int = MIN_PRECISION) -> "MPFloat":
        return cls._make(1, 1 << (precision - 1), 0, precision)

    @property
    def low_exponent(self) -> int:
        """Exponent of the significand's least significant bit."""
        return self.exponent - self.precision + 1

    def is_zero(self) -> bool:
        return self.sign == 0

    def as_fraction(self) -> Fraction:
        if self.sign == 0:
            return Fraction(0)
        low = self.exponent - self.precision + 1
        if low >= 0:
            return Fraction(self.sign * (self.significand << low))
        return Fraction(self.sign * self.significand, 1 << -low)

    def __float__(self) -> float:
        if self.sign == 0:
            return 0.0
        sig, low = self.significand, self.exponent - self.precision + 1
        extra = self.precision - 64
        if extra > 0:
            sig >>= extra
            low += extra
        try:
            return self.sign * math.ldexp(float(sig), low)
        except OverflowError:
            return self.sign * math.inf

    def with_precision(self, precision: int) -> "MPFloat":
        """Round to a different significand width."""
        if self.sign == 0:
            return MPFloat.zero(precision)
        return _round(self.sign, self.significand, self.low_exponent, precision)

    def __neg__(self) -> "MPFloat":
        return MPFloat._make(-self.sign, self.significand, self.exponent, self.precision)

    def __abs__(self) -> "MPFloat":
        return MPFloat._make(abs(self.sign), self.significand, self.exponent, self.precision)

    def __add__(self, other):
        if not isinstance(other, MPFloat):
            return NotImplemented
        return mp_add(self, other)

    def __mul__(self, other):
        if not isinstance(other, MPFloat):
            return NotImplemented
        return mp_mul(self, other)

    def __truediv__(self, other):
        if not isinstance(other, MPFloat):
            return NotImplemented
        return mp_div(self, other)

    def __eq__(self, other):
        if isinstance(other, MPFloat):
            return mp_cmp(self, other) == 0
        if isinstance(other, (int, Fraction)):
            return self.as_fraction() == other
        return NotImplemented

    def __lt__(self, other):
        return mp_cmp(self, other) < 0

    def __le__(self, other):
        return mp_cmp(self, other) <= 0

    def __gt__(self, other):
        return mp_cmp(self, other) > 0

    def __ge__(self, other):
        return mp_cmp(self, other) >= 0

    def __hash__(self):
        return hash(self.as_fraction())

    def __repr__(self):
        return f"MPFloat({self.to_hex()!r}, p={self.precision})"

    def to_hex(self) -> str:
        """Lossless ``±<hex significand>p<decimal exponent>``; the value is sig * 2**exp."""
        if self.sign == 0:
            return "0"
        s = "-" if self.sign < 0 else "+"
        return f"{s}{self.significand:x}p{self.low_exponent}"

    def to_decimal(self, digits: int = 17) -> str:
        return format_decimal(self.as_fraction(), digits)


def _round(sign: int, mag: int, low: int, prec: int) -> MPFloat:
    """Round ``sign * mag * 2**low`` (mag > 0) to ``prec`` bits, nearest-even.

    Callers that truncated the exact value must leave a sticky bit at least
    two positions below the rounding point.
    """
    n = mag.bit_length()
    if n > prec:
        s = n - prec
        q = mag >> s
        r = mag & ((1 << s) - 1)
        half = 1 << (s - 1)
        if r > half or (r == half and q & 1):
            q += 1
            if q >> prec:
                q >>= 1
                s += 1
        mag = q
        low += s
    elif n < prec:
        mag <<= prec - n
        low -= prec - n
    return MPFloat._make(sign, mag, low + prec - 1, prec)


# --- constructors ----------------------------------------------------------


def mp_from_fraction(x, prec) -> MPFloat:
    """Correctly rounded MPFloat nearest to the rational ``x``."""
    prec = _bits_of(prec)
    x = as_fraction(x)
    if x == 0:
        return MPFloat.zero(prec)
    sign = 1 if x > 0 else -1
    num, den = abs(x.numerator), x.denominator
    if den == 1:
        return _round(sign, num, 0, prec)
    k = max(0, prec + 2 + den.bit_length() - num.bit_length())
    q, r = divmod(num << k, den)
    return _round(sign, (q << 1) | (r != 0), -k - 1, prec)


def mp_from_int(n: int, prec) -> MPFloat:
    prec = _bits_of(prec)
    if n == 0:
        return MPFloat.zero(prec)
    return _round(1 if n > 0 else -1, abs(n), 0, prec)


_DECIMAL_RE = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")
_HEX_RE = re.compile(r"^([+-])([0-9a-fA-F]+)p([+-]?\d+)$")


def mp_from_decimal(text: str, prec) -> MPFloat:
    """Parse a signed decimal / scientific literal, correctly rounded to ``prec`` bits.

    ``prec`` is a bit count or a :class:`PrecisionBudget`.
    """
    t = text.strip()
    if not _DECIMAL_RE.match(t):
        raise MPParseError(f"malformed decimal literal: {text!r}")
    return mp_from_fraction(Fraction(t), prec)


def mp_from_hex(text: str, prec: Optional[int] = None) -> MPFloat:
    """Inverse of :meth:`MPFloat.to_hex`.  Precision defaults to the significand's width."""
    t = text.strip()
    if t in ("0", "+0", "-0"):
        return MPFloat.zero(prec or MIN_PRECISION)
    m = _HEX_RE.match(t)
    if not m:
        raise MPParseError(f"malformed hex literal: {text!r}")
    sig = int(m.group(2), 16)
    if sig == 0:
        return MPFloat.zero(prec or MIN_PRECISION)
    sign = -1 if m.group(1) == "-" else 1
    return _round(sign, sig, int(m.group(3)), prec or sig.bit_length())


# --- arithmetic ------------------------------------------------------------


def mp_add(a: MPFloat, b: MPFloat, prec: Optional[int] = None) -> MPFloat:
    """Rounded sum of two operands of the same sign (either may be zero)."""
    if prec is None:
        prec = a.precision if a.precision >= b.precision else b.precision
    st = _stats.get()
    if st is not None:
        st.adds += 1
        st.bit_work += prec
        if prec > st.max_bits:
            st.max_bits = prec
    if a.sign == 0:
        if b.sign == 0:
            return MPFloat._make(0, 0, 0, prec)
        if b.precision == prec:
            return b
        return _round(b.sign, b.significand, b.exponent - b.precision + 1, prec)
    if b.sign == 0:
        if a.precision == prec:
            return a
        return _round(a.sign, a.significand, a.exponent - a.precision + 1, prec)
    if a.sign != b.sign:
        if _sign_hook is not None:
            _sign_hook(a, b)
        raise SignDisciplineError(f"refusing to add {a!r} and {b!r}")
    if a.exponent < b.exponent:
        a, b = b, a
    a_low = a.exponent - a.precision + 1
    floor = a.exponent - prec - 3
    if a_low < floor:
        floor = a_low
    if b.exponent < floor:
        # b lies wholly below every rounding boundary; a sticky bit stands in for it
        b_mag, b_low = 1, floor - 1
    else:
        b_mag, b_low = b.significand, b.exponent - b.precision + 1
    if a_low <= b_low:
        mag = a.significand + (b_mag << (b_low - a_low))
        low = a_low
    else:
        mag = (a.significand << (a_low - b_low)) + b_mag
        low = b_low
    return _round(a.sign, mag, low, prec)


def mp_mul(a: MPFloat, b: MPFloat, prec: Optional[int] = None) -> MPFloat:
    if prec is None:
        prec = a.precision if a.precision >= b.precision else b.precision
    st = _stats.get()
    if st is not None:
        st.muls += 1
        st.bit_work += a.precision * b.precision
        if prec > st.max_bits:
            st.max_bits = prec
    sign = a.sign * b.sign
    if sign == 0:
        return MPFloat._make(0, 0, 0, prec)
    return _round(
        sign,
        a.significand * b.significand,
        a.exponent - a.precision + b.exponent - b.precision + 2,
        prec,
    )


def mp_div(a: MPFloat, b: MPFloat, prec: Optional[int] = None) -> MPFloat:
    if prec is None:
        prec = a.precision if a.precision >= b.precision else b.precision
    if b.sign == 0:
        raise DivisionByZero("MPFloat division by zero")
    st = _stats.get()
    if st is not None:
        st.divs += 1
        st.bit_work += (prec + 2) * b.precision
        if prec > st.max_bits:
            st.max_bits = prec
    if a.sign == 0:
        return MPFloat._make(0, 0, 0, prec)
    k = prec + 2 + b.precision - a.precision
    if k < 0:
        k = 0
    q, r = divmod(a.significand << k, b.significand)
    low = (a.exponent - a.precision + 1) - k - (b.exponent - b.precision + 1) - 1
    return _round(a.sign * b.sign, (q << 1) | (r != 0), low, prec)


def mp_cmp(a: MPFloat, b: MPFloat) -> int:
    """-1, 0 or 1 according to the exact order of the represented values."""
    if a.sign != b.sign:
        return -1 if a.sign < b.sign else 1
    if a.sign == 0:
        return 0
    if a.exponent != b.exponent:
        c = -1 if a.exponent < b.exponent else 1
        return c * a.sign
    sa, sb = a.significand, b.significand
    if a.precision < b.precision:
        sa <<= b.precision - a.precision
    elif b.precision < a.precision:
        sb <<= a.precision - b.precision
    if sa == sb:
        return 0
    return (-1 if sa < sb else 1) * a.sign


def mp_sum(values: Iterable[MPFloat], prec: int) -> MPFloat:
    """Left-to-right same-sign sum, rounding after every addition."""
    acc = MPFloat.zero(prec)
    for v in values:
        acc = mp_add(acc, v, prec)
    return acc


# --- decimal output --------------------------------------------------------


def format_decimal(x, digits: int) -> str:
    """Render a rational in scientific notation with ``digits`` significant digits (half-even)."""
    if digits < 1:
        raise ValueError("digits must be >= 1")
    x = as_fraction(x)
    if x == 0:
        return "0." + "0" * (digits - 1) + "e+00" if digits > 1 else "0e+00"
    sign = "-" if x < 0 else ""
    num, den = abs(x.numerator), x.denominator
    # decimal exponent k with 10**k <= num/den < 10**(k+1)
    k = math.floor((num.bit_length() - den.bit_length()) * math.log10(2))
    while _pow10_le(k + 1, num, den):
        k += 1
    while not _pow10_le(k, num, den):
        k -= 1
    shift = digits - 1 - k
    if shift >= 0:
        q, r = divmod(num * 10**shift, den)
        twice, d2 = 2 * r, den
    else:
        q, r = divmod(num, den * 10**-shift)
        twice, d2 = 2 * r, den * 10**-shift
    if twice > d2 or (twice == d2 and q & 1):
        q += 1
    if q == 10**digits:
        q //= 10
        k += 1
    s = str(q)
    mant = s[0] + ("." + s[1:] if digits > 1 else "")
    return f"{sign}{mant}e{k:+03d}"


def _pow10_le(k: int, num: int, den: int) -> bool:
    """10**k <= num/den."""
    if k >= 0:
        return 10**k * den <= num
    return den <= num * 10**-k

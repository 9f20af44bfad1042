import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from escprob.mpfloat import (
    DivisionByZero,
    MPFloat,
    MPParseError,
    PrecisionBudget,
    SignDisciplineError,
    ceil_log2,
    count_ops,
    format_decimal,
    mp_add,
    mp_cmp,
    mp_div,
    mp_from_decimal,
    mp_from_fraction,
    mp_from_hex,
    mp_from_int,
    mp_mul,
    mp_sum,
    precision_bits,
    sign_hook,
)


def rel_err(x: MPFloat, exact: Fraction) -> Fraction:
    return abs(x.as_fraction() / exact - 1)


def mp(x, p=64):
    return mp_from_fraction(Fraction(x), p)


# --- parsing and representation --------------------------------------------


def test_decimal_zero_is_exact_zero():
    z = mp_from_decimal("0", 32)
    assert z.sign == 0 and z.is_zero()
    assert mp_from_decimal("-0.000", 32).sign == 0


def test_decimal_half_is_normalized():
    h = mp_from_decimal("0.5", 32)
    assert (h.sign, h.significand, h.exponent, h.precision) == (1, 2**31, -1, 32)


def test_decimal_tiny_value_within_one_rounding():
    x = mp_from_decimal("1e-120", 64)
    assert rel_err(x, Fraction(1, 10**120)) <= Fraction(1, 2**63)


def test_decimal_accepts_budget():
    b = PrecisionBudget(Fraction(1, 10**6))
    assert b.bits == 32
    assert mp_from_decimal("3.25", b).precision == b.bits


@pytest.mark.parametrize("bad", ["", "abc", "1e", "--1", "1.2.3", "0x10", "nan", "inf"])
def test_decimal_rejects_malformed(bad):
    with pytest.raises(MPParseError):
        mp_from_decimal(bad, 32)


@pytest.mark.parametrize("eps,bits", [
    (Fraction(1, 2), 32),
    (Fraction(1, 10**6), 32),
    (Fraction(1, 10**9), 38),
    (Fraction(1, 2**40), 48),
    (Fraction(1, 10**30), 108),
])
def test_precision_bits(eps, bits):
    assert precision_bits(eps) == bits


def test_precision_bits_monotone_and_floored():
    prev = None
    for k in range(1, 200):
        b = precision_bits(Fraction(1, 2**k) * Fraction(3, 4))
        assert b >= 32
        if prev is not None:
            assert b >= prev
        prev = b


@given(st.fractions(min_value=Fraction(1, 10**30), max_value=10**30))
def test_ceil_log2_is_exact(x):
    k = ceil_log2(x)
    assert Fraction(2) ** k >= x > Fraction(2) ** (k - 1)


def test_invariant_significand_normalized():
    rng = random.Random(1)
    for _ in range(1000):
        p = rng.choice((3, 8, 24, 53, 100))
        x = mp(Fraction(rng.randint(1, 10**9), rng.randint(1, 10**9)), p)
        assert 2 ** (p - 1) <= x.significand < 2**p
        assert x.as_fraction() == x.significand * Fraction(2) ** (x.exponent - p + 1)


# --- the three operations ---------------------------------------------------


def test_add_exact_sum():
    a = mp(Fraction(3, 2))
    assert mp_add(a, a).as_fraction() == 3


def test_add_rounds_small_addend_away_at_three_bits():
    a, b = mp(1, 3), mp(Fraction(1, 16), 3)
    s = mp_add(a, b, 3)
    assert s.as_fraction() == 1
    assert rel_err(s, Fraction(17, 16)) < Fraction(1, 4)


def test_mixed_sign_add_raises():
    with sign_hook(None):
        with pytest.raises(SignDisciplineError):
            mp_add(mp(1), mp(-1))
        with pytest.raises(SignDisciplineError):
            mp_sum([mp(2), mp(-1)], 64)


def test_mixed_sign_add_calls_hook_first():
    seen = []
    with sign_hook(lambda a, b: seen.append((a, b))):
        with pytest.raises(SignDisciplineError):
            mp_add(mp(-3), mp(5))
    assert len(seen) == 1


def test_add_with_zero_keeps_sign():
    z = MPFloat.zero(64)
    assert mp_add(z, mp(-2)).as_fraction() == -2
    assert mp_add(mp(-2), z).as_fraction() == -2
    assert mp_add(z, z).sign == 0


def test_mul_exact_product():
    a = mp_from_int(3 * 2**10, 8)
    b = mp(Fraction(5, 8), 8)
    assert mp_mul(a, b).as_fraction() == 15 * 2**7


def test_mul_by_zero():
    assert mp_mul(mp(7), MPFloat.zero(64)).sign == 0


def test_mul_extreme_exponents():
    a = mp(10**200)
    b = mp(Fraction(1, 10**300))
    prod = mp_mul(a, b, 64)
    assert abs(math.log(float(prod.as_fraction() * 10**100))) <= 3 * 2.0**-63


def test_exponent_is_unbounded():
    x = mp(Fraction(1, 2**100000), 32)
    assert x.exponent == -100000
    assert mp_mul(x, x).exponent == -200000
    assert mp_cmp(MPFloat.zero(32), x) < 0


def test_div_examples():
    assert mp_div(mp(1), mp(2)).as_fraction() == Fraction(1, 2)
    third = mp_div(mp(1, 32), mp(3, 32), 32)
    assert rel_err(third, Fraction(1, 3)) <= Fraction(1, 2**31)
    assert mp_div(MPFloat.zero(32), mp(3)).sign == 0
    with pytest.raises(DivisionByZero):
        mp_div(mp(1), MPFloat.zero(32))


def test_signs_of_products_and_quotients():
    for a in (-3, 3):
        for b in (-5, 5):
            expected = 1 if a * b > 0 else -1
            assert mp_mul(mp(a), mp(b)).sign == expected
            assert mp_div(mp(a), mp(b)).sign == expected


def test_cmp_examples():
    assert mp_cmp(MPFloat.zero(32), mp(Fraction(1, 2**10000))) < 0
    assert mp_cmp(mp(-1), MPFloat.zero(32)) < 0
    a = MPFloat._make(1, 3 << 1, 3, 3)  # 1.5 * 2^3 at 3 bits
    b = mp_from_int(12, 64)
    assert mp_cmp(a, b) == 0 and a == b


@given(st.fractions(), st.fractions(), st.sampled_from([8, 24, 53, 90]))
def test_cmp_matches_rational_order(x, y, p):
    a, b = mp_from_fraction(x, p), mp_from_fraction(y, p)
    fa, fb = a.as_fraction(), b.as_fraction()
    assert mp_cmp(a, b) == (fa > fb) - (fa < fb)


# --- properties --------------------------------------------------------------

positive = st.fractions(min_value=Fraction(1, 10**40), max_value=10**40)
precisions = st.sampled_from([3, 8, 24, 53, 128])


@given(positive, positive, precisions, st.booleans())
def test_same_sign_ops_within_one_ulp(x, y, p, neg):
    s = -1 if neg else 1
    a, b = mp_from_fraction(s * x, p), mp_from_fraction(s * y, p)
    fa, fb = a.as_fraction(), b.as_fraction()
    bound = Fraction(1, 2 ** (p - 1))
    for res, exact in ((mp_add(a, b), fa + fb), (mp_mul(a, b), fa * fb), (mp_div(a, b), fa / fb)):
        assert rel_err(res, exact) <= bound
        assert res.sign == (1 if exact > 0 else -1)


@given(positive, positive, positive, positive, precisions)
def test_add_and_mul_monotone(x1, x2, y1, y2, p):
    a, a2 = sorted((mp_from_fraction(x1, p), mp_from_fraction(x2, p)))
    b, b2 = sorted((mp_from_fraction(y1, p), mp_from_fraction(y2, p)))
    assert mp_add(a, b) <= mp_add(a2, b2)
    assert mp_mul(a, b) <= mp_mul(a2, b2)


@given(st.fractions(), st.sampled_from([2, 8, 53, 200]))
def test_hex_round_trip(x, p):
    a = mp_from_fraction(x, p)
    b = mp_from_hex(a.to_hex(), p)
    assert b.as_fraction() == a.as_fraction()
    assert mp_from_hex(a.to_hex()).as_fraction() == a.as_fraction()


def test_hex_format():
    assert mp(Fraction(1, 2), 4).to_hex() == "+8p-4"
    assert mp(-3, 4).to_hex() == "-cp-2"
    assert MPFloat.zero(8).to_hex() == "0"
    with pytest.raises(MPParseError):
        mp_from_hex("12p3")


def test_with_precision_rounds_once():
    x = mp(Fraction(1, 3), 200)
    y = x.with_precision(20)
    assert y.precision == 20
    assert rel_err(y, Fraction(1, 3)) <= Fraction(1, 2**19)


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=0, max_value=2**32), st.sampled_from([24, 53]))
def test_chain_of_operations_composes(seed, p):
    rng = random.Random(seed)
    k = 10**4 if seed % 5 == 0 else 2000
    acc, exact, ops = mp(1, p), Fraction(1), 0
    for _ in range(k):
        v = Fraction(rng.randint(1, 255), rng.choice((1, 16, 256)))
        x = mp_from_fraction(v, p)  # dyadic, so exact
        if rng.random() < 0.5:
            acc, exact = mp_add(acc, x, p), exact + v
            ops += 1
        else:
            d = rng.randint(1, 255)
            acc = mp_mul(acc, mp_div(x, mp_from_int(d, p), p), p)
            exact = exact * v / d
            ops += 2
    delta = 2.0 ** -(p - 1)
    assert abs(math.log(float(acc.as_fraction() / exact))) <= ops * delta


def test_count_ops_records_work():
    a, b = mp(3, 40), mp(5, 50)
    with count_ops() as st_:
        mp_add(a, b)
        mp_mul(a, b)
        mp_div(a, b)
    assert (st_.adds, st_.muls, st_.divs) == (1, 1, 1)
    assert st_.total == 3
    assert st_.max_bits == 50
    assert st_.bit_work > 0
    mp_add(a, b)
    assert st_.adds == 1


@pytest.mark.parametrize("x,digits,text", [
    (Fraction(2, 3), 11, "6.6666666667e-01"),
    (Fraction(1), 3, "1.00e+00"),
    (Fraction(0), 4, "0.000e+00"),
    (Fraction(-1, 8), 2, "-1.2e-01"),
    (Fraction(999999), 3, "1.00e+06"),
    (Fraction(1, 10**120), 2, "1.0e-120"),
])
def test_format_decimal(x, digits, text):
    assert format_decimal(x, digits) == text

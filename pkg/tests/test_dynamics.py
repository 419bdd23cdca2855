import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from vdcsets.dynamics import (Constant, DigitMapSystem, Indicator, RotationSystem, TrigTerm,
                              birkhoff_average, circle_overlap, monte_carlo_overlap, qary_digits,
                              recurrence_scan, rotation_overlap)
from vdcsets.errors import DomainError, PrecisionError
from vdcsets.generators import SetSpec, polynomial


def overlap_oracle(u, v, t):
    """|[u,v) & ([u,v) + t mod 1)| by splitting both sets into pieces inside [0,1)."""
    def pieces(a, b):
        a, b = a % 1, a % 1 + (b - a)
        return [(a, min(b, Fraction(1)))] + ([(Fraction(0), b - 1)] if b > 1 else [])

    total = Fraction(0)
    for a1, b1 in pieces(u, v):
        for a2, b2 in pieces(u + t, v + t):
            total += max(Fraction(0), min(b1, b2) - max(a1, a2))
    return total


def test_overlap_examples():
    assert rotation_overlap(RotationSystem("1/3"), 3).value == Fraction(1, 2)
    assert rotation_overlap(RotationSystem("1/2"), 1).value == 0
    ov = rotation_overlap(RotationSystem("phi"), 3)
    t = (3 * (1 + math.sqrt(5)) / 2) % 1
    assert float(ov.t) == pytest.approx(t, abs=1e-15)
    assert float(ov.value) == pytest.approx(t - 0.5, abs=1e-15)
    assert float(ov.value) == pytest.approx(0.354, abs=1e-3)


def test_overlap_matches_monte_carlo():
    sys_ = RotationSystem("phi")
    for n in (1, 3, 7, 16):
        assert abs(monte_carlo_overlap(sys_, n) - float(rotation_overlap(sys_, n).value)) < 1e-3


fractions01 = st.fractions(min_value=0, max_value=1).filter(lambda f: f < 1)


@given(fractions01, fractions01, fractions01)
def test_overlap_formula_matches_interval_oracle(a, b, t):
    u, v = min(a, b), max(a, b)
    if u == v:
        return
    assert circle_overlap(v - u, t) == overlap_oracle(u, v, t)


@given(fractions01, fractions01.filter(bool))
def test_overlap_reflection_and_range(beta, t):
    if beta == 0:
        return
    ov = circle_overlap(beta, t)
    assert ov == circle_overlap(beta, 1 - t)
    assert 0 <= ov <= beta
    assert circle_overlap(beta, Fraction(0)) == beta


@given(fractions01, fractions01, st.fractions(0, 1), st.integers(1, 100))
@settings(max_examples=100)
def test_measure_preservation(a, b, alpha, n):
    u, v = min(a, b), max(a, b)
    if u == v:
        return
    sys_ = RotationSystem(str(alpha % 1), str(u), str(v))
    pre = sys_.preimage(n)
    assert sum(hi - lo for lo, hi in pre) == v - u


def test_recurrence_examples():
    sys_ = RotationSystem("phi")
    lin = recurrence_scan(sys_, SetSpec(polynomial("n")), "0.05", 100)
    assert lin.hits and lin.hits[0].n <= 100
    sq = recurrence_scan(sys_, SetSpec(polynomial("n^2")), "0.05", 10**4)
    assert sq.hits and all(math.isqrt(h.n) ** 2 == h.n for h in sq.hits)
    odd = recurrence_scan(RotationSystem("1/2"), SetSpec(polynomial("2*n+1")), "0.05", 1000)
    assert odd.hits == []
    assert "union" in lin.note


def test_recurrence_hits_are_exactly_the_threshold_crossers():
    sys_ = RotationSystem("phi")
    scan = recurrence_scan(sys_, SetSpec(polynomial("n")), "0.05", 200)
    target = Fraction(1, 4) - Fraction(1, 20)
    expected = [n for n in range(1, 201) if rotation_overlap(sys_, n).value > target]
    assert [h.n for h in scan.hits] == expected


def test_recurrence_preconditions():
    sys_ = RotationSystem("phi")
    with pytest.raises(DomainError):
        recurrence_scan(sys_, SetSpec(polynomial("n")), "0.3", 100)
    with pytest.raises(DomainError):
        recurrence_scan(sys_, SetSpec(polynomial("n")), "0.05", 5)


def test_phase_precision_exhaustion():
    sys_ = RotationSystem("phi", precision_bits=64)
    with pytest.raises(PrecisionError):
        sys_.phase(10**8)


def test_birkhoff_examples():
    sys_ = RotationSystem("phi")
    assert abs(birkhoff_average(sys_, Indicator("0", "1/2"), 10**5) - 0.5) <= 0.01
    assert birkhoff_average(sys_, Constant(), 100) == 1.0
    assert birkhoff_average(RotationSystem("0"), Indicator("0", "1/2"), 1000, "0.25") == 1.0
    assert abs(birkhoff_average(sys_, TrigTerm(1), 10**4)) < 1e-3


def long_division(num, den, q, count):
    out = []
    for _ in range(count):
        num *= q
        out.append(num // den)
        num %= den
    return out


def test_digit_examples():
    assert qary_digits(DigitMapSystem(10, "1/3"), 4) == [3, 3, 3, 3]
    assert qary_digits(DigitMapSystem(2, "1/2"), 3) == [1, 0, 0]
    assert qary_digits(DigitMapSystem(10, "22/7-3"), 6) == [1, 4, 2, 8, 5, 7]


def test_real_digits_match_decimal_expansion():
    digits = qary_digits(DigitMapSystem(10, "sqrt(2)-1"), 50)
    ref = str(math.isqrt(2 * 10**100))[1:51]
    assert "".join(map(str, digits)) == ref


@given(st.integers(2, 16), st.integers(0, 10**6), st.integers(1, 10**6), st.integers(1, 40))
def test_digits_match_long_division_and_reconstruct(q, a, b, count):
    num, den = min(a, b - 1) if b > 1 else 0, b
    x = Fraction(num, den)
    d = qary_digits(DigitMapSystem(q, str(x)), count)
    assert d == long_division(num, den, q, count)
    recon = sum(Fraction(dj, q ** (j + 1)) for j, dj in enumerate(d))
    assert 0 <= x - recon < Fraction(1, q**count)


@given(st.integers(2, 16), st.fractions(0, 1).filter(lambda f: f < 1), st.integers(2, 30))
def test_digit_shift_property(q, x, count):
    sys_ = DigitMapSystem(q, str(x))
    assert qary_digits(sys_.step(), count - 1) == qary_digits(sys_, count)[1:]


def test_digit_map_domain():
    with pytest.raises(DomainError):
        DigitMapSystem(1, "1/2")
    with pytest.raises(DomainError):
        DigitMapSystem(10, "3/2")

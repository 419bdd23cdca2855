import cmath
import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from vdcsets.equidist import (difference_family, star_discrepancy, ud_test, weyl_sum,
                              weyl_sum_box)
from vdcsets.errors import DomainError
from vdcsets.generators import SequenceSpec, fractional_parts, kronecker, polynomial

PHI = (1 + math.sqrt(5)) / 2


def brute_star_discrepancy(points):
    """Exact rational oracle: sup over t of |#{x < t}/N - t|, scanning all breakpoints."""
    xs = [Fraction(x) for x in points]
    n = len(xs)
    best = Fraction(0)
    for t in set(xs) | {Fraction(1)}:
        below = sum(1 for x in xs if x < t)
        upto = sum(1 for x in xs if x <= t)
        best = max(best, abs(Fraction(below, n) - t), abs(Fraction(upto, n) - t))
    return float(best)


def test_weyl_constant_points():
    assert weyl_sum([0.0] * 10, 1).value == 1.0


def test_weyl_paired_cancellation():
    assert abs(weyl_sum([0.0, 0.5], 1).value) < 1e-15


def test_weyl_golden_ratio_against_geometric_series():
    N = 10**4
    pts = fractional_parts(kronecker(["phi"]), N)
    got = weyl_sum(pts, 1).value
    # closed form: (1/N) sum_{n=1}^N e(n phi) = e(phi)(e(N phi)-1)/(N(e(phi)-1))
    with mpmath.workprec(200):
        phi = (1 + mpmath.sqrt(5)) / 2
        z = mpmath.expjpi(2 * phi)
        ref = complex(z * (z**N - 1) / (N * (z - 1)))
    assert abs(got - ref) < 1e-12
    assert 2e-5 <= abs(got) <= 1e-3


def test_weyl_zero_frequency_rejected():
    with pytest.raises(DomainError):
        weyl_sum([0.1, 0.2], 0)


@given(st.lists(st.floats(0, 1, exclude_max=True), min_size=1, max_size=60),
       st.integers(-20, 20).filter(bool))
def test_weyl_modulus_at_most_one_and_matches_direct_sum(pts, h):
    rep = weyl_sum(pts, h)
    assert rep.modulus <= 1 + 2**-30
    ref = sum(cmath.exp(2j * math.pi * h * x) for x in pts) / len(pts)
    assert abs(rep.value - ref) < 1e-12


@given(st.lists(st.floats(0, 1, exclude_max=True), min_size=2, max_size=60), st.randoms())
def test_weyl_permutation_invariance(pts, rnd):
    shuffled = list(pts)
    rnd.shuffle(shuffled)
    assert abs(weyl_sum(pts, 3).value - weyl_sum(shuffled, 3).value) <= 2**-40


@given(st.integers(1, 50), st.integers(2, 50))
def test_rational_family_weyl_sum_is_one_at_denominator(a, q):
    g = math.gcd(a, q)
    a, q = a // g, q // g
    if q == 1:
        return
    pts = fractional_parts(polynomial(f"{a}*n/{q}"), 200)
    assert weyl_sum(pts, q).value == pytest.approx(1.0, abs=1e-12)


def test_weyl_box_examples():
    zero = SequenceSpec("kronecker", {"alpha": [["0", "0"]], "offset": ["0"]}, 1, 2)
    assert weyl_sum_box(zero, 1, (3, 4)).value == 1.0
    half = kronecker(["1/2", "0"])
    assert abs(weyl_sum_box(half, 1, (2, 7)).value) < 1e-15
    two = kronecker(["phi", "sqrt(2)"])
    assert weyl_sum_box(two, 1, (100, 100)).modulus < 0.02


def test_weyl_box_is_product_of_one_dimensional_sums():
    two = kronecker(["phi", "sqrt(2)"])
    got = weyl_sum_box(two, 1, (100, 100)).value

    def one_dim(alpha):
        return sum(cmath.exp(2j * math.pi * n * alpha) for n in range(100)) / 100

    assert abs(got - one_dim(PHI) * one_dim(math.sqrt(2))) < 1e-10


def test_discrepancy_examples():
    assert star_discrepancy([0.0]).dstar == 1.0
    assert star_discrepancy([j / 10 for j in range(10)]).dstar == pytest.approx(0.1, abs=1e-15)
    pts = fractional_parts(kronecker(["phi"]), 1000)[:, 0]
    assert star_discrepancy(pts, "oracle").dstar < 0.01


def test_discrepancy_domain():
    with pytest.raises(DomainError):
        star_discrepancy([1.0])
    with pytest.raises(DomainError):
        star_discrepancy(np.zeros(2001), "oracle")


@given(st.lists(st.floats(0, 1, exclude_max=True), min_size=1, max_size=200))
@settings(max_examples=200)
def test_fast_discrepancy_equals_oracles(pts):
    fast = star_discrepancy(pts).dstar
    assert abs(fast - star_discrepancy(pts, "oracle").dstar) <= 2**-40
    assert abs(fast - brute_star_discrepancy(pts)) <= 2**-40
    assert 1 / (2 * len(pts)) - 1e-15 <= fast <= 1


@given(st.lists(st.floats(0, 1, exclude_max=True), min_size=1, max_size=40),
       st.lists(st.floats(0, 1, exclude_max=True), min_size=1, max_size=40))
def test_merged_discrepancy_bounded_by_weighted_average(a, b):
    # Only the upper bound holds in general: {0.25} and {0.75} each have
    # D* = 0.75 while their union has D* = 0.25.
    da, db = star_discrepancy(a).dstar, star_discrepancy(b).dstar
    merged = star_discrepancy(a + b).dstar
    assert merged <= (len(a) * da + len(b) * db) / (len(a) + len(b)) + 1e-12


def test_merged_discrepancy_can_drop_below_both():
    assert star_discrepancy([0.25]).dstar == 0.75
    assert star_discrepancy([0.75]).dstar == 0.75
    assert star_discrepancy([0.25, 0.75]).dstar == 0.25


def test_ud_examples():
    rep = ud_test(kronecker(["phi"]), 10**4)
    assert rep.verdict == "consistent" and rep.max_modulus < 0.04
    rep = ud_test(polynomial("n/3"), 3000)
    assert rep.verdict == "inconsistent"
    assert rep.moduli[(3,)] == pytest.approx(1.0)
    assert ud_test(polynomial("sqrt(2)*n^2"), 10**5).verdict == "consistent"


def test_difference_family_examples():
    d = difference_family(kronecker(["phi"]), 1)
    assert d.params["offset"] == ["phi"]
    d = difference_family(polynomial("sqrt(2)*n^2"), 1)
    fam = fractional_parts(d, 5)[:, 0]
    ref = [((2 * n + 1) * math.sqrt(2)) % 1 for n in range(1, 6)]
    assert np.allclose(fam, ref, atol=1e-12)
    d3 = difference_family(polynomial("sqrt(2)*n^2"), 3)
    assert ud_test(d3, 10**5).verdict == "consistent"
    with pytest.raises(DomainError):
        difference_family(kronecker(["phi"]), 0)


@given(st.integers(1, 6), st.integers(1, 300))
@settings(max_examples=30, deadline=None)
def test_difference_family_matches_direct_differences(h, n):
    base = polynomial("n^3/7 + sqrt(3)*n^2")
    d = difference_family(base, h)
    with mpmath.workprec(200):
        def g(m):
            return mpmath.mpf(m) ** 3 / 7 + mpmath.sqrt(3) * m**2
        ref = float(mpmath.frac(g(n + h) - g(n)))
    got = fractional_parts(d, 1, start=n)[0, 0]
    assert min(abs(got - ref), 1 - abs(got - ref)) < 1e-12


def test_generic_difference_family():
    from vdcsets.generators import power_log
    base = power_log(["3/2"], [0])
    d = difference_family(base, 2)
    assert d.kind == "difference"
    got = fractional_parts(d, 3)[:, 0]
    ref = [((n + 2) ** 1.5 - n ** 1.5) % 1 for n in range(1, 4)]
    assert np.allclose(got, ref, atol=1e-12)

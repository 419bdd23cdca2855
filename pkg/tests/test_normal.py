import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from vdcsets.errors import CapacityError, DomainError
from vdcsets.generators import primes_up_to
from vdcsets.normal import (block_frequencies, champernowne, champernowne_digits,
                            concat_construction, concat_stream, explicit_stream, int_digits,
                            normality_report, proxy_points)


def to_base(n, q):
    """Oracle via repeated division with Python strings."""
    s = ""
    while True:
        n, r = divmod(n, q)
        s = "0123456789abcdefghijklmnopqrstuvwxyz"[r] + s
        if n == 0:
            return s


def digits_of(s):
    return [int(c, 36) for c in s]


def test_champernowne_examples():
    assert champernowne(10).text(15) == "123456789101112"
    assert champernowne(2).text(8) == "11011100"
    assert champernowne(10).text(1) == "1"


def test_concat_examples():
    assert list(concat_construction("polynomial", 10, 12, g="n^2")) == [1, 4, 9, 1, 6, 2, 5, 3,
                                                                        6, 4, 9, 6]
    assert list(concat_construction("primes", 10, 10)) == [2, 3, 5, 7, 1, 1, 1, 3, 1, 7]


@given(st.integers(2, 36), st.integers(1, 3000))
@settings(max_examples=25, deadline=None)
def test_champernowne_equals_identity_polynomial(q, count):
    assert (champernowne_digits(q, count) ==
            concat_construction("polynomial", q, count, g="n")).all()


@given(st.integers(2, 36))
@settings(max_examples=10, deadline=None)
def test_digit_counts_match_string_oracle(q):
    ref = digits_of("".join(to_base(n, q) for n in range(1, 10**4 + 1)))
    got = champernowne_digits(q, len(ref))
    assert list(got) == ref


def test_primes_match_oracle():
    ref = digits_of("".join(str(p) for p in primes_up_to(20000)))
    assert list(concat_construction("primes", 10, len(ref))) == ref


def test_prefix_is_deterministic():
    s = concat_stream("polynomial", 7, "n^3+2")
    a = s.prefix(5000)
    b = concat_stream("polynomial", 7, "n^3+2").prefix(20000)[:5000]
    assert (a == b).all()
    assert (s.prefix(5000) == a).all()


def test_iteration_tracks_position():
    s = champernowne(10)
    assert [next(s) for _ in range(12)] == [1, 2, 3, 4, 5, 6, 7, 8, 9, 1, 0, 1]
    assert s.position == 12


def test_zero_floor_gives_digit_zero():
    # floor(n/3) = 0, 0, 1, 1, 1, 2, ...
    assert concat_stream("polynomial", 10, "n/3").text(6) == "001112"


def test_negative_g_is_rejected():
    s = concat_stream("polynomial", 10, "5-n")
    with pytest.raises(DomainError, match="n=6"):
        s.prefix(100)


def test_real_coefficient_polynomial():
    # floor(sqrt(2) n^2) = isqrt(2 n^4)
    ref = "".join(str(math.isqrt(2 * n**4)) for n in range(1, 400))
    assert concat_stream("polynomial", 10, "sqrt(2)*n^2").text(len(ref)) == ref


def test_count_budget():
    with pytest.raises(CapacityError):
        champernowne(10).prefix(10**8 + 1)


def test_block_frequency_examples():
    zeros = explicit_stream([0] * 100, 2)
    assert block_frequencies(zeros, 1, 100) == {(0,): 1.0, (1,): 0.0}


def test_champernowne_frequencies_at_a_million_digits():
    # The digit 1 leads every integer from 100000 to 185184, so its frequency in
    # the first 1e6 digits is 0.17981, far from 0.1; the asymptotic limit is slow.
    f = block_frequencies(champernowne(10), 1, 10**6)
    ref = Counter("".join(str(n) for n in range(1, 200000))[:10**6])
    for d in range(10):
        assert f[(d,)] == ref[str(d)] / 10**6
    assert f[(1,)] == pytest.approx(0.17981)


@given(st.integers(2, 5), st.integers(200, 3000))
@settings(max_examples=20, deadline=None)
def test_block_marginalisation(q, N):
    s = champernowne(q)
    one = block_frequencies(s, 1, N)
    two = block_frequencies(s, 2, N)
    for d in range(q):
        marg = sum(two[(d, e)] for e in range(q))
        assert abs(marg - one[(d,)]) <= 2 / N


@given(st.integers(2, 6), st.integers(1, 3))
@settings(max_examples=15, deadline=None)
def test_frequencies_sum_to_one(q, L):
    N = max(q**L, 500)
    f = block_frequencies(concat_stream("primes", q), L, N)
    assert abs(sum(f.values()) - 1) <= 2**-40
    assert len(f) == q**L


def test_normality_report_examples():
    rep = normality_report(champernowne(10), 2, 10**5)
    assert set(rep.max_deviation) == {1, 2}
    assert abs(sum(rep.frequencies[1].values()) - 1) < 2**-40
    periodic = explicit_stream([0, 1] * 5000, 2)
    assert normality_report(periodic, 1, 10000).discrepancy >= 0.2


def test_champernowne_report_deviation_at_a_million_digits():
    rep = normality_report(champernowne(10), 2, 10**6)
    # the base-10 deviation is dominated by the leading-digit excess of 1
    assert rep.max_deviation[1] == pytest.approx(0.07981)
    assert rep.max_deviation[2] < 0.03


def test_proxy_points():
    assert np.allclose(proxy_points(np.array([1, 2, 3, 4, 5]), 10, 10), [0.123, 0.234, 0.345])


def test_int_digits():
    assert int_digits(0, 10) == [0]
    assert int_digits(255, 16) == [15, 15]

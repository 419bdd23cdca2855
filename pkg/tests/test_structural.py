import math
import warnings

import pytest
from hypothesis import given, settings, strategies as st

from vdcsets.errors import CapacityError, DomainError
from vdcsets.generators import SetSpec, polynomial, power_log
from vdcsets.structural import (RefutationCertificate, check_basis, dq_filter, kmf_criterion,
                                progression_verdict, rational_rank, refute_by_multiples,
                                select_basis, shifted_prime_verdict, smallest_root_crt,
                                smallest_root_naive, sufficient_condition_test)


def test_odd_numbers_refuted_at_two():
    cert = refute_by_multiples(SetSpec(polynomial("2*n+1")), [2])
    assert cert.kind == "finite_multiples"
    assert cert.params["q"] == 2
    assert cert.params["multiples_found"] == []
    assert cert.proof_mode == "exact"
    assert cert.recheck()


def test_four_n_plus_two_refuted_at_four():
    cert = refute_by_multiples(SetSpec(polynomial("4*n+2")), [4])
    assert cert.params["q"] == 4 and cert.proof_mode == "exact" and cert.recheck()


def test_squares_not_refuted():
    assert refute_by_multiples(SetSpec(polynomial("n^2")), range(1, 13)) is None


def test_rational_polynomial_residues():
    # n(n+1)/2 takes every residue class mod q that matters: triangular numbers meet qN
    assert refute_by_multiples(SetSpec(polynomial("n*(n+1)/2")), range(1, 30)) is None


def test_prime_argument_uses_coprime_classes():
    # p + 1 is even for every odd prime, but 3 | p + 1 infinitely often
    assert refute_by_multiples(SetSpec(polynomial("n+1", argument="prime")), range(1, 20)) is None
    cert = refute_by_multiples(SetSpec(polynomial("2*n+1", argument="prime")), range(1, 5))
    assert cert.params["q"] == 2


def test_empirical_certificate_for_non_polynomial_generator():
    # floor(n^{3/2}) meets every qN, so no refutation; the search is empirical
    assert refute_by_multiples(SetSpec(power_log(["3/2"], [0])), range(1, 6), 5000) is None


def test_empirical_certificate_is_rechecked():
    cert = refute_by_multiples(SetSpec(polynomial("4*n+2")), [4])
    data = cert.to_json()
    again = RefutationCertificate.from_json(data)
    assert again.recheck()
    assert "recheck" in data


def test_horizon_must_be_large():
    with pytest.raises(DomainError):
        refute_by_multiples(SetSpec(polynomial("n")), [2], horizon=10)


def test_progression_examples():
    assert progression_verdict(2, 1).verdict == "not_vdC"
    v = progression_verdict(3, 6)
    assert v.is_vdc
    roots = dict((q, z) for q, z in v.evidence["kmf_roots"])
    assert sorted(roots) == list(range(1, 25))
    assert all((3 * z + 6) % q == 0 for q, z in roots.items())
    assert progression_verdict(1, 0).is_vdc


@given(st.integers(1, 50), st.integers(1, 50))
def test_progression_characterisation(a, b):
    v = progression_verdict(a, b)
    assert (v.verdict == "not_vdC") == (b % a != 0)
    if v.certificate is not None:
        assert v.certificate.recheck()


def test_kmf_examples():
    sq = kmf_criterion("z^2", 100)
    assert sq.verdict == "all_roots_found" and set(sq.roots.values()) == {0}
    p1 = kmf_criterion("z^2+1", 10)
    assert p1.verdict == "obstruction_at_q" and p1.obstruction_q == 3
    # residues of z^2 + 1 mod 3 are 1, 2, 2
    assert [(z * z + 1) % 3 for z in range(3)] == [1, 2, 2]
    assert p1.certificate.recheck()
    m1 = kmf_criterion("z^2-1", 100)
    assert m1.verdict == "all_roots_found"
    assert all(z == (0 if q == 1 else 1) for q, z in m1.roots.items())


def test_kmf_roots_are_exact():
    cv = kmf_criterion([6, -5, 1, 1], 300)
    for q, z in cv.roots.items():
        if z is not None:
            assert (6 - 5 * z + z**2 + z**3) % q == 0


def test_kmf_preconditions():
    with pytest.raises(DomainError):
        kmf_criterion("3", 10)
    with pytest.raises(DomainError):
        kmf_criterion("-z^2", 10)
    with pytest.raises(DomainError):
        kmf_criterion("z^2", 10**6)


@given(st.lists(st.integers(-30, 30), min_size=3, max_size=3), st.integers(1, 10))
@settings(max_examples=50, deadline=None)
def test_crt_roots_match_naive_enumeration(low, lead):
    coeffs = low + [lead]
    for q in range(1, 201):
        assert smallest_root_crt(coeffs, q) == smallest_root_naive(coeffs, q)


def test_shifted_prime_examples():
    assert shifted_prime_verdict(1, -1).is_vdc
    assert shifted_prime_verdict(2, 2).is_vdc
    v = shifted_prime_verdict(1, 2)
    assert v.verdict == "not_vdC" and v.certificate.recheck()
    assert v.certificate.params["q"] == 2
    assert v.certificate.params["exceptional_primes"] == [2]


@given(st.integers(-20, 20).filter(bool), st.integers(-20, 20).filter(bool))
def test_shifted_prime_characterisation(a, b):
    v = shifted_prime_verdict(a, b)
    assert v.is_vdc == (abs(a) == abs(b))
    if v.certificate is not None:
        assert v.certificate.recheck()


def test_shifted_prime_obstruction_holds_on_actual_primes():
    from vdcsets.generators import primes_up_to
    for a, b in [(3, 2), (2, 6), (4, 6), (5, -10)]:
        v = shifted_prime_verdict(a, b)
        q = v.certificate.params["q"]
        hits = [p for p in primes_up_to(10**4) if (a * p + b) % q == 0]
        assert len(hits) <= 1


def test_dq_filter_examples():
    assert dq_filter([polynomial("n^2")], [0], 2, 20) == [(n * n,) for n in range(2, 21, 2)]
    assert dq_filter([polynomial("n")], [0], 1, 5) == [(1,), (2,), (3,), (4,), (5,)]
    got = dq_filter([polynomial("n^2"), polynomial("n^3")], [0, 1], 2, 30)
    assert got == [(n * n, n**3) for n in range(2, 31, 2)]


@given(st.integers(1, 4), st.integers(1, 400))
@settings(max_examples=30, deadline=None)
def test_dq_filter_matches_direct_enumeration(q, horizon):
    f = math.factorial(q)
    got = dq_filter([polynomial("n^2+n")], [0], q, horizon) if any(
        (n * n + n) % f == 0 for n in range(1, horizon + 1)) else None
    if got is not None:
        assert got == [(n * n + n,) for n in range(1, horizon + 1) if (n * n + n) % f == 0]


@given(st.integers(1, 5))
@settings(max_examples=5, deadline=None)
def test_dq_filters_are_nested(q):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        big = {t for t in dq_filter([polynomial("n^3")], [0], q, 2000)}
        small = {t for t in dq_filter([polynomial("n^3")], [0], q + 1, 2000)}
    assert small <= big


def test_dq_filter_warnings_and_budget():
    with pytest.warns(UserWarning, match="empty"):
        assert dq_filter([polynomial("n")], [0], 5, 100) == []
    with pytest.warns(UserWarning, match="not Q-linearly independent"):
        dq_filter([polynomial("n^2"), polynomial("2*n^2")], [0, 1], 1, 5)
    with pytest.raises(CapacityError):
        dq_filter([polynomial("n")], [0], 3000, 10, budget_bits=1000)


def test_rank_and_basis_selection():
    assert rational_rank([[1, 2], [2, 4]]) == 1
    assert rational_rank([[1, 0], [0, 1], [1, 1]]) == 2
    g = [polynomial("n^2"), polynomial("n^2"), polynomial("n^3")]
    assert select_basis(g) == [0, 2]
    assert check_basis(g, [0, 2]) == 2


def test_sufficient_condition_examples():
    rep = sufficient_condition_test([polynomial("n^2")], [0], [1, 2, 3],
                                    [{"label": "sqrt2", "x": ["sqrt(2)"]}], N=10**4)
    assert rep.verdict == "hypothesis consistent"
    assert "not" in rep.note and "evidence" in rep.note
    rep = sufficient_condition_test([polynomial("n")], [0], [1, 2, 3, 4],
                                    [{"label": "phi", "x": ["phi"]}], N=10**4)
    assert rep.verdict == "hypothesis consistent"


def test_dependent_pair_is_reduced_not_tested():
    with pytest.warns(UserWarning):
        rep = sufficient_condition_test([polynomial("n^2"), polynomial("n^2")], [0, 1], [1, 2],
                                        [{"label": "sqrt2", "x": ["sqrt(2)"]}], N=10**4)
    assert rep.basis_used == [0]
    assert all(len(r["x"]) == 1 for r in rep.results)
    assert rep.verdict == "hypothesis consistent"


def test_default_samples_cover_three_kinds():
    rep = sufficient_condition_test([polynomial("n^2"), polynomial("n^3")], [0, 1], [1],
                                    N=10**4)
    assert {r["label"] for r in rep.results} == {"algebraic", "mixed", "random"}


def test_rational_sample_rejected():
    with pytest.raises(DomainError):
        sufficient_condition_test([polynomial("n")], [0], [1], [["1/2"]], N=10**4)


def test_failing_hypothesis_is_named():
    # an absurdly strict threshold forces the failure path
    rep = sufficient_condition_test([polynomial("n")], [0], [2],
                                    [{"label": "phi", "x": ["phi"]}], N=10**4,
                                    threshold_factor=1e-6)
    assert rep.verdict == "hypothesis failing"
    assert rep.failing["q"] == 2 and rep.failing["x"] == ["phi"]
    assert len(rep.failing["h"]) == 1


def test_inconclusive_when_dq_is_empty():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rep = sufficient_condition_test([polynomial("n")], [0], [8],
                                        [{"label": "phi", "x": ["phi"]}], N=10**4, horizon=1000)
    assert rep.verdict == "inconclusive"

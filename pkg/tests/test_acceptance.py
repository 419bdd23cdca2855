"""Acceptance criteria 1-10, each at its stated tolerance and time limit.

One PASS/FAIL line per criterion is printed in the terminal summary.
"""

import pytest

from conftest import ACCEPTANCE_LINES
from vdcsets.experiments import TIME_LIMITS, criterion_10, run_criterion
from vdcsets.serialize import dumps

SEED = 0
_first_runs = {}


def _report(i, passed, detail):
    line = f"criterion {i:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


@pytest.mark.parametrize("i", range(1, 10))
def test_criterion(i):
    artifact, elapsed = run_criterion(i, SEED)
    _first_runs[i] = dumps(artifact)
    in_time = elapsed < TIME_LIMITS[i]
    passed = artifact["passed"] and in_time
    _report(i, passed, f"runtime {elapsed:.2f}s (limit {TIME_LIMITS[i]}s) {_summary(i, artifact)}")
    assert in_time, f"runtime {elapsed:.2f}s exceeds {TIME_LIMITS[i]}s"
    assert artifact["passed"], artifact


def test_criterion_10_determinism():
    first = _first_runs if len(_first_runs) == 9 else None
    artifact = criterion_10(SEED, first)
    _report(10, artifact["passed"], f"differing criteria: {artifact['differing']}")
    assert artifact["passed"]


def _summary(i, a):
    if i == 1:
        return f"max |fast - oracle| = {a['max_abs_difference']:.3g}"
    if i == 2:
        return f"{a['cases']} Fejer cases, failures {len(a['failures'])}"
    if i == 3:
        return "certified minima " + ", ".join(f"{r['certified_min']:.4f}" for r in a["results"]
                                                if r["certified_min"] is not None)
    if i == 4:
        return (f"mismatches {len(a['progression_mismatches'])}"
                f"+{len(a['shifted_prime_mismatches'])}")
    if i == 5:
        return f"z^2+1 obstruction q={a['z2_plus_1_obstruction']}, mismatches {len(a['mismatches'])}"
    if i == 6:
        worst = max(r["max_modulus"] for r in a["results"])
        return (f"worst modulus {worst:.5f} vs {a['bound']:.5f}, "
                f"degenerate basis {a['degenerate_basis_used']}")
    if i == 7:
        worst = max(r["diff"] for r in a["monte_carlo"])
        return (f"first hits n={a['first_hit_N']} / n={a['first_hit_squares']}, "
                f"max MC diff {worst:.2g}")
    if i == 8:
        return (f"base-10 deviation {a['base10_max_deviation']:.4f}, "
                f"base-2 block deviation {a['base2_max_deviation']:.4f} (tol 0.02)")
    if i == 9:
        return (f"n^(3/2) {a['n_three_halves']['max_modulus']:.5f}, "
                f"f(p_n) {a['entire_of_primes']['max_modulus']:.5f} vs {a['threshold']:.5f}")
    return ""

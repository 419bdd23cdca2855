#!/usr/bin/env python3
"""Weyl-sum screen of a few sequences, showing the largest normalised sum."""

from vdcsets.equidist import ud_test
from vdcsets.generators import polynomial, power_log

families = {
    "sqrt(2) n^2": polynomial("sqrt(2)*n^2"),
    "n^(3/2)": power_log(["3/2"], [0]),
    "n (log n)^2": power_log(["1"], [2]),
    "phi n": polynomial("phi*n"),
}
for label, spec in families.items():
    for N in (10**3, 10**4):
        rep = ud_test(spec, N)
        print(f"{label:<20} N={N:<6} max |S|/N = {rep.max_modulus:.5f} "
              f"(threshold {rep.threshold:.5f}) {rep.verdict}")

#!/usr/bin/env python3
"""Block frequencies of Champernowne's constant in bases 10 and 2 at growing N."""

from vdcsets.normal import champernowne, normality_report

for q in (10, 2):
    stream = champernowne(q)
    for N in (10**4, 10**5, 10**6, 10**7):
        rep = normality_report(stream, 2, N)
        devs = ", ".join(f"L={L}: {d:.4f}" for L, d in rep.max_deviation.items())
        print(f"q={q:<2} N={N:<9} {devs}  proxy D*={rep.discrepancy:.4f}")

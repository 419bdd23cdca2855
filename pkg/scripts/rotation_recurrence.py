#!/usr/bin/env python3
"""Return times of the golden rotation to [0, 1/2) along n and along the squares."""

from vdcsets.dynamics import RotationSystem, recurrence_scan, rotation_overlap
from vdcsets.generators import SetSpec, polynomial

system = RotationSystem("phi", "0", "1/2")
for label, expr, horizon in (("n", "n", 100), ("n^2", "n^2", 10**4)):
    scan = recurrence_scan(system, SetSpec(polynomial(expr)), "0.05", horizon)
    print(f"{label}: {len(scan.hits)} hits up to {horizon}, first few:")
    for hit in scan.hits[:5]:
        print(f"  n={hit.n:<6} overlap={float(rotation_overlap(system, hit.n).value):.6f}")

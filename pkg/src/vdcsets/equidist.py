"""Weyl sums, box-indexed Weyl sums, star discrepancy and u.d. screening.

All exponential sums use :func:`math.fsum` over the cosine and sine parts, so
the result is the correctly rounded sum of the per-point terms: independent
of summation order and bit-stable across platforms.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainError
from .exprs import as_fraction, canonical, trim
from .generators import SequenceSpec, fractional_parts, fractional_parts_at

DEFAULT_MAX_FREQUENCY = 64
DEFAULT_THRESHOLD_FACTOR = 4.0
ORACLE_MAX_N = 2000


@dataclass
class WeylReport:
    frequency: tuple
    N: int | tuple
    value: complex

    @property
    def modulus(self) -> float:
        return abs(self.value)

    def to_json(self) -> dict:
        return {"frequency": list(self.frequency),
                "N": list(self.N) if isinstance(self.N, tuple) else self.N,
                "re": self.value.real, "im": self.value.imag, "modulus": self.modulus}


@dataclass
class DiscrepancyReport:
    N: int
    dstar: float
    method: str

    def to_json(self) -> dict:
        return {"N": self.N, "dstar": self.dstar, "method": self.method}


def _as_points(points) -> np.ndarray:
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise DomainError("points must be a nonempty list of vectors")
    return pts


def _as_frequency(h, k: int) -> tuple:
    t = tuple(int(x) for x in h) if isinstance(h, (tuple, list, np.ndarray)) else (int(h),)
    if len(t) != k:
        raise DomainError(f"frequency {h} has dimension {len(t)}, points have {k}")
    if not any(t):
        raise DomainError("frequency must be nonzero")
    return t


def _exp_mean(phases: np.ndarray) -> complex:
    """Mean of e(phase) with correctly rounded sums; phases are reduced mod 1 first."""
    ph = 2.0 * math.pi * np.mod(phases, 1.0)
    n = len(ph)
    return complex(math.fsum(np.cos(ph)) / n, math.fsum(np.sin(ph)) / n)


def weyl_sum(points, h) -> WeylReport:
    """``(1/N) sum_n e(h . x_n)`` for points in ``[0,1)^k``."""
    pts = _as_points(points)
    freq = _as_frequency(h, pts.shape[1])
    phases = np.zeros(pts.shape[0])
    for hi, col in zip(freq, pts.T):
        if hi:
            # reduce each coordinate product separately to keep the phase small
            phases = np.mod(phases + np.mod(hi * col, 1.0), 1.0)
    return WeylReport(freq, pts.shape[0], _exp_mean(phases))


def weyl_sum_box(family: SequenceSpec, h, box) -> WeylReport:
    """Average of ``e(h . x_n)`` over the index box ``0 <= n < box`` (componentwise)."""
    box = tuple(int(b) for b in box)
    if len(box) != family.index_dim:
        raise DomainError(f"box has {len(box)} axes, family index has {family.index_dim}")
    if any(b < 1 for b in box):
        raise DomainError("box sides must be >= 1")
    freq = _as_frequency(h, family.dimension)
    indices = list(itertools.product(*(range(b) for b in box)))
    fr = fractional_parts_at(family, indices)
    report = weyl_sum(fr, freq)
    return WeylReport(freq, box, report.value)


def star_discrepancy(points, method: str = "fast") -> DiscrepancyReport:
    """One-dimensional star discrepancy ``sup_t |#{x_n < t}/N - t|``.

    ``fast`` uses the sorted closed form; ``oracle`` scans every candidate
    ``t`` (each point and its right limit) by direct counting, O(N^2).
    """
    x = np.asarray(points, dtype=np.float64).ravel()
    n = len(x)
    if n == 0:
        raise DomainError("points must be nonempty")
    if np.any(x < 0) or np.any(x >= 1) or not np.all(np.isfinite(x)):
        raise DomainError("points must lie in [0, 1)")
    if method == "fast":
        xs = np.sort(x)
        i = np.arange(1, n + 1)
        d = max(float(np.max(i / n - xs)), float(np.max(xs - (i - 1) / n)))
    elif method == "oracle":
        if n > ORACLE_MAX_N:
            raise DomainError(f"oracle discrepancy is limited to N <= {ORACLE_MAX_N}")
        d = 0.0
        for t in x:
            below = np.count_nonzero(x < t)
            upto = np.count_nonzero(x <= t)
            d = max(d, abs(below / n - t), abs(upto / n - t))
    else:
        raise DomainError(f"unknown discrepancy method {method!r}")
    return DiscrepancyReport(n, d, method)


# --- u.d. screening -------------------------------------------------------------------

def default_frequencies(k: int, max_frequency: int = DEFAULT_MAX_FREQUENCY) -> list[tuple]:
    """Nonzero ``h`` with ``|h|_inf <= max_frequency``, one of each pair ``+-h``."""
    if k == 1:
        return [(h,) for h in range(1, max_frequency + 1)]
    out = []
    for h in itertools.product(range(-max_frequency, max_frequency + 1), repeat=k):
        first = next((c for c in h if c), 0)
        if first > 0:
            out.append(h)
    return out


@dataclass
class UDReport:
    N: int
    moduli: dict
    max_modulus: float
    worst_frequency: tuple
    threshold: float
    verdict: str
    note: str = ("statistical screen: moduli below the threshold are consistent with "
                 "u.d. mod 1, never a proof")

    @property
    def consistent(self) -> bool:
        return self.verdict == "consistent"

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "moduli": [{"frequency": list(h), "modulus": m} for h, m in self.moduli.items()],
            "max_modulus": self.max_modulus,
            "worst_frequency": list(self.worst_frequency),
            "threshold": self.threshold,
            "verdict": self.verdict,
            "note": self.note,
        }


def threshold(N: int, factor: float = DEFAULT_THRESHOLD_FACTOR) -> float:
    return factor / math.sqrt(N)


def ud_test_points(points, frequencies=None, threshold_factor: float = DEFAULT_THRESHOLD_FACTOR,
                   max_frequency: int = DEFAULT_MAX_FREQUENCY) -> UDReport:
    """Weyl-criterion screen of explicit fractional parts."""
    pts = _as_points(points)
    n, k = pts.shape
    freqs = frequencies if frequencies is not None else default_frequencies(k, max_frequency)
    moduli = {}
    for h in freqs:
        rep = weyl_sum(pts, h)
        moduli[rep.frequency] = rep.modulus
    worst = max(moduli, key=lambda h: (moduli[h], tuple(-abs(c) for c in h)))
    tau = threshold(n, threshold_factor)
    verdict = "consistent" if moduli[worst] <= tau else "inconsistent"
    return UDReport(n, moduli, moduli[worst], worst, tau, verdict)


def ud_test(family: SequenceSpec, N: int, frequencies=None,
            threshold_factor: float = DEFAULT_THRESHOLD_FACTOR,
            max_frequency: int = DEFAULT_MAX_FREQUENCY) -> UDReport:
    """Screen the first ``N`` terms of ``family`` with Weyl sums.

    The verdict is ``consistent`` iff every modulus is at most
    ``threshold_factor / sqrt(N)``.
    """
    fr = fractional_parts(family, N)
    return ud_test_points(fr, frequencies, threshold_factor, max_frequency)


# --- difference families ---------------------------------------------------------------

def _shift_polynomial(coeffs, h: int) -> list:
    """Coefficients of ``P(n + h) - P(n)``: ``sum_{j>i} c_j C(j,i) h^(j-i)`` for ``n^i``."""
    out = []
    for i in range(max(1, len(coeffs) - 1)):
        acc = Fraction(0)
        for j in range(i + 1, len(coeffs)):
            mult = math.comb(j, i) * h ** (j - i)
            f = as_fraction(coeffs[j])
            if f is not None:
                acc = _add(acc, f * mult)
            elif mult:
                acc = _add(acc, f"{mult}*({canonical(coeffs[j])})")
        out.append(acc)
    return [canonical(c) for c in trim(out)]


def difference_family(family: SequenceSpec, h) -> SequenceSpec:
    """The family ``x_{n+h} - x_n``.

    Integer-argument polynomials and Kronecker families are differenced
    symbolically; everything else is wrapped in a ``difference`` spec.
    """
    shift = tuple(int(x) for x in h) if isinstance(h, (tuple, list)) else (int(h),)
    if len(shift) != family.index_dim:
        raise DomainError(f"shift {h} does not match index dimension {family.index_dim}")
    if not any(shift):
        raise DomainError("shift must be nonzero")
    if any(x < 0 for x in shift):
        raise DomainError("shift must lie in N^k")
    p = family.params
    if family.kind == "polynomial" and family.argument == "integer" and "start" not in p:
        coeffs = [_shift_polynomial(c, shift[0]) for c in p["coeffs"]]
        return SequenceSpec("polynomial", {"coeffs": coeffs, "argument": "integer"},
                            family.dimension, 1, family.precision_bits)
    if family.kind == "kronecker":
        offs = []
        for row, o in zip(p["alpha"], p.get("offset", [0] * family.dimension)):
            acc = Fraction(0)
            for a, s in zip(row, shift):
                if s:
                    acc = _add(acc, a if s == 1 else f"({canonical(a)})*{s}")
            offs.append(canonical(acc) if as_fraction(acc) is None else str(as_fraction(acc)))
        zeros = [["0"] * family.index_dim for _ in range(family.dimension)]
        return SequenceSpec("kronecker", {"alpha": zeros, "offset": offs},
                            family.dimension, family.index_dim, family.precision_bits)
    return SequenceSpec("difference", {"base": family.to_json(), "shift": list(shift)},
                        family.dimension, family.index_dim, family.precision_bits)


def _add(a, b):
    fa, fb = as_fraction(a), as_fraction(b)
    if fa is not None and fb is not None:
        return fa + fb
    if fa == 0:
        return b
    return f"({canonical(a)})+({canonical(b)})"

"""Circle rotations, exact recurrence overlaps, Birkhoff averages and q-ary digits.

Points on the circle are carried as fixed-point integers ``V`` at scale
``2**-bits`` with an error bound ``E`` (same scale), so ``{n alpha}`` is a
single big-integer product rather than ``n`` accumulated additions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import DomainError, PrecisionError
from .exprs import as_fraction, canonical, fixed_point
from .generators import DEFAULT_PRECISION_BITS, FRAC_ACCURACY_BITS, SetSpec, set_elements_up_to

INTERSECTION_NOTE = ("recurrence uses mu(A & T^-n A) > mu(A)^2 - eps; "
                     "the union form of the inequality holds trivially and is not used")


def _fixed_mod1(value, bits: int) -> tuple[int, int]:
    v, e = fixed_point(value, bits)
    return v & ((1 << bits) - 1), e


# --- rotation -----------------------------------------------------------------------------

@dataclass
class RotationSystem:
    """Rotation ``T x = {x + alpha}`` on ``[0, 1)`` with a marked interval ``A = [u, v)``."""

    alpha: str
    u: str = "0"
    v: str = "1/2"
    precision_bits: int = DEFAULT_PRECISION_BITS

    def __post_init__(self):
        self.alpha, self.u, self.v = canonical(self.alpha), canonical(self.u), canonical(self.v)
        fu, fv = as_fraction(self.u), as_fraction(self.v)
        if fu is None or fv is None:
            raise DomainError("interval endpoints must be rational")
        if not 0 <= fu < fv <= 1 or fv - fu == 1:
            raise DomainError("need 0 <= u < v <= 1 and mu(A) < 1")
        if self.precision_bits < 64:
            raise DomainError("precision_bits must be >= 64")
        self._alpha_fixed = _fixed_mod1(self.alpha, self.precision_bits)
        self._alpha_exact = as_fraction(self.alpha)

    @property
    def interval(self) -> tuple[Fraction, Fraction]:
        return as_fraction(self.u), as_fraction(self.v)

    @property
    def measure(self) -> Fraction:
        u, v = self.interval
        return v - u

    def phase(self, n: int) -> tuple[Fraction, Fraction]:
        """``{n alpha}`` as a Fraction together with an absolute error bound."""
        if self._alpha_exact is not None:
            return (n * self._alpha_exact) % 1, Fraction(0)
        bits = self.precision_bits
        va, ea = self._alpha_fixed
        err = abs(n) * ea
        if err > 1 << (bits - FRAC_ACCURACY_BITS):
            raise PrecisionError(f"{{n alpha}} not accurate to 2^-{FRAC_ACCURACY_BITS} "
                                 f"at n={n} with {bits} bits", index=n)
        return Fraction((n * va) & ((1 << bits) - 1), 1 << bits), Fraction(err, 1 << bits)

    def preimage(self, n: int) -> list[tuple[Fraction, Fraction]]:
        """``T^{-n} A`` as a union of at most two intervals (exact for rational alpha)."""
        t, _ = self.phase(n)
        u, v = self.interval
        lo, hi = (u - t) % 1, (u - t) % 1 + (v - u)
        if hi <= 1:
            return [(lo, hi)]
        return [(lo, Fraction(1)), (Fraction(0), hi - 1)]

    def to_json(self) -> dict:
        return {"alpha": self.alpha, "u": self.u, "v": self.v,
                "precision_bits": self.precision_bits}


def circle_overlap(beta: Fraction, t: Fraction) -> Fraction:
    """Length of ``[0, beta) & ([0, beta) + t)`` on the circle, ``0 <= t < 1``."""
    return max(Fraction(0), beta - t) + max(Fraction(0), beta - 1 + t)


@dataclass
class Overlap:
    n: int
    t: Fraction
    value: Fraction
    error: Fraction

    def to_json(self) -> dict:
        return {"n": self.n, "t": float(self.t), "overlap": float(self.value),
                "error": float(self.error)}


def rotation_overlap(sys: RotationSystem, n: int) -> Overlap:
    """``mu(A & T^-n A)``; the overlap is 1-Lipschitz in ``t`` so the phase error carries over."""
    if n < 1:
        raise DomainError("n must be >= 1")
    t, err = sys.phase(n)
    return Overlap(n, t, circle_overlap(sys.measure, t), err)


@dataclass
class RecurrenceScan:
    target: Fraction
    hits: list[Overlap]
    uncertain: list[int] = field(default_factory=list)
    scanned: int = 0
    note: str = INTERSECTION_NOTE

    def to_json(self) -> dict:
        return {"target": float(self.target), "hits": [h.to_json() for h in self.hits],
                "uncertain": self.uncertain, "scanned": self.scanned, "note": self.note}

    def write_csv(self, fh) -> None:
        fh.write("n,t,overlap\n")
        for h in self.hits:
            fh.write(f"{h.n},{float(h.t)!r},{float(h.value)!r}\n")


def recurrence_scan(sys: RotationSystem, set_spec: SetSpec, epsilon, horizon: int) -> RecurrenceScan:
    """All ``n`` in ``H`` with ``n <= horizon`` and ``mu(A & T^-n A) > mu(A)^2 - epsilon``.

    ``n`` whose phase error straddles the threshold are listed as uncertain.
    """
    eps = as_fraction(epsilon)
    if eps is None:
        eps = Fraction(epsilon)
    beta = sys.measure
    if not 0 < eps < beta * beta:
        raise DomainError("epsilon must lie in (0, mu(A)^2)")
    if horizon < 10:
        raise DomainError("horizon must be >= 10")
    target = beta * beta - eps
    hits, uncertain = [], []
    elements = set_elements_up_to(set_spec, horizon)
    for n in elements:
        ov = rotation_overlap(sys, n)
        if ov.value - ov.error > target:
            hits.append(ov)
        elif ov.value + ov.error > target:
            uncertain.append(n)
    return RecurrenceScan(target, hits, uncertain, len(elements))


def monte_carlo_overlap(sys: RotationSystem, n: int, samples: int = 10**6, seed: int = 0) -> float:
    """Stratified jittered estimate of ``mu(A & T^-n A)``: one uniform point per cell."""
    rng = np.random.default_rng(seed)
    x = (np.arange(samples) + rng.random(samples)) / samples
    u, v = (float(c) for c in sys.interval)
    t = float(sys.phase(n)[0])
    y = np.mod(x + t, 1.0)
    return float(np.count_nonzero((x >= u) & (x < v) & (y >= u) & (y < v))) / samples


# --- Birkhoff averages -----------------------------------------------------------------

@dataclass
class Indicator:
    u: str
    v: str

    def to_json(self) -> dict:
        return {"type": "indicator", "u": canonical(self.u), "v": canonical(self.v)}


@dataclass
class TrigTerm:
    """``cos(2 pi h x)`` or ``sin(2 pi h x)``."""

    h: int
    part: str = "cos"

    def to_json(self) -> dict:
        return {"type": "trig", "h": self.h, "part": self.part}


@dataclass
class Constant:
    c: float = 1.0

    def to_json(self) -> dict:
        return {"type": "constant", "c": self.c}


def orbit_fixed(sys: RotationSystem, x0, N: int) -> list[int]:
    """Fixed-point orbit ``{x0 + n alpha}`` for ``n = 0..N-1`` at ``sys.precision_bits``."""
    bits = sys.precision_bits
    mask = (1 << bits) - 1
    v0, _ = _fixed_mod1(x0, bits)
    va, _ = sys._alpha_fixed
    return [(v0 + n * va) & mask for n in range(N)]


def birkhoff_average(sys: RotationSystem, observable, N: int, x0="0") -> float:
    """``(1/N) sum_{n<N} f(T^n x0)`` with a correctly rounded sum."""
    if N < 1:
        raise DomainError("N must be >= 1")
    if isinstance(observable, Constant):
        return float(observable.c)
    bits = sys.precision_bits
    orbit = orbit_fixed(sys, x0, N)
    if isinstance(observable, Indicator):
        lo, _ = fixed_point(observable.u, bits)
        hi, _ = fixed_point(observable.v, bits)
        return sum(1 for x in orbit if lo <= x < hi) / N
    if isinstance(observable, TrigTerm):
        pts = np.array([x >> (bits - 53) for x in orbit], dtype=np.float64) * 2.0**-53
        ph = 2 * math.pi * np.mod(observable.h * pts, 1.0)
        vals = np.cos(ph) if observable.part == "cos" else np.sin(ph)
        return math.fsum(vals) / N
    raise DomainError(f"unsupported observable {observable!r}")


# --- x q map and digits -----------------------------------------------------------------

@dataclass
class DigitMapSystem:
    """The map ``T x = {q x}`` on ``[0, 1)``."""

    q: int
    x: str
    precision_bits: int = DEFAULT_PRECISION_BITS

    def __post_init__(self):
        if int(self.q) != self.q or self.q < 2:
            raise DomainError("q must be an integer >= 2")
        self.x = canonical(self.x)
        f = as_fraction(self.x)
        if f is not None and not 0 <= f < 1:
            raise DomainError("x must lie in [0, 1)")

    def step(self) -> "DigitMapSystem":
        f = as_fraction(self.x)
        if f is None:
            raise DomainError("step is exact only for rational x")
        return DigitMapSystem(self.q, str((self.q * f) % 1), self.precision_bits)

    def to_json(self) -> dict:
        return {"q": self.q, "x": self.x, "precision_bits": self.precision_bits}


def qary_digits(sys: DigitMapSystem, count: int) -> list[int]:
    """Digits ``a_1..a_count`` with ``a_j = i`` iff ``T^{j-1} x`` lies in ``[i/q, (i+1)/q)``."""
    q = sys.q
    f = as_fraction(sys.x)
    out = []
    if f is not None:
        for _ in range(count):
            f *= q
            d = f.numerator // f.denominator
            out.append(d)
            f -= d
        return out
    bits = max(sys.precision_bits, math.ceil(count * math.log2(q)) + 64)
    v, e = fixed_point(sys.x, bits)
    if v < 0 or v >> bits:
        raise DomainError("x must lie in [0, 1)")
    mask = (1 << bits) - 1
    lo, hi = v - e, v + e
    for j in range(1, count + 1):
        lo, hi = lo * q, hi * q
        dl, dh = lo >> bits, hi >> bits
        if dl != dh:
            raise PrecisionError(f"digit {j} is uncertain; digits 1..{j - 1} are trustworthy",
                                 index=j - 1)
        out.append(int(dl))
        lo, hi = lo & mask, hi - (dh << bits)
    return out

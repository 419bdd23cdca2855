"""Concatenation-type normal numbers and their digit statistics.

A stream is the concatenation of base-``q`` expansions of ``floor(g(n))``
over ``n = 1, 2, ...`` (or over the primes).  ``floor(g(n)) = 0`` contributes
the single digit ``0``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .equidist import star_discrepancy
from .errors import CapacityError, DomainError, PrecisionError
from .generators import first_primes, floor_values_at, polynomial

MAX_DIGITS = 10**8
WINDOW_BITS = 64


def int_digits(n: int, q: int) -> list[int]:
    """Base-``q`` digits of ``n >= 0``, most significant first (``0`` gives ``[0]``)."""
    if n == 0:
        return [0]
    out = []
    while n:
        n, r = divmod(n, q)
        out.append(r)
    return out[::-1]


def _digits_of_block(values: np.ndarray, q: int) -> np.ndarray:
    """Concatenated digits of nonnegative int64 values (vectorised by digit length)."""
    values = np.asarray(values, dtype=np.int64)
    if len(values) == 0:
        return np.zeros(0, dtype=np.uint8)
    lengths = np.ones(len(values), dtype=np.int64)
    power = np.full(len(values), q, dtype=np.int64)
    while True:
        more = values >= power
        if not more.any():
            break
        lengths += more
        # avoid overflow once every value is below the current power
        power = np.where(more, power * q, power)
    ends = np.cumsum(lengths)
    out = np.empty(int(ends[-1]), dtype=np.uint8)
    starts = ends - lengths
    rest = values.copy()
    for pos in range(int(lengths.max()) - 1, -1, -1):
        sel = lengths > pos
        out[starts[sel] + pos] = (rest[sel] % q).astype(np.uint8)
        rest[sel] //= q
    return out


@dataclass
class DigitStream:
    """Lazy digit stream; ``prefix(N)`` is deterministic and cached."""

    q: int
    construction: dict
    _digits: np.ndarray = field(default=None, repr=False)
    _next: int = field(default=1, repr=False)
    position: int = 0
    uncertain: list = field(default_factory=list)

    def __post_init__(self):
        if int(self.q) != self.q or self.q < 2:
            raise DomainError("q must be an integer >= 2")
        if self._digits is None:
            self._digits = np.zeros(0, dtype=np.uint8)
        kind = self.construction.get("kind")
        if kind not in ("champernowne", "polynomial", "primes", "primes_with_polynomial",
                        "explicit"):
            raise DomainError(f"unknown construction {kind!r}")
        if kind in ("polynomial", "primes_with_polynomial"):
            self._spec = polynomial(self.construction["g"],
                                    argument="prime" if kind == "primes_with_polynomial" else "integer")
            self._next = int(self.construction.get("start", 1))

    @property
    def kind(self) -> str:
        return self.construction["kind"]

    def _values(self, lo: int, hi: int) -> list[int]:
        """Integers whose expansions are concatenated, for term indices ``lo..hi-1``."""
        kind = self.kind
        if kind == "champernowne":
            return list(range(lo, hi))
        if kind == "primes":
            return [int(p) for p in first_primes(hi - 1)[lo - 1:hi - 1]]
        vals = []
        for n in range(lo, hi):
            try:
                v = floor_values_at(self._spec, [n])[0][0]
            except PrecisionError:
                self.uncertain.append(n)
                raise
            if v < 0:
                raise DomainError(f"g is negative at n={n}")
            vals.append(v)
        return vals

    def _extend(self, count: int) -> None:
        if self.kind == "explicit":
            if count > len(self.construction["digits"]):
                raise DomainError("explicit stream is too short")
            self._digits = np.asarray(self.construction["digits"], dtype=np.uint8)
            return
        chunks = [self._digits]
        have = len(self._digits)
        batch = 1024
        while have < count:
            vals = self._values(self._next, self._next + batch)
            self._next += batch
            if vals and max(vals) >= (2**63 - 1) // self.q:
                block = np.asarray(list(itertools.chain.from_iterable(
                    int_digits(v, self.q) for v in vals)), dtype=np.uint8)
            else:
                block = _digits_of_block(np.asarray(vals, dtype=np.int64), self.q)
            chunks.append(block)
            have += len(block)
            batch = min(batch * 2, 1 << 20)
        self._digits = np.concatenate(chunks)

    def prefix(self, count: int) -> np.ndarray:
        if count < 0 or count > MAX_DIGITS:
            raise CapacityError(f"count must lie in [0, {MAX_DIGITS}]")
        if len(self._digits) < count:
            self._extend(count)
        return self._digits[:count].copy()

    def __iter__(self):
        return self

    def __next__(self) -> int:
        d = int(self.prefix(self.position + 1)[self.position])
        self.position += 1
        return d

    def text(self, count: int) -> str:
        if self.q > 36:
            raise DomainError("text export needs q <= 36")
        alphabet = "0123456789abcdefghijklmnopqrstuvwxyz"
        return "".join(alphabet[d] for d in self.prefix(count))

    def to_json(self) -> dict:
        return {"q": self.q, "construction": self.construction}


def champernowne(q: int) -> DigitStream:
    return DigitStream(q, {"kind": "champernowne"})


def champernowne_digits(q: int, count: int) -> np.ndarray:
    return champernowne(q).prefix(count)


def explicit_stream(digits, q: int) -> DigitStream:
    digits = [int(d) for d in digits]
    if any(not 0 <= d < q for d in digits):
        raise DomainError("digits must lie in {0..q-1}")
    return DigitStream(q, {"kind": "explicit", "digits": digits})


def concat_stream(kind: str, q: int, g: str | None = None, start: int | None = None) -> DigitStream:
    """Stream for ``polynomial`` (needs ``g``), ``primes`` or ``primes_with_polynomial``."""
    if kind == "primes":
        return DigitStream(q, {"kind": "primes"})
    if kind not in ("polynomial", "primes_with_polynomial"):
        raise DomainError(f"unknown construction {kind!r}")
    if g is None:
        raise DomainError(f"{kind} needs a polynomial g")
    spec = polynomial(g)
    if len(spec.params["coeffs"][0]) < 2:
        raise DomainError("g must be nonconstant")
    construction = {"kind": kind, "g": g}
    if start is not None:
        construction["start"] = int(start)
    return DigitStream(q, construction)


def concat_construction(kind: str, q: int, count: int, g: str | None = None,
                        start: int | None = None) -> np.ndarray:
    return concat_stream(kind, q, g, start).prefix(count)


# --- statistics -------------------------------------------------------------------------

def _as_digits(stream, N: int) -> tuple[np.ndarray, int]:
    if isinstance(stream, DigitStream):
        return stream.prefix(N), stream.q
    raise DomainError("expected a DigitStream")


def block_frequencies(stream: DigitStream, L: int, N: int) -> dict[tuple, float]:
    """Sliding-window frequencies of every length-``L`` block among the first ``N`` digits."""
    q = stream.q
    if not 1 <= L <= 8:
        raise DomainError("L must lie in [1, 8]")
    if N < q**L:
        raise DomainError(f"N must be at least q^L = {q**L}")
    d, _ = _as_digits(stream, N)
    codes = np.zeros(N - L + 1, dtype=np.int64)
    for j in range(L):
        codes = codes * q + d[j:N - L + 1 + j]
    counts = np.bincount(codes, minlength=q**L)
    total = N - L + 1
    blocks = itertools.product(range(q), repeat=L)
    return {b: float(counts[i] / total) for i, b in enumerate(blocks)}


def proxy_points(digits: np.ndarray, q: int, window_bits: int = WINDOW_BITS) -> np.ndarray:
    """``y_n = 0.d_{n+1} d_{n+2} ... d_{n+w}`` in base ``q`` with ``q^w ~ 2^window_bits``."""
    w = max(1, int(window_bits // np.log2(q)))
    n = len(digits) - w + 1
    if n < 1:
        raise DomainError("too few digits for the proxy window")
    y = np.zeros(n)
    # Horner from the least significant end keeps every partial sum in [0, 1)
    for j in range(w - 1, -1, -1):
        y = (y + digits[j:j + n]) / q
    return np.minimum(y, np.nextafter(1.0, 0.0))


@dataclass
class NormalityReport:
    N: int
    q: int
    frequencies: dict          # L -> {block string: frequency}
    max_deviation: dict        # L -> max |f - q^-L|
    discrepancy: float
    window_digits: int

    def to_json(self) -> dict:
        return {"N": self.N, "q": self.q,
                "frequencies": {str(L): t for L, t in self.frequencies.items()},
                "max_deviation": {str(L): v for L, v in self.max_deviation.items()},
                "overall_max_deviation": max(self.max_deviation.values()),
                "proxy_discrepancy": self.discrepancy,
                "window_digits": self.window_digits}


def normality_report(stream: DigitStream, L_max: int, N: int,
                     window_bits: int = WINDOW_BITS) -> NormalityReport:
    q = stream.q
    if N < q**L_max:
        raise DomainError(f"N must be at least q^L_max = {q**L_max}")
    freqs, devs = {}, {}
    for L in range(1, L_max + 1):
        f = block_frequencies(stream, L, N)
        freqs[L] = {"".join(map(str, b)) if q <= 10 else ",".join(map(str, b)): v
                    for b, v in f.items()}
        devs[L] = max(abs(v - q**-L) for v in f.values())
    digits = stream.prefix(N)
    w = max(1, int(window_bits // np.log2(q)))
    y = proxy_points(digits, q, window_bits)
    return NormalityReport(N, q, freqs, devs, star_discrepancy(y).dstar, w)

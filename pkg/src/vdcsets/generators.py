"""Primes, real-valued sequence families and integer candidate sets.

Every family value is carried as a fixed-point pair ``(V, E)`` at a scale of
``2**-P`` (``P = precision_bits``), meaning the true value lies in
``[(V - E) / 2**P, (V + E) / 2**P]``.  Rational families are evaluated
exactly.  Fractional parts are only emitted when the error bound is below
``2**-40``; floors only when both ends of the interval agree.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable

import mpmath
import numpy as np

from .errors import CapacityError, DomainError, EmptySetError, PrecisionError
from .exprs import Expr, as_fraction, canonical, constant, fixed_point, parse_polynomial

DEFAULT_PRECISION_BITS = 128
SIEVE_BOUND = 10**9
FRAC_ACCURACY_BITS = 40
# extra bits carried by mpmath so that a relative error of 2**-P holds after composition
GUARD_BITS = 32

KINDS = (
    "polynomial",
    "kronecker",
    "prime_power_shift",
    "entire_log_order",
    "power_log",
    "explicit",
    "difference",
)


# --- primes -------------------------------------------------------------------

def _small_sieve(limit: int) -> np.ndarray:
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p::p] = False
    return np.flatnonzero(is_prime)


def primes_up_to(limit: int, bound: int = SIEVE_BOUND, segment: int = 1 << 22) -> np.ndarray:
    """All primes ``<= limit`` in ascending order (segmented odd-only sieve)."""
    if limit < 2:
        raise DomainError("primes_up_to needs limit >= 2")
    if limit > bound:
        raise CapacityError(f"limit {limit} exceeds the sieve bound {bound}")
    if limit < segment:
        return _small_sieve(limit).astype(np.int64)
    base = _small_sieve(math.isqrt(limit) + 1)[1:]  # odd base primes
    chunks = [np.array([2], dtype=np.int64)]
    low = 3
    while low <= limit:
        high = min(low + 2 * segment, limit + 1)
        mask = np.ones((high - low + 1) // 2, dtype=bool)  # odd numbers low, low+2, ...
        for p in base:
            p2 = int(p) * int(p)
            if p2 >= high:
                break
            start = max(p2, ((low + p - 1) // p) * p)
            if start % 2 == 0:
                start += p
            mask[(start - low) // 2::p] = False
        vals = low + 2 * np.flatnonzero(mask).astype(np.int64)
        chunks.append(vals[vals <= limit])
        low = high if high % 2 == 1 else high + 1
    return np.concatenate(chunks)


@lru_cache(maxsize=8)
def _first_primes_cached(count: int) -> np.ndarray:
    n = max(count, 6)
    bound = int(n * (math.log(n) + math.log(math.log(n)))) + 10
    primes = primes_up_to(bound)
    return primes[:count]


def first_primes(count: int) -> np.ndarray:
    """The first ``count`` primes, ``p_1 = 2``."""
    if count < 1:
        raise DomainError("count must be positive")
    # round the cache key up so growing requests reuse one sieve
    key = 1 << max(10, (count - 1).bit_length())
    return _first_primes_cached(key)[:count]


def prime_at(indices: Iterable[int]) -> list[int]:
    idx = list(indices)
    if not idx:
        return []
    if min(idx) < 1:
        raise DomainError("prime index must be >= 1")
    table = first_primes(max(idx))
    return [int(table[i - 1]) for i in idx]


# --- sequence specifications ------------------------------------------------------

def _coef(value) -> str:
    return canonical(value)


def _real(value) -> str:
    return canonical(value)


@dataclass
class SequenceSpec:
    """Symbolic description of a real family ``x_n`` (scalar or vector valued).

    ``params`` holds one entry per output component; see the constructor
    helpers (:func:`polynomial`, :func:`kronecker`, ...) for the layout.
    """

    kind: str
    params: dict
    dimension: int = 1
    index_dim: int = 1
    precision_bits: int = DEFAULT_PRECISION_BITS

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown sequence kind {self.kind!r}")
        if self.dimension < 1 or self.index_dim < 1:
            raise DomainError("dimension and index_dim must be >= 1")
        if self.precision_bits < 64:
            raise DomainError("precision_bits must be >= 64")
        _validate(self)

    @property
    def start(self) -> int:
        if "start" in self.params:
            return int(self.params["start"])
        if self.kind == "power_log":
            return 1 if all(as_fraction(b) == 0 for b in self.params["log_powers"]) else 2
        if self.kind == "difference":
            return SequenceSpec.from_json(self.params["base"]).start
        return 1

    @property
    def argument(self) -> str:
        if self.kind in ("prime_power_shift",):
            return "prime"
        return self.params.get("argument", "integer")

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "params": _jsonable(self.params),
            "dimension": self.dimension,
            "index_dim": self.index_dim,
            "precision_bits": self.precision_bits,
        }

    @classmethod
    def from_json(cls, data: dict) -> "SequenceSpec":
        return cls(
            kind=data["kind"],
            params=dict(data["params"]),
            dimension=int(data.get("dimension", 1)),
            index_dim=int(data.get("index_dim", 1)),
            precision_bits=int(data.get("precision_bits", DEFAULT_PRECISION_BITS)),
        )

    def with_precision(self, bits: int) -> "SequenceSpec":
        return SequenceSpec(self.kind, dict(self.params), self.dimension, self.index_dim, bits)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, Fraction):
        return str(obj) if obj.denominator != 1 else int(obj)
    return obj


def _validate(spec: SequenceSpec) -> None:
    p, k = spec.params, spec.dimension
    if spec.kind == "polynomial":
        coeffs = p["coeffs"]
        if len(coeffs) != k or any(len(c) == 0 for c in coeffs):
            raise DomainError("polynomial needs one nonempty coefficient list per component")
        if spec.index_dim != 1:
            raise DomainError("polynomial families take a one-dimensional index")
        if p.get("argument", "integer") not in ("integer", "prime"):
            raise DomainError("polynomial argument must be 'integer' or 'prime'")
        for c in coeffs:
            for a in c:
                _coef(a)
    elif spec.kind == "kronecker":
        alpha = p["alpha"]
        if len(alpha) != k or any(len(row) != spec.index_dim for row in alpha):
            raise DomainError("kronecker alpha must be a dimension x index_dim matrix")
        if len(p.get("offset", [0] * k)) != k:
            raise DomainError("kronecker offset must have one entry per component")
    elif spec.kind == "prime_power_shift":
        if p.get("shift") not in (1, -1):
            raise DomainError("prime_power_shift needs shift +1 or -1")
        if len(p["exponents"]) != k or len(p.get("coefs", [1] * k)) != k:
            raise DomainError("prime_power_shift needs one exponent per component")
        for t in p["exponents"]:
            if constant(_real(t)).mp(prec=64) <= 0:
                raise DomainError("exponents must be positive")
    elif spec.kind == "power_log":
        if not (len(p["powers"]) == len(p["log_powers"]) == len(p.get("coefs", [1] * k)) == k):
            raise DomainError("power_log needs one power/log_power per component")
        for a, b in zip(p["powers"], p["log_powers"]):
            av = constant(_real(a)).mp(prec=64)
            if av <= 0:
                raise DomainError("power_log powers must be positive")
            fa = as_fraction(a)
            if fa is not None and fa.denominator == 1:
                bv = constant(_real(b)).mp(prec=64)
                if 0 <= bv <= 1:
                    raise DomainError(
                        f"power_log with integer power {a} needs log power outside [0, 1], got {b}")
    elif spec.kind == "entire_log_order":
        if len(p["exprs"]) != k or len(p["log_orders"]) != k:
            raise DomainError("entire_log_order needs one expression and order per component")
        for lam in p["log_orders"]:
            lv = Fraction(str(lam))
            if not (1 < lv < Fraction(4, 3)):
                raise DomainError(f"declared logarithmic order {lam} not in (1, 4/3)")
        for e in p["exprs"]:
            Expr(e)
    elif spec.kind == "explicit":
        pts = p["points"]
        if not pts or any(len(v) != k for v in pts):
            raise DomainError("explicit points must be nonempty vectors of length dimension")
    elif spec.kind == "difference":
        base = SequenceSpec.from_json(p["base"])
        h = p["shift"]
        if len(h) != base.index_dim or all(x == 0 for x in h):
            raise DomainError("difference shift must be a nonzero index vector")
        if any(x < 0 for x in h):
            raise DomainError("difference shift must lie in N^k")
        if base.dimension != k:
            raise DomainError("difference dimension must match its base")


# constructors ------------------------------------------------------------------

def _poly_coeffs(c) -> list:
    if isinstance(c, str):
        c = parse_polynomial(c)
    return [_coef(a) for a in c]


def polynomial(*components, argument: str = "integer",
               precision_bits: int = DEFAULT_PRECISION_BITS) -> SequenceSpec:
    """``polynomial("n^2")`` or ``polynomial([0, 0, 1], [0, 0, 0, 1])`` (ascending coefficients)."""
    coeffs = [_poly_coeffs(c) for c in components]
    return SequenceSpec("polynomial", {"coeffs": coeffs, "argument": argument},
                        dimension=len(coeffs), precision_bits=precision_bits)


def kronecker(*rows, offset=None, precision_bits: int = DEFAULT_PRECISION_BITS) -> SequenceSpec:
    """One row per component; a row is a scalar (``n * alpha``) or a list (``n . alpha``)."""
    alpha = [[_real(a) for a in row] if isinstance(row, (list, tuple)) else [_real(row)]
             for row in rows]
    offset = [_real(o) for o in (offset or [0] * len(alpha))]
    return SequenceSpec("kronecker", {"alpha": alpha, "offset": offset},
                        dimension=len(alpha), index_dim=len(alpha[0]),
                        precision_bits=precision_bits)


def prime_power_shift(exponents, shift: int = -1, coefs=None,
                      precision_bits: int = DEFAULT_PRECISION_BITS) -> SequenceSpec:
    """Components ``coef_i * (p_n + shift) ** exponent_i``."""
    exponents = [_real(t) for t in _listify(exponents)]
    coefs = [_real(c) for c in (_listify(coefs) if coefs is not None else [1] * len(exponents))]
    return SequenceSpec("prime_power_shift",
                        {"exponents": exponents, "shift": shift, "coefs": coefs},
                        dimension=len(exponents), precision_bits=precision_bits)


def power_log(powers, log_powers=0, coefs=None, start=None,
              precision_bits: int = DEFAULT_PRECISION_BITS) -> SequenceSpec:
    """Components ``coef_i * n ** power_i * log(n) ** log_power_i``."""
    powers = [_real(a) for a in _listify(powers)]
    log_powers = _listify(log_powers)
    if len(log_powers) == 1 and len(powers) > 1:
        log_powers = log_powers * len(powers)
    params = {
        "powers": powers,
        "log_powers": [_real(b) for b in log_powers],
        "coefs": [_real(c) for c in (_listify(coefs) if coefs is not None else [1] * len(powers))],
    }
    if start is not None:
        params["start"] = int(start)
    return SequenceSpec("power_log", params, dimension=len(powers), precision_bits=precision_bits)


def entire(exprs, log_orders, argument: str = "prime",
           precision_bits: int = DEFAULT_PRECISION_BITS) -> SequenceSpec:
    """Components ``f_i(p_n)`` (or ``f_i(n)``) for grammar expressions in ``x``."""
    exprs = [Expr(e).source for e in _listify(exprs)]
    orders = [str(Fraction(str(lam))) for lam in _listify(log_orders)]
    return SequenceSpec("entire_log_order",
                        {"exprs": exprs, "log_orders": orders, "argument": argument},
                        dimension=len(exprs), precision_bits=precision_bits)


def explicit(points, precision_bits: int = DEFAULT_PRECISION_BITS) -> SequenceSpec:
    pts = [[_real(v) for v in (p if isinstance(p, (list, tuple)) else [p])] for p in points]
    return SequenceSpec("explicit", {"points": pts}, dimension=len(pts[0]),
                        precision_bits=precision_bits)


def _listify(x) -> list:
    if isinstance(x, (list, tuple)):
        return list(x)
    return [x]


# --- evaluation core --------------------------------------------------------------

@dataclass
class _Column:
    """Values of one component at a list of indices."""

    bits: int
    exact: list | None = None      # ints or Fractions, when the component is rational
    V: list | None = None
    E: list | None = None
    mp: list | None = None         # mpmath values, when computed that way

    def fixed(self):
        if self.V is None:
            self.V, self.E = [], []
            for x in self.exact:
                v, r = divmod(x.numerator << self.bits, x.denominator)
                self.V.append(v)
                self.E.append(0 if r == 0 else 1)
        return self.V, self.E


def _poly_column(coeffs, args, bits) -> _Column:
    fr = [as_fraction(c) for c in coeffs]
    if all(f is not None for f in fr):
        if all(f.denominator == 1 for f in fr):
            ic = [int(f) for f in fr]
            vals = []
            for a in args:
                acc = 0
                for c in reversed(ic):
                    acc = acc * a + c
                vals.append(acc)
            return _Column(bits, exact=vals)
        vals = []
        for a in args:
            acc = Fraction(0)
            for c in reversed(fr):
                acc = acc * a + c
            vals.append(acc)
        return _Column(bits, exact=vals)
    fx = [fixed_point(c, bits) for c in coeffs]
    V, E = [], []
    for a in args:
        v = e = 0
        for c, ce in reversed(fx):
            v = v * a + c
            e = e * abs(a) + ce
        V.append(v)
        E.append(e + 1)
    return _Column(bits, V=V, E=E)


def _linear_column(alpha, offset, indices, bits) -> _Column:
    fr = [as_fraction(a) for a in alpha]
    fo = as_fraction(offset)
    if fo is not None and all(f is not None for f in fr):
        return _Column(bits, exact=[fo + sum(f * n for f, n in zip(fr, idx)) for idx in indices])
    fx = [fixed_point(a, bits) for a in alpha]
    ov, oe = fixed_point(offset, bits)
    V, E = [], []
    for idx in indices:
        V.append(ov + sum(c * n for (c, _), n in zip(fx, idx)))
        E.append(oe + sum(ce * abs(n) for (_, ce), n in zip(fx, idx)) + 1)
    return _Column(bits, V=V, E=E)


def _mp_column(fn, args, bits) -> _Column:
    """Evaluate ``fn(arg)`` with mpmath; assumes relative error 2**-bits after GUARD_BITS."""
    prec = bits + GUARD_BITS
    vals, V, E = [], [], []
    with mpmath.workprec(prec):
        for a in args:
            y = fn(a)
            if not mpmath.isfinite(y):
                raise PrecisionError(f"non-finite value at argument {a}", index=a)
            extra = max(0, int(mpmath.mag(y)))
            with mpmath.workprec(prec + extra):
                v = int(mpmath.floor(mpmath.ldexp(y, bits)))
            vals.append(y)
            V.append(v)
            E.append(int(abs(y)) + 2)
    return _Column(bits, V=V, E=E, mp=vals)


def _index_tuples(spec, indices) -> list[tuple]:
    out = []
    for i in indices:
        t = tuple(int(x) for x in i) if isinstance(i, (tuple, list, np.ndarray)) else (int(i),)
        if len(t) != spec.index_dim:
            raise DomainError(f"index {i} does not match index_dim {spec.index_dim}")
        out.append(t)
    return out


def _columns(spec: SequenceSpec, indices) -> list[_Column]:
    idx = _index_tuples(spec, indices)
    bits = spec.precision_bits
    p = spec.params
    kind = spec.kind
    if kind == "polynomial":
        flat = [t[0] for t in idx]
        args = prime_at(flat) if spec.argument == "prime" else flat
        return [_poly_column(c, args, bits) for c in p["coeffs"]]
    if kind == "kronecker":
        offs = p.get("offset", [0] * spec.dimension)
        return [_linear_column(row, o, idx, bits) for row, o in zip(p["alpha"], offs)]
    if kind == "prime_power_shift":
        ps = prime_at(t[0] for t in idx)
        cols = []
        for theta, coef in zip(p["exponents"], p.get("coefs", [1] * spec.dimension)):
            ft, fc = as_fraction(theta), as_fraction(coef)
            if ft is not None and ft.denominator == 1 and fc is not None:
                cols.append(_Column(bits, exact=[fc * Fraction(q + p["shift"]) ** int(ft) for q in ps]))
                continue
            th, cf = constant(theta), constant(_real(coef))
            s = p["shift"]

            def fn(q, th=th, cf=cf, s=s):
                prec = mpmath.mp.prec
                return cf.mp(prec=prec) * mpmath.power(mpmath.mpf(q + s), th.mp(prec=prec))

            cols.append(_mp_column(fn, ps, bits))
        return cols
    if kind == "power_log":
        ns = [t[0] for t in idx]
        if min(ns) < 1:
            raise DomainError("power_log is defined for n >= 1")
        cols = []
        for a, b, c in zip(p["powers"], p["log_powers"], p.get("coefs", [1] * spec.dimension)):
            fa, fb, fc = as_fraction(a), as_fraction(b), as_fraction(c)
            if fb == 0 and fa is not None and fa.denominator == 1 and fc is not None:
                cols.append(_Column(bits, exact=[fc * Fraction(n) ** int(fa) for n in ns]))
                continue
            if fb is not None and fb != 0 and min(ns) < 2:
                raise DomainError("power_log with nonzero log power needs n >= 2")
            ea, eb, ec = constant(a), constant(b), constant(c)

            def fn(n, ea=ea, eb=eb, ec=ec, fb=fb):
                prec = mpmath.mp.prec
                y = ec.mp(prec=prec) * mpmath.power(mpmath.mpf(n), ea.mp(prec=prec))
                if fb != 0:
                    y *= mpmath.power(mpmath.log(n), eb.mp(prec=prec))
                return y

            cols.append(_mp_column(fn, ns, bits))
        return cols
    if kind == "entire_log_order":
        ns = [t[0] for t in idx]
        args = prime_at(ns) if spec.argument == "prime" else ns
        cols = []
        for src in p["exprs"]:
            ex = Expr(src)
            cols.append(_mp_column(lambda x, ex=ex: ex.mp(mpmath.mpf(x), prec=mpmath.mp.prec),
                                   args, bits))
        return cols
    if kind == "explicit":
        pts = p["points"]
        start = spec.start
        cols = []
        for c in range(spec.dimension):
            vals = []
            for t in idx:
                j = t[0] - start
                if not 0 <= j < len(pts):
                    raise DomainError(f"index {t[0]} outside the explicit point list")
                vals.append(pts[j][c])
            fr = [as_fraction(v) for v in vals]
            if all(f is not None for f in fr):
                cols.append(_Column(bits, exact=fr))
            else:
                fx = [fixed_point(v, bits) for v in vals]
                cols.append(_Column(bits, V=[v for v, _ in fx], E=[e for _, e in fx]))
        return cols
    # difference
    base = SequenceSpec.from_json(p["base"]).with_precision(bits)
    h = tuple(p["shift"])
    shifted = [tuple(a + b for a, b in zip(t, h)) for t in idx]
    upper = _columns(base, shifted)
    lower = _columns(base, idx)
    cols = []
    for u, lo in zip(upper, lower):
        if u.exact is not None and lo.exact is not None:
            cols.append(_Column(bits, exact=[a - b for a, b in zip(u.exact, lo.exact)]))
        else:
            uv, ue = u.fixed()
            lv, le = lo.fixed()
            cols.append(_Column(bits, V=[a - b for a, b in zip(uv, lv)],
                                E=[a + b for a, b in zip(ue, le)]))
    return cols


def _check_frac_accuracy(col: _Column, indices) -> None:
    if col.exact is not None:
        return
    limit = 1 << (col.bits - FRAC_ACCURACY_BITS)
    for i, e in enumerate(col.E):
        if e > limit:
            raise PrecisionError(
                f"fractional part not accurate to 2^-{FRAC_ACCURACY_BITS} at index {indices[i]} "
                f"with {col.bits} bits; raise precision_bits", index=indices[i])


def _frac_array(col: _Column) -> np.ndarray:
    if col.exact is not None:
        if all(x.denominator == 1 for x in col.exact):
            return np.zeros(len(col.exact))
        return np.array([float(x - (x.numerator // x.denominator)) for x in col.exact])
    mask = (1 << col.bits) - 1
    shift = col.bits - 53
    return np.array([((v & mask) >> shift) for v in col.V], dtype=np.float64) / 2.0**53


def _index_range(spec: SequenceSpec, count: int, start: int | None):
    if count < 1:
        raise DomainError("count must be positive")
    s = spec.start if start is None else start
    return list(range(s, s + count))


def fractional_parts_at(spec: SequenceSpec, indices) -> np.ndarray:
    """``{x_n}`` at the given indices, shape ``(len(indices), dimension)``."""
    indices = list(indices)
    cols = _columns(spec, indices)
    for col in cols:
        _check_frac_accuracy(col, indices)
    return np.column_stack([_frac_array(col) for col in cols])


def fractional_parts(spec: SequenceSpec, count: int, start: int | None = None) -> np.ndarray:
    """``{x_n}`` for ``count`` consecutive indices from the family's start."""
    return fractional_parts_at(spec, _index_range(spec, count, start))


def generate_family(spec: SequenceSpec, count: int, start: int | None = None) -> list[tuple]:
    """Pre-mod-1 values ``x_n`` as tuples of Fractions (exact kinds) or mpmath reals."""
    indices = _index_range(spec, count, start)
    cols = _columns(spec, indices)
    for col in cols:
        _check_frac_accuracy(col, indices)
    out_cols = []
    for col in cols:
        if col.exact is not None:
            out_cols.append(col.exact)
        elif col.mp is not None:
            out_cols.append(col.mp)
        else:
            with mpmath.workprec(col.bits + 64):
                out_cols.append([mpmath.ldexp(mpmath.mpf(v), -col.bits) for v in col.V])
    return list(zip(*out_cols))


def floor_values_at(spec: SequenceSpec, indices) -> list[tuple[int, ...]]:
    """Certified ``floor(x_n)`` per component; raises PrecisionError when uncertain."""
    indices = list(indices)
    cols = _columns(spec, indices)
    out_cols = []
    for col in cols:
        if col.exact is not None:
            out_cols.append([x.numerator // x.denominator for x in col.exact])
            continue
        vals = []
        for i, (v, e) in enumerate(zip(col.V, col.E)):
            lo, hi = (v - e) >> col.bits, (v + e) >> col.bits
            if lo != hi:
                lo = _exact_floor(spec, len(out_cols), indices[i])
                if lo is None:
                    raise PrecisionError(
                        f"floor is uncertain at index {indices[i]} with {col.bits} bits",
                        index=indices[i])
            vals.append(lo)
        out_cols.append(vals)
    return list(zip(*out_cols))


def iroot(x: int, b: int) -> int:
    """Largest integer ``r >= 0`` with ``r**b <= x``."""
    if x < 0:
        raise DomainError("iroot of a negative number")
    if x < 2 or b == 1:
        return x
    r = 1 << -(-x.bit_length() // b)  # overestimate
    while True:
        s = ((b - 1) * r + x // r ** (b - 1)) // b
        if s >= r:
            break
        r = s
    while r ** b > x:
        r -= 1
    while (r + 1) ** b <= x:
        r += 1
    return r


def _exact_floor(spec: SequenceSpec, component: int, index: int) -> int | None:
    """Exact ``floor(c * m**(a/b))`` for rational-power kinds, else None."""
    p = spec.params
    if spec.kind == "prime_power_shift":
        m = prime_at([index])[0] + p["shift"]
        theta, coef = p["exponents"][component], p.get("coefs", [1] * spec.dimension)[component]
    elif spec.kind == "power_log" and as_fraction(p["log_powers"][component]) == 0:
        m = index
        theta, coef = p["powers"][component], p.get("coefs", [1] * spec.dimension)[component]
    else:
        return None
    ft, fc = as_fraction(theta), as_fraction(coef)
    if ft is None or fc is None or fc < 0 or m < 0:
        return None
    a, b = ft.numerator, ft.denominator
    if a < 0:
        return None
    num = fc.numerator ** b * m ** a
    den = fc.denominator ** b
    return iroot(num // den, b)


def floor_values(spec: SequenceSpec, count: int, start: int | None = None) -> list[tuple[int, ...]]:
    return floor_values_at(spec, _index_range(spec, count, start))


def write_family_csv(fh, spec: SequenceSpec, count: int, digits: int | None = None) -> None:
    """CSV with columns ``index,value_1..value_k`` of the pre-mod-1 values."""
    digits = digits or int(spec.precision_bits * math.log10(2))
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["index"] + [f"value_{i + 1}" for i in range(spec.dimension)])
    for n, row in zip(_index_range(spec, count, None), generate_family(spec, count)):
        writer.writerow([n] + [_fmt_real(v, digits) for v in row])


def _fmt_real(v, digits: int) -> str:
    if isinstance(v, Fraction):
        if v.denominator == 1:
            return str(v.numerator)
        with mpmath.workdps(digits + 5):
            return mpmath.nstr(mpmath.mpf(v.numerator) / v.denominator, digits)
    return mpmath.nstr(v, digits)


# --- integer sets ------------------------------------------------------------------

@dataclass
class SetSpec:
    """Enumerable candidate set ``H = {floor(g(n))}`` in ``Z^k \\ {0}``."""

    generator: SequenceSpec
    horizon: int = 10**6

    def __post_init__(self):
        if self.horizon < 1:
            raise DomainError("horizon must be >= 1")
        if self.generator.index_dim != 1:
            raise DomainError("set generators take a one-dimensional index")

    @property
    def dimension(self) -> int:
        return self.generator.dimension

    def to_json(self) -> dict:
        return {"generator": self.generator.to_json(), "dimension": self.dimension,
                "horizon": self.horizon}

    @classmethod
    def from_json(cls, data: dict) -> "SetSpec":
        return cls(SequenceSpec.from_json(data["generator"]), int(data.get("horizon", 10**6)))


@dataclass
class SetSample:
    elements: list[tuple[int, ...]]
    indices: list[int]
    dropped: int = 0

    def flat(self) -> list[int]:
        return [e[0] for e in self.elements]


def generate_set(set_spec: SetSpec, count: int) -> SetSample:
    """Floors of the first ``count`` generator values, zero vectors dropped."""
    if count > set_spec.horizon:
        raise DomainError(f"count {count} exceeds horizon {set_spec.horizon}")
    indices = _index_range(set_spec.generator, count, None)
    values = floor_values_at(set_spec.generator, indices)
    elements, kept = [], []
    for n, v in zip(indices, values):
        if any(v):
            elements.append(v)
            kept.append(n)
    if not elements:
        rest = range(indices[-1] + 1, set_spec.generator.start + set_spec.horizon)
        if not any(any(v) for v in floor_values_at(set_spec.generator, rest)) if rest else True:
            raise EmptySetError(f"all elements are zero up to horizon {set_spec.horizon}")
    return SetSample(elements, kept, dropped=count - len(elements))


def set_elements_up_to(set_spec: SetSpec, bound: int, chunk: int = 4096) -> list[int]:
    """Distinct positive elements of a one-dimensional set ``H`` that are ``<= bound``.

    Enumeration stops once a whole chunk of generator values lies above the bound,
    which is correct for eventually increasing generators.
    """
    if set_spec.dimension != 1:
        raise DomainError("set must be one-dimensional")
    gen = set_spec.generator
    found = set()
    n = gen.start
    last = gen.start + set_spec.horizon
    while n < last:
        idx = range(n, min(n + chunk, last))
        vals = [v[0] for v in floor_values_at(gen, idx)]
        found.update(x for x in vals if 1 <= x <= bound)
        if min(vals) > bound:
            break
        n += chunk
    return sorted(found)


# --- logarithmic order ---------------------------------------------------------------

@dataclass
class LogOrderEstimate:
    value: float
    grid: list[float]
    ratios: list[float] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"value": self.value, "grid": self.grid, "ratios": self.ratios}


def max_modulus(f: Expr, r, angles: int = 64, prec: int = 128):
    """Sampled ``S(r) = max |f(z)|`` over ``|z| = r`` (maximum principle)."""
    with mpmath.workprec(prec):
        best = abs(f.mp(mpmath.mpf(r), prec=prec))
        for j in range(1, angles):
            z = mpmath.mpf(r) * mpmath.expjpi(mpmath.mpf(2 * j) / angles)
            best = max(best, abs(f.mp(z, prec=prec)))
    return best


def log_order_estimate(f, r_max: float, step: float = 0.5, angles: int = 64,
                       prec: int = 128) -> LogOrderEstimate:
    """Grid proxy for the logarithmic order ``limsup log log S(r) / log log r``.

    The grid is ``r = 10, 10**(1 + step), ...`` up to ``r_max``.
    """
    if r_max < 10:
        raise DomainError("r_max must be >= 10")
    f = Expr(f)
    grid, ratios = [], []
    e = 1.0
    while 10**e <= r_max * (1 + 1e-12):
        grid.append(10**e)
        e += step
    with mpmath.workprec(prec):
        for r in grid:
            s = max_modulus(f, r, angles, prec)
            if not mpmath.isfinite(s):
                raise PrecisionError(f"S(r) overflowed at r={r}")
            if s <= mpmath.e:
                raise DomainError(f"S({r}) <= e; logarithmic order undefined there")
            ratio = mpmath.log(mpmath.log(s)) / mpmath.log(mpmath.log(mpmath.mpf(r)))
            ratios.append(float(ratio))
    return LogOrderEstimate(max(ratios), grid, ratios)

"""Necessary-condition refutations and sufficient-condition screening.

Refutations rest on three facts about subsets ``H`` of the positive integers:

* if ``H`` meets some ``qN`` in only finitely many points, ``H`` is not vdC;
* for a polynomial ``P`` with ``P(z) -> +inf`` the set ``{P(n)}`` is vdC iff
  ``P(z) = 0 (mod q)`` is solvable for every ``q``;
* ``{ap + b : p prime}`` is vdC iff ``|a| = |b|``.

Every certificate carries a ``recheck`` block: the parameters needed to
re-derive the verdict independently (see :meth:`RefutationCertificate.recheck`).
"""

from __future__ import annotations

import math
import random
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .equidist import DEFAULT_MAX_FREQUENCY, DEFAULT_THRESHOLD_FACTOR, ud_test_points
from .errors import CapacityError, DomainError, PrecisionError
from .exprs import as_fraction, fixed_point, parse_polynomial
from .generators import (DEFAULT_PRECISION_BITS, FRAC_ACCURACY_BITS, SequenceSpec, SetSpec,
                         floor_values_at, polynomial)

FACTORIAL_BUDGET_BITS = 1 << 16
KMF_MAX_Q = 10**5
KMF_COMBO_LIMIT = 4096


# --- integer polynomials --------------------------------------------------------------

def integer_polynomial(P) -> list[int]:
    """Ascending integer coefficients from a list or a string such as ``"z^2+1"``."""
    coeffs = parse_polynomial(P) if isinstance(P, str) else list(P)
    out = []
    for c in coeffs:
        f = as_fraction(c)
        if f is None or f.denominator != 1:
            raise DomainError(f"coefficient {c!r} is not an integer")
        out.append(int(f))
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return out


def poly_mod(coeffs, z: int, m: int) -> int:
    acc = 0
    for c in reversed(coeffs):
        acc = (acc * z + c) % m
    return acc


def _format_poly(coeffs) -> str:
    terms = []
    for i, c in reversed(list(enumerate(coeffs))):
        if c == 0:
            continue
        mono = "" if i == 0 else ("z" if i == 1 else f"z^{i}")
        if mono and abs(c) == 1:
            body = mono
        else:
            body = f"{abs(c)}*{mono}" if mono else str(abs(c))
        terms.append(("-" if c < 0 else "+") + body)
    if not terms:
        return "0"
    s = "".join(terms)
    return s[1:] if s[0] == "+" else s


# --- certificates and verdicts ----------------------------------------------------------

@dataclass
class RefutationCertificate:
    kind: str            # finite_multiples | progression_divisibility | congruence_obstruction | shifted_prime
    params: dict
    proof_mode: str = "exact"   # exact | empirical up to horizon

    def to_json(self) -> dict:
        return {"kind": self.kind, "proof_mode": self.proof_mode, "recheck": self.params}

    @classmethod
    def from_json(cls, data: dict) -> "RefutationCertificate":
        return cls(data["kind"], dict(data["recheck"]), data.get("proof_mode", "exact"))

    def recheck(self) -> bool:
        """Re-derive the obstruction from the stored parameters alone."""
        p = self.params
        if self.kind == "progression_divisibility":
            a, b = p["a"], p["b"]
            # every element a n + b is congruent to b mod a, and a does not divide b
            return a >= 1 and b % a != 0 and all((a * n + b) % a == b % a for n in range(1, a + 1))
        if self.kind == "congruence_obstruction":
            coeffs, q = p["coeffs"], p["q"]
            return all(poly_mod(coeffs, z, q) != 0 for z in range(q))
        if self.kind == "shifted_prime":
            a, b, q = p["a"], p["b"], p["q"]
            if abs(a) == abs(b):
                return False
            if p["obstruction"] == "a_does_not_divide_b":
                return q == abs(a) and b % q != 0
            d = abs(b) // math.gcd(a, b)
            return (q == abs(b) and a % b != 0 and d == p["d"] and d > 1
                    and p["exceptional_primes"] == ([d] if _is_prime(d) else []))
        if self.kind == "finite_multiples":
            q = p["q"]
            if self.proof_mode == "exact":
                if p.get("finite_set"):
                    return True
                return not _residue_roots(p["numerator_coeffs"], p["denominator"], q,
                                          p["argument"])
            set_spec = SetSpec.from_json(p["set"])
            horizon = p["horizon"]
            values = floor_values_at(set_spec.generator,
                                     range(set_spec.generator.start,
                                           set_spec.generator.start + horizon))
            found = [v[0] for v in values if v[0] and v[0] % q == 0]
            return found == p["multiples_found"]
        raise DomainError(f"unknown certificate kind {self.kind!r}")


@dataclass
class Verdict:
    verdict: str                 # vdC | not_vdC
    certificate: RefutationCertificate | None = None
    evidence: dict = field(default_factory=dict)

    @property
    def is_vdc(self) -> bool:
        return self.verdict == "vdC"

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "certificate": self.certificate.to_json() if self.certificate else None,
            "evidence": self.evidence,
        }


# --- finite multiples ----------------------------------------------------------------------

def _rational_poly(spec: SequenceSpec):
    """``(Q, D)`` with ``P = Q / D`` and ``Q`` integral, or None when not exactly rational."""
    if spec.kind != "polynomial" or spec.dimension != 1 or "start" in spec.params:
        return None
    fr = [as_fraction(c) for c in spec.params["coeffs"][0]]
    if any(f is None for f in fr):
        return None
    D = 1
    for f in fr:
        D = D * f.denominator // math.gcd(D, f.denominator)
    return [int(f * D) for f in fr], D


def _residue_roots(Q, D: int, q: int, argument: str) -> list[int]:
    """Residues ``r mod qD`` (coprime to qD for prime arguments) with ``q | Q(r)/D``.

    ``Q(n) mod qD`` has period ``qD`` in ``n``.  For prime arguments, Dirichlet's
    theorem puts infinitely many primes in exactly the coprime classes.
    """
    T = q * D
    out = []
    for r in range(T):
        if argument == "prime" and math.gcd(r, T) != 1:
            continue
        if poly_mod(Q, r, T) == 0:
            out.append(r)
    return out


def refute_by_multiples(set_spec: SetSpec, q_range, horizon: int | None = None
                        ) -> RefutationCertificate | None:
    """First ``q`` for which ``H`` meets ``qN`` finitely often, with a certificate.

    Rational polynomial generators (integer or prime argument) are decided
    exactly by residue analysis.  Other generators are screened empirically:
    ``q`` is reported when no multiple of ``q`` occurs in the second half of
    the horizon, and the certificate is marked ``empirical up to horizon``.
    """
    if set_spec.dimension != 1:
        raise DomainError("refute_by_multiples works on one-dimensional sets")
    horizon = horizon or set_spec.horizon
    if horizon < 1000:
        raise DomainError("horizon must be >= 1000")
    gen = set_spec.generator
    exact = _rational_poly(gen)
    if exact is not None:
        Q, D = exact
        finite_set = len(Q) <= 1
        for q in q_range:
            q = int(q)
            if q < 1:
                raise DomainError("moduli must be positive")
            if finite_set or not _residue_roots(Q, D, q, gen.argument):
                found = [v[0] for v in floor_values_at(gen, range(gen.start, gen.start + min(horizon, 10**4)))
                         if v[0] and v[0] % q == 0]
                return RefutationCertificate("finite_multiples", {
                    "q": q, "set": set_spec.to_json(), "numerator_coeffs": Q, "denominator": D,
                    "argument": gen.argument, "finite_set": finite_set,
                    "multiples_found": found[:50], "horizon": horizon,
                }, "exact")
        return None
    values = [v[0] for v in floor_values_at(gen, range(gen.start, gen.start + horizon))]
    tail = values[horizon // 2:]
    for q in q_range:
        q = int(q)
        if q < 1:
            raise DomainError("moduli must be positive")
        if not any(v and v % q == 0 for v in tail):
            found = [v for v in values if v and v % q == 0]
            return RefutationCertificate("finite_multiples", {
                "q": q, "set": set_spec.to_json(), "multiples_found": found,
                "horizon": horizon,
            }, "empirical up to horizon")
    return None


# --- Kamae–Mendès-France congruence criterion ----------------------------------------------

@dataclass
class CongruenceVerdict:
    coeffs: list[int]
    q_max: int
    roots: dict                   # q -> smallest root (None at an obstruction)
    verdict: str                  # all_roots_found | obstruction_at_q
    obstruction_q: int | None = None
    shortcut: str | None = None

    @property
    def certificate(self) -> RefutationCertificate | None:
        if self.obstruction_q is None:
            return None
        return RefutationCertificate("congruence_obstruction",
                                     {"coeffs": self.coeffs, "q": self.obstruction_q})

    def to_json(self) -> dict:
        out = {
            "polynomial": _format_poly(self.coeffs),
            "coeffs": self.coeffs,
            "q_max": self.q_max,
            "verdict": self.verdict,
            "obstruction_q": self.obstruction_q,
            "roots": [[q, z] for q, z in sorted(self.roots.items())],
            "shortcut": self.shortcut,
            "scope": ("complete refutation" if self.obstruction_q is not None
                      else f"verified up to q_max={self.q_max}"),
        }
        cert = self.certificate
        if cert is not None:
            out["certificate"] = cert.to_json()
        return out


@lru_cache(maxsize=4)
def _spf_table(limit: int) -> np.ndarray:
    spf = np.arange(limit + 1, dtype=np.int64)
    for p in range(2, math.isqrt(limit) + 1):
        if spf[p] == p:
            block = spf[p * p::p]
            np.minimum(block, p, out=block)
    return spf


def factorize(n: int, spf=None) -> list[tuple[int, int]]:
    if spf is None or n >= len(spf):
        spf = _spf_table(max(n, 16))
    out = []
    while n > 1:
        p = int(spf[n])
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        out.append((p, e))
    return out


def smallest_root_naive(coeffs, q: int) -> int | None:
    for z in range(q):
        if poly_mod(coeffs, z, q) == 0:
            return z
    return None


class _RootCache:
    """Roots of ``P`` modulo prime powers, lifted one power at a time."""

    def __init__(self, coeffs):
        self.coeffs = coeffs
        self.cache = {}

    def roots(self, p: int, e: int) -> list[int]:
        key = (p, e)
        if key not in self.cache:
            if e == 1:
                found = [z for z in range(p) if poly_mod(self.coeffs, z, p) == 0]
            else:
                lower = p ** (e - 1)
                pe = lower * p
                # every root mod p^e reduces to a root mod p^(e-1)
                found = sorted(r + t * lower for r in self.roots(p, e - 1) for t in range(p)
                               if poly_mod(self.coeffs, r + t * lower, pe) == 0)
            self.cache[key] = found
        return self.cache[key]


def smallest_root_crt(coeffs, q: int, cache: _RootCache | None = None, spf=None) -> int | None:
    """Smallest root mod ``q`` from roots mod its prime-power factors combined by CRT."""
    if q == 1:
        return 0
    cache = cache or _RootCache(coeffs)
    parts = []
    for p, e in factorize(q, spf):
        rs = cache.roots(p, e)
        if not rs:
            return None
        parts.append((p ** e, rs))
    combos = 1
    for _, rs in parts:
        combos *= len(rs)
    if combos > KMF_COMBO_LIMIT:
        # roots exist; the smallest is found by a direct scan
        return smallest_root_naive(coeffs, q)
    residues, modulus = [0], 1
    for m, rs in parts:
        inv = pow(modulus, -1, m)
        residues = [r0 + modulus * (((r - r0) * inv) % m) for r0 in residues for r in rs]
        modulus *= m
    return min(residues)


def kmf_criterion(P, q_max: int) -> CongruenceVerdict:
    """Check solvability of ``P(z) = 0 (mod q)`` for ``q = 1..q_max``.

    Stops at the first ``q`` without a root; that is a complete refutation.
    ``all_roots_found`` only covers ``q <= q_max``.
    """
    coeffs = integer_polynomial(P)
    if len(coeffs) < 2:
        raise DomainError("P must be nonconstant")
    if coeffs[-1] <= 0:
        raise DomainError("P(z) must tend to +infinity (positive leading coefficient)")
    if not 1 <= q_max <= KMF_MAX_Q:
        raise DomainError(f"q_max must lie in [1, {KMF_MAX_Q}]")
    if coeffs[0] == 0:
        return CongruenceVerdict(coeffs, q_max, {q: 0 for q in range(1, q_max + 1)},
                                 "all_roots_found", shortcut="P(0)=0: root 0 for every q")
    cache = _RootCache(coeffs)
    spf = _spf_table(max(q_max, 16))
    roots = {}
    for q in range(1, q_max + 1):
        z = smallest_root_crt(coeffs, q, cache, spf)
        roots[q] = z
        if z is None:
            return CongruenceVerdict(coeffs, q_max, roots, "obstruction_at_q", obstruction_q=q)
    return CongruenceVerdict(coeffs, q_max, roots, "all_roots_found")


# --- progressions and shifted primes ----------------------------------------------------------

def progression_verdict(a: int, b: int) -> Verdict:
    """``{a n + b : n >= 1}`` is vdC iff ``a | b``."""
    if a < 1:
        raise DomainError("a must be >= 1")
    if b % a != 0:
        cert = RefutationCertificate("progression_divisibility", {"a": a, "b": b, "q": a,
                                                                   "residue": b % a})
        return Verdict("not_vdC", cert, {"reason": f"a n + b = {b % a} (mod {a}) for every n, "
                                                   "so H meets aN nowhere"})
    kmf = kmf_criterion([b, a], 24)
    return Verdict("vdC", None, {
        "reason": "a | b: a z + b has the root -b/a modulo every q",
        "kmf_roots": [[q, z] for q, z in sorted(kmf.roots.items())],
    })


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, math.isqrt(n) + 1))


def shifted_prime_verdict(a: int, b: int) -> Verdict:
    """``{a p + b : p prime}`` is vdC iff ``|a| = |b|``."""
    if a == 0 or b == 0:
        raise DomainError("a and b must be nonzero")
    if abs(a) == abs(b):
        sign = "+" if a == b else "-"
        return Verdict("vdC", None, {"reason": f"a p + b = a (p {sign} 1): image of a shifted "
                                               "prime set under x -> a x"})
    if b % a != 0:
        q = abs(a)
        cert = RefutationCertificate("shifted_prime", {
            "a": a, "b": b, "q": q, "obstruction": "a_does_not_divide_b",
            "residue": b % q})
        return Verdict("not_vdC", cert, {"reason": f"a p + b = {b % q} (mod {q}) for every p"})
    q = abs(b)
    d = q // math.gcd(a, b)
    exceptional = [d] if _is_prime(d) else []
    cert = RefutationCertificate("shifted_prime", {
        "a": a, "b": b, "q": q, "obstruction": "b_does_not_divide_a", "d": d,
        "exceptional_primes": exceptional})
    return Verdict("not_vdC", cert, {
        "reason": f"a p + b = a p (mod {q}) vanishes only when {d} | p, i.e. for finitely many p"})


# --- D_q filter and the sufficient-condition screen -------------------------------------------

def _as_components(g) -> list[SequenceSpec]:
    """Split ``g`` (a vector spec or a list of scalar specs / polynomial strings) into scalars."""
    if isinstance(g, SequenceSpec):
        g = [g]
    out = []
    for spec in g:
        if isinstance(spec, str):
            spec = polynomial(spec)
        if spec.dimension == 1:
            out.append(spec)
            continue
        if spec.kind != "polynomial":
            raise DomainError("vector generators must be given as a list of scalar specs")
        for c in spec.params["coeffs"]:
            out.append(SequenceSpec("polynomial", {"coeffs": [c],
                                                   "argument": spec.params.get("argument", "integer")},
                                    precision_bits=spec.precision_bits))
    if not out:
        raise DomainError("g must contain at least one function")
    return out


def _component_values(components, indices) -> list[list[int]]:
    return [[v[0] for v in floor_values_at(c, indices)] for c in components]


def rational_rank(rows) -> int:
    """Rank over Q by fraction-exact Gaussian elimination."""
    m = [[Fraction(x) for x in row] for row in rows]
    rank, col = 0, 0
    ncols = len(m[0]) if m else 0
    while rank < len(m) and col < ncols:
        piv = next((i for i in range(rank, len(m)) if m[i][col] != 0), None)
        if piv is None:
            col += 1
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for i in range(len(m)):
            if i != rank and m[i][col] != 0:
                f = m[i][col] / m[rank][col]
                m[i] = [x - f * y for x, y in zip(m[i], m[rank])]
        rank += 1
        col += 1
    return rank


def _sample_indices(components, count: int) -> list[int]:
    start = max(c.start for c in components)
    return list(range(start, start + count))


def select_basis(g, samples: int = 16) -> list[int]:
    """Greedy maximal subfamily whose sampled value columns are Q-independent."""
    comps = _as_components(g)
    idx = _sample_indices(comps, max(samples, 2 * len(comps)))
    cols = _component_values(comps, idx)
    basis = []
    for i in range(len(comps)):
        trial = basis + [i]
        rows = [[cols[j][r] for j in trial] for r in range(len(idx))]
        if rational_rank(rows) == len(trial):
            basis = trial
    return basis


def check_basis(g, basis_indices) -> int:
    """Exact rank of the ``2m x m`` matrix of sampled basis values; warns when deficient."""
    comps = _as_components(g)
    m = len(basis_indices)
    idx = _sample_indices(comps, 2 * m)
    cols = _component_values([comps[i] for i in basis_indices], idx)
    rows = [[cols[j][r] for j in range(m)] for r in range(len(idx))]
    rank = rational_rank(rows)
    if rank < m:
        warnings.warn(f"basis {list(basis_indices)} has sampled rank {rank} < {m}; "
                      "the functions are not Q-linearly independent", stacklevel=3)
    return rank


def _factorial(q: int, budget_bits: int) -> int:
    if q < 1:
        raise DomainError("q must be >= 1")
    f = math.factorial(q)
    if f.bit_length() > budget_bits:
        raise CapacityError(f"{q}! has {f.bit_length()} bits, over the budget {budget_bits}")
    return f


def dq_enumerate(g, basis_indices, q: int, horizon: int, limit: int | None = None,
                 budget_bits: int = FACTORIAL_BUDGET_BITS, chunk: int = 1 << 15
                 ) -> tuple[list[int], list[tuple[int, ...]]]:
    """Indices ``n <= horizon`` and basis tuples with ``q!`` dividing every coordinate."""
    comps = _as_components(g)
    basis = [comps[i] for i in basis_indices]
    f = _factorial(q, budget_bits)
    start = max(c.start for c in comps)
    ns, out = [], []
    lo = start
    while lo <= horizon:
        hi = min(horizon, lo + chunk - 1)
        idx = list(range(lo, hi + 1))
        cols = _component_values(basis, idx)
        for r, n in enumerate(idx):
            t = tuple(col[r] for col in cols)
            if all(v % f == 0 for v in t):
                ns.append(n)
                out.append(t)
                if limit is not None and len(out) >= limit:
                    return ns, out
        lo = hi + 1
    return ns, out


def dq_filter(g, basis_indices, q: int, horizon: int,
              budget_bits: int = FACTORIAL_BUDGET_BITS) -> list[tuple[int, ...]]:
    """``D_q``: basis tuples ``(g_i(n))`` with ``q! | g_i(n)`` for all basis ``i``, ``n <= horizon``."""
    check_basis(g, basis_indices)
    _, out = dq_enumerate(g, basis_indices, q, horizon, budget_bits=budget_bits)
    if not out:
        warnings.warn(f"D_{q} is empty up to horizon {horizon}", stacklevel=2)
    return out


_ALGEBRAIC = ("sqrt(2)", "sqrt(3)", "sqrt(5)", "sqrt(7)", "sqrt(11)", "sqrt(13)")


def default_x_samples(m: int, seed: int = 0) -> list[dict]:
    """Algebraic, mixed-rational (m >= 2) and seeded random irrational test vectors."""
    samples = [{"label": "algebraic", "x": list(_ALGEBRAIC[:m])}]
    if m >= 2:
        samples.append({"label": "mixed", "x": ["1/2"] + list(_ALGEBRAIC[:m - 1])})
    rng = random.Random(seed)
    coords = []
    for _ in range(m):
        while True:
            r = rng.getrandbits(62) | (1 << 62)
            if math.isqrt(r) ** 2 != r:
                break
        coords.append(f"sqrt({r})")
    samples.append({"label": "random", "x": coords})
    return samples


def _dot_fractional(tuples, x_fixed, bits: int) -> np.ndarray:
    mask = (1 << bits) - 1
    shift = bits - 53
    limit = 1 << (bits - FRAC_ACCURACY_BITS)
    out = np.empty(len(tuples))
    for i, t in enumerate(tuples):
        v = e = 0
        for hj, (xv, xe) in zip(t, x_fixed):
            v += hj * xv
            e += abs(hj) * xe
        if e > limit:
            raise PrecisionError(f"h.x not accurate to 2^-{FRAC_ACCURACY_BITS} at element {i}",
                                 index=i)
        out[i] = ((v & mask) >> shift) / 2.0**53
    return out


@dataclass
class SufficientConditionReport:
    basis_used: list[int]
    basis_rank: int
    results: list[dict]
    verdict: str                # hypothesis consistent | hypothesis failing | inconclusive
    failing: dict | None = None
    note: str = ("supporting evidence only: finitely many Weyl sums on finitely many x "
                 "cannot prove uniform distribution")

    def to_json(self) -> dict:
        return {"basis_used": self.basis_used, "basis_rank": self.basis_rank,
                "results": self.results, "verdict": self.verdict, "failing": self.failing,
                "note": self.note}


def sufficient_condition_test(g, basis_indices, q_list, x_samples=None, N: int = 10**4,
                              horizon: int | None = None, seed: int = 0,
                              threshold_factor: float = DEFAULT_THRESHOLD_FACTOR,
                              max_frequency: int = DEFAULT_MAX_FREQUENCY,
                              precision_bits: int = DEFAULT_PRECISION_BITS,
                              workers: int = 1) -> SufficientConditionReport:
    """Screen the hypothesis that ``(h_n . x)`` is u.d. for ``h_n`` running through ``D_q``.

    For each ``q`` the first ``N`` elements of ``D_q`` (in order of ``n``) are
    dotted with each sample ``x`` and passed through the Weyl-sum screen.
    A basis that is not Q-independent on samples is reduced (with a warning)
    so a dependent pair is never tested directly.
    """
    comps = _as_components(g)
    if basis_indices is None:
        basis = select_basis(comps)
    else:
        basis = list(basis_indices)
        rank = check_basis(comps, basis)
        if rank < len(basis):
            reduced = select_basis([comps[i] for i in basis])
            basis = [basis[i] for i in reduced]
    rank = check_basis(comps, basis)
    m = len(basis)
    if x_samples is None:
        x_samples = default_x_samples(m, seed)
    samples = []
    for i, s in enumerate(x_samples):
        if isinstance(s, dict):
            label, x = s.get("label", f"x{i}"), s["x"]
        else:
            label, x = f"x{i}", s
        x = list(x) if isinstance(x, (list, tuple)) else [x]
        if len(x) != m:
            raise DomainError(f"sample {label} has {len(x)} coordinates, basis has {m}")
        if all(as_fraction(c) is not None for c in x):
            raise DomainError(f"sample {label} lies in Q^m")
        samples.append((label, [str(c) for c in x]))
    horizon = horizon or 10**7

    def run(q):
        ns, tuples = dq_enumerate(comps, basis, q, horizon, limit=N)
        if not tuples:
            return [{"q": q, "x": x, "label": label, "count": 0, "verdict": "inconclusive"}
                    for label, x in samples]
        rows = []
        for label, x in samples:
            fixed = [fixed_point(c, precision_bits) for c in x]
            pts = _dot_fractional(tuples, fixed, precision_bits)
            rep = ud_test_points(pts, threshold_factor=threshold_factor,
                                 max_frequency=max_frequency)
            rows.append({"q": q, "x": x, "label": label, "count": len(tuples),
                         "last_index": ns[-1], "max_modulus": rep.max_modulus,
                         "worst_frequency": list(rep.worst_frequency), "threshold": rep.threshold,
                         "verdict": rep.verdict})
        return rows

    q_list = [int(q) for q in q_list]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            per_q = list(pool.map(run, q_list))
    else:
        per_q = [run(q) for q in q_list]
    results = [row for rows in per_q for row in rows]
    failing = next((r for r in results if r["verdict"] == "inconsistent"), None)
    if failing is not None:
        verdict = "hypothesis failing"
        failing = {"q": failing["q"], "x": failing["x"], "h": failing["worst_frequency"]}
    elif any(r["verdict"] == "inconclusive" for r in results):
        verdict = "inconclusive"
    else:
        verdict = "hypothesis consistent"
    return SufficientConditionReport(basis, rank, results, verdict, failing)

"""Trigonometric-polynomial certificates for the van der Corput property.

A witness is a real polynomial ``P(x) = sum_h a_h e(h . x)`` on the torus
with ``a_{-h} = a_h``, ``P(0) = sum a_h = 1`` and spectrum inside ``H``.  A
set has the vdC property exactly when such witnesses exist with
``min P >= -eps`` for every ``eps > 0``; this module builds witnesses for a
fixed ``eps`` and checks them with a rigorous Lipschitz margin.

Grid evaluation uses an FFT: on the grid ``j / G`` the polynomial equals the
(unnormalised) inverse DFT of its coefficients folded modulo ``G``, so grid
values are exact up to floating-point rounding even for aliased frequencies.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import linprog

from .errors import CapacityError, DomainError

NORMALIZATION_TOL = 2.0**-40


@dataclass
class WitnessConfig:
    grid: int = 256                 # LP grid points per axis
    max_grid: int = 8192            # refinement cap per axis
    verify_factor: int = 4          # verification grid = verify_factor * LP grid
    coefficient_bound: float = 64.0
    max_terms: int = 4096           # k * |H| budget
    max_grid_points: int = 1 << 22  # total LP/verification grid points
    max_iterations: int = 100_000


@dataclass
class Witness:
    k: int
    terms: list                     # [(h tuple, a float)], both h and -h present
    epsilon: float
    certified_min: float
    grid: int
    margin: float
    method: str = "lp"

    def __post_init__(self):
        self.terms = [(tuple(int(c) for c in h), float(a)) for h, a in self.terms]
        for h, _ in self.terms:
            if len(h) != self.k:
                raise DomainError(f"frequency {h} does not have dimension {self.k}")
            if not any(h):
                raise DomainError("witness frequencies must be nonzero")
        coeffs = dict(self.terms)
        for h, a in coeffs.items():
            if coeffs.get(tuple(-c for c in h)) != a:
                raise DomainError(f"spectrum not symmetric at {h}")
        if abs(math.fsum(a for _, a in self.terms) - 1.0) > NORMALIZATION_TOL:
            raise DomainError("witness is not normalised: P(0) != 1")

    @property
    def spectrum(self) -> list[tuple]:
        return [h for h, _ in self.terms]

    def lipschitz(self) -> float:
        """``L = 2 pi sum |a_h| |h|_1``."""
        return 2 * math.pi * math.fsum(abs(a) * sum(abs(c) for c in h) for h, a in self.terms)

    def __call__(self, x) -> np.ndarray:
        """Evaluate at points of shape ``(..., k)`` (or scalars when ``k == 1``)."""
        x = np.asarray(x, dtype=np.float64)
        if self.k == 1 and (x.ndim == 0 or x.shape[-1] != 1):
            x = x[..., None]
        out = np.zeros(x.shape[:-1])
        for h, a in self.terms:
            out += a * np.cos(2 * np.pi * (x @ np.asarray(h, dtype=np.float64)))
        return out

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "terms": [{"h": list(h), "a": a} for h, a in self.terms],
            "epsilon": self.epsilon,
            "certified_min": self.certified_min,
            "grid": self.grid,
            "margin": self.margin,
            "method": self.method,
        }

    @classmethod
    def from_json(cls, data: dict) -> "Witness":
        return cls(
            k=int(data["k"]),
            terms=[(tuple(t["h"]), float(t["a"])) for t in data["terms"]],
            epsilon=float(data["epsilon"]),
            certified_min=float(data["certified_min"]),
            grid=int(data["grid"]),
            margin=float(data["margin"]),
            method=data.get("method", "lp"),
        )


def grid_values(terms, k: int, grid: int) -> np.ndarray:
    """``P(j / grid)`` for all ``j`` in ``[0, grid)^k`` via an FFT."""
    if grid ** k > (1 << 26):
        raise CapacityError(f"grid {grid}^{k} too large to evaluate")
    coeffs = np.zeros((grid,) * k, dtype=np.complex128)
    for h, a in terms:
        coeffs[tuple(c % grid for c in h)] += a
    return np.fft.ifftn(coeffs, norm="forward").real


def lipschitz_margin(terms, grid: int) -> float:
    """Maximal drop of ``P`` between a point and its nearest grid point."""
    lip = 2 * math.pi * math.fsum(abs(a) * sum(abs(c) for c in h) for h, a in terms)
    return lip * (1.0 / grid) / 2


def _grid_minimum(terms, k: int, grid: int) -> tuple[float, tuple]:
    vals = grid_values(terms, k, grid)
    j = np.unravel_index(int(np.argmin(vals)), vals.shape)
    return float(vals[j]), tuple(float(c) / grid for c in j)


# --- Fejér witnesses ------------------------------------------------------------------

def _default_grid(max_freq: int) -> int:
    return 1 << max(6, math.ceil(math.log2(4 * max_freq + 1)))


def fejer_witness(m, K: int, grid: int | None = None) -> Witness:
    """Normalised Fejér kernel in the variable ``m . x``.

    ``P(x) = (F_K(m . x) - 1) / (K - 1)`` with coefficients
    ``(1 - |j| / K) / (K - 1)`` on ``j m`` for ``1 <= |j| < K``.  Its minimum is
    exactly ``-1 / (K - 1)`` because ``F_K >= 0`` vanishes at ``j / K``.
    """
    if K < 2:
        raise DomainError("Fejér order K must be >= 2")
    mvec = tuple(int(c) for c in m) if isinstance(m, (tuple, list)) else (int(m),)
    if not any(mvec):
        raise DomainError("m must be nonzero")
    terms = []
    for j in range(1, K):
        a = (1 - j / K) / (K - 1)
        terms.append((tuple(j * c for c in mvec), a))
        terms.append((tuple(-j * c for c in mvec), a))
    max_freq = (K - 1) * max(abs(c) for c in mvec)
    g = grid or _default_grid(max_freq)
    # round the float coefficients so that they sum to one to within NORMALIZATION_TOL
    total = math.fsum(a for _, a in terms)
    terms = [(h, a / total) for h, a in terms]
    return Witness(len(mvec), terms, epsilon=1.0 / (K - 1), certified_min=-1.0 / (K - 1),
                   grid=g, margin=lipschitz_margin(terms, g), method="fejer")


def fejer_order(epsilon: float) -> int:
    """Smallest ``K`` with ``1 / (K - 1) <= epsilon``."""
    if epsilon <= 0:
        raise DomainError("epsilon must be positive")
    K = max(2, math.ceil(1.0 / epsilon) + 1)
    while K > 2 and 1.0 / (K - 2) <= epsilon:
        K -= 1
    return K


def scale_witness(w: Witness, c: int) -> Witness:
    """The witness ``x -> P(c x)``: spectrum ``cH``, same range, grid scaled by ``|c|``."""
    if c == 0:
        raise DomainError("scale factor must be nonzero")
    terms = [(tuple(c * x for x in h), a) for h, a in w.terms]
    g = w.grid * abs(c)
    return Witness(w.k, terms, w.epsilon, w.certified_min, g, lipschitz_margin(terms, g),
                   w.method)


# --- verification --------------------------------------------------------------------

@dataclass
class Verification:
    status: str                      # ok | spectrum_violation | normalization_violation | bound_violation
    grid_min: float | None = None
    margin: float | None = None
    location: tuple | None = None
    frequency: tuple | None = None
    fine_grid: int | None = None

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    @property
    def rigorous_lower_bound(self) -> float | None:
        """``min P`` over the whole torus is at least this value."""
        if self.grid_min is None:
            return None
        return self.grid_min - self.margin

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "grid_min": self.grid_min,
            "margin": self.margin,
            "rigorous_lower_bound": self.rigorous_lower_bound,
            "location": list(self.location) if self.location is not None else None,
            "frequency": list(self.frequency) if self.frequency is not None else None,
            "fine_grid": self.fine_grid,
        }


def verify_witness(w: Witness, membership: Callable[[tuple], bool] | None, epsilon: float,
                   fine_grid: int | None = None) -> Verification:
    """Check spectrum membership, ``P(0) = 1`` and ``P >= -epsilon - margin`` on a grid.

    ``ok`` implies ``P >= -epsilon - 2 * margin`` everywhere on the torus.
    """
    fine = fine_grid if fine_grid is not None else 4 * w.grid
    if fine < 2 * w.grid:
        raise DomainError(f"fine grid {fine} must be at least twice the witness grid {w.grid}")
    if membership is not None:
        for h, _ in w.terms:
            if not membership(h if w.k > 1 else h[0]):
                return Verification("spectrum_violation", frequency=h, fine_grid=fine)
    total = math.fsum(a for _, a in w.terms)
    if abs(total - 1.0) > NORMALIZATION_TOL:
        return Verification("normalization_violation", location=(0.0,) * w.k, fine_grid=fine)
    gmin, loc = _grid_minimum(w.terms, w.k, fine)
    margin = lipschitz_margin(w.terms, fine)
    status = "ok" if gmin >= -epsilon - margin else "bound_violation"
    return Verification(status, gmin, margin, loc, fine_grid=fine)


# --- LP search ----------------------------------------------------------------------

@dataclass
class LPResult:
    status: str                     # feasible | infeasible_at_truncation | stalled
    witness: Witness | None = None
    lp_minimum: float | None = None
    grid: int | None = None
    reason: str = ""
    history: list = field(default_factory=list)

    @property
    def feasible(self) -> bool:
        return self.status == "feasible"

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "witness": self.witness.to_json() if self.witness else None,
            "lp_minimum": self.lp_minimum,
            "grid": self.grid,
            "reason": self.reason,
            "history": self.history,
        }


def symmetric_representatives(H_elements) -> list[tuple]:
    """One representative per pair ``{h, -h}`` (first nonzero coordinate positive), sorted."""
    reps = set()
    for h in H_elements:
        t = tuple(int(c) for c in h) if isinstance(h, (tuple, list, np.ndarray)) else (int(h),)
        if not any(t):
            raise DomainError("H must not contain 0")
        first = next(c for c in t if c)
        reps.add(t if first > 0 else tuple(-c for c in t))
    dims = {len(t) for t in reps}
    if len(dims) != 1:
        raise DomainError("all elements of H must have the same dimension")
    return sorted(reps, key=lambda t: (sum(abs(c) for c in t), t))


def _solve_lp(reps, k: int, grid: int, cfg: WitnessConfig):
    """Maximise ``t`` subject to ``sum b_h cos(2 pi h.x_g) >= t`` and ``sum b_h = 1``."""
    pts = np.array(list(itertools.product(range(grid), repeat=k)), dtype=np.int64)
    hs = np.array(reps, dtype=np.int64)
    phase = (pts @ hs.T) % grid                         # exact integer phases
    cosines = np.cos(2 * np.pi * phase / grid)
    nvar = len(reps) + 1
    c = np.zeros(nvar)
    c[-1] = -1.0
    A_ub = np.hstack([-cosines, np.ones((len(pts), 1))])
    b_ub = np.zeros(len(pts))
    A_eq = np.zeros((1, nvar))
    A_eq[0, :-1] = 1.0
    bounds = [(-cfg.coefficient_bound, cfg.coefficient_bound)] * len(reps) + [(None, 1.0)]
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=[1.0], bounds=bounds,
                  method="highs", options={"maxiter": cfg.max_iterations, "presolve": True})
    return res


def lp_witness_search(H_elements, epsilon: float, grid: int | None = None,
                      config: WitnessConfig | None = None) -> LPResult:
    """Search for a witness with spectrum in ``H u -H`` and certified minimum ``>= -epsilon``.

    The LP maximises the grid minimum.  A solution is re-evaluated on a grid
    ``verify_factor`` times finer and its certified minimum is the fine-grid
    minimum minus the Lipschitz margin; if that misses ``-epsilon`` the LP grid
    is doubled, up to ``max_grid``.  Failure is only ever reported relative to
    this truncation of ``H`` and this grid.
    """
    cfg = config or WitnessConfig()
    if epsilon <= 0:
        raise DomainError("epsilon must be positive")
    reps = symmetric_representatives(H_elements)
    if not reps:
        raise DomainError("H must be nonempty")
    k = len(reps[0])
    if k * len(reps) > cfg.max_terms:
        raise CapacityError(f"k*|H| = {k * len(reps)} exceeds the budget {cfg.max_terms}")
    g = grid or cfg.grid
    if g < 64:
        raise DomainError("LP grid must have at least 64 points per axis")
    history = []
    while True:
        if g ** k * cfg.verify_factor ** k > cfg.max_grid_points:
            raise CapacityError(f"grid {g}^{k} (verification x{cfg.verify_factor}) exceeds the budget")
        res = _solve_lp(reps, k, g, cfg)
        if res.status == 1:
            return LPResult("stalled", grid=g, reason=res.message, history=history)
        if res.status != 0:
            return LPResult("infeasible_at_truncation", grid=g, reason=res.message, history=history)
        b = res.x[:-1]
        t = float(res.x[-1])
        # the LP optimum only moves down as the grid is refined
        if t < -epsilon:
            return LPResult("infeasible_at_truncation", lp_minimum=t, grid=g,
                            reason="LP optimum below -epsilon on this grid", history=history)
        terms = []
        for h, bh in zip(reps, b):
            if bh != 0.0:
                terms.append((h, bh / 2))
                terms.append((tuple(-c for c in h), bh / 2))
        total = math.fsum(a for _, a in terms)
        terms = [(h, a / total) for h, a in terms]
        fine = cfg.verify_factor * g
        gmin, _ = _grid_minimum(terms, k, fine)
        margin = lipschitz_margin(terms, fine)
        certified = gmin - margin
        history.append({"grid": g, "lp_minimum": t, "fine_grid_min": gmin, "margin": margin,
                        "certified_min": certified})
        if certified >= -epsilon:
            w = Witness(k, terms, epsilon, certified, g, margin, method="lp")
            return LPResult("feasible", w, t, g, history=history)
        if 2 * g > cfg.max_grid:
            return LPResult("infeasible_at_truncation", lp_minimum=t, grid=g,
                            reason="Lipschitz margin too large at the maximal grid",
                            history=history)
        g *= 2


def enumerate_set(membership: Callable, k: int, count: int, max_norm: int = 10**6) -> list[tuple]:
    """First ``count`` representatives ``h`` of ``H`` (mod sign) by increasing norm."""
    out = []
    for r in range(1, max_norm + 1):
        shell = []
        for h in itertools.product(range(-r, r + 1), repeat=k):
            if max(abs(c) for c in h) != r:
                continue
            first = next(c for c in h if c)
            if first < 0:
                continue
            arg = h if k > 1 else h[0]
            if membership(arg) or membership(-arg if k == 1 else tuple(-c for c in h)):
                shell.append(h)
        for h in sorted(shell):
            out.append(h)
            if len(out) == count:
                return out
    return out

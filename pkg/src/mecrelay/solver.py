"""Generic numeric kernels behind the per-case convex programs.

Four small tools cover every solve in this package: a monotone-root
bisection, a golden-section minimizer for certified-unimodal scalars, a
dual (shared-multiplier) equalizer for separable convex sums, and an
exhaustive grid oracle used for verification only.  No general convex
modeling layer: case convexity is established elsewhere and these kernels
just exploit it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


class SolverError(RuntimeError):
    pass


class NoSignChange(SolverError):
    """The root bracket does not straddle a sign change."""


class AllInfeasible(SolverError):
    """Every probed point of the search region is infeasible."""


class Certificate(Enum):
    CONVERGED = "converged"
    HIT_BOUND = "hit_bound"
    INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class Bracket:
    """Search interval with a relative tolerance target."""

    lo: float
    hi: float
    tol_rel: float = 1e-9

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"bracket needs lo < hi, got [{self.lo}, {self.hi}]")
        if not 0.0 < self.tol_rel <= 1e-3:
            raise ValueError(f"tol_rel must lie in (0, 1e-3], got {self.tol_rel}")


@dataclass(frozen=True)
class SolveReport:
    argmin: Tuple[float, ...]
    value: float
    iterations: int
    certificate: Certificate


def bisect_root(f: Callable[[float], float], bracket: Bracket) -> float:
    """Root of a monotone scalar function by plain bisection."""
    lo, hi = bracket.lo, bracket.hi
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0.0:
        raise NoSignChange(f"f({lo})={flo:.6g} and f({hi})={fhi:.6g} share a sign")
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm > 0.0) == (fhi > 0.0):
            hi, fhi = mid, fm
        else:
            lo, flo = mid, fm
        if hi - lo <= bracket.tol_rel * max(abs(lo), abs(hi)):
            break
    return 0.5 * (lo + hi)


def golden_minimize(f: Callable[[float], float], bracket: Bracket) -> SolveReport:
    """Golden-section minimum of a unimodal scalar on a bracket.

    The function may return inf to flag infeasible edges, but the bracket
    is expected to be pre-shrunk to the feasible interval: if every probe
    comes back inf the search aborts with AllInfeasible.
    """
    a, b = bracket.lo, bracket.hi
    span0 = b - a
    c = b - INVPHI * (b - a)
    d = a + INVPHI * (b - a)
    fc, fd = f(c), f(d)
    iterations = 0
    while b - a > bracket.tol_rel * span0:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INVPHI * (b - a)
            fd = f(d)
        iterations += 1
    x = 0.5 * (a + b)
    value = f(x)
    if math.isinf(value) and math.isinf(fc) and math.isinf(fd):
        raise AllInfeasible("objective is +inf on the whole shrunken bracket")
    edge = min(x - bracket.lo, bracket.hi - x) <= 2.0 * bracket.tol_rel * span0
    cert = Certificate.HIT_BOUND if edge else Certificate.CONVERGED
    return SolveReport((x,), value, iterations, cert)


def _derivative(f: Callable[[float], float], x: float) -> float:
    h = 1e-6 * max(abs(x), 1e-12)
    return (f(x + h) - f(x - h)) / (2.0 * h)


def dual_equalize(per_hop_energy: Sequence[Callable[[float], float]],
                  lower_bounds: Sequence[float],
                  budget: float,
                  derivatives: Optional[Sequence[Callable[[float], float]]] = None,
                  tol_rel: float = 1e-9) -> SolveReport:
    """Minimize a separable sum of strictly convex, strictly decreasing
    per-hop energies over slots summing to the budget.

    KKT structure: slots not clamped at their lower bound share one
    marginal energy -lambda; clamped slots have a flatter marginal.  The
    shared multiplier is found by bisection, each inner inversion by
    bisection on the (monotone increasing) derivative.
    """
    n = len(per_hop_energy)
    if len(lower_bounds) != n:
        raise ValueError("one lower bound per hop required")
    if sum(lower_bounds) > budget:
        return SolveReport(tuple(lower_bounds), math.inf, 0, Certificate.INFEASIBLE)

    if derivatives is None:
        derivatives = [lambda t, fi=fi: _derivative(fi, t) for fi in per_hop_energy]

    def slot_at(i: int, lam: float) -> float:
        lo = lower_bounds[i]
        if derivatives[i](lo) >= -lam:
            return lo
        hi = max(budget, lo * 2.0)
        for _ in range(200):
            if derivatives[i](hi) >= -lam:
                break
            hi *= 2.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if derivatives[i](mid) < -lam:
                lo = mid
            else:
                hi = mid
            if hi - lo <= 0.25 * tol_rel * hi:
                break
        return 0.5 * (lo + hi)

    def total(lam: float) -> float:
        return sum(slot_at(i, lam) for i in range(n))

    lam_hi = 1.0
    iterations = 0
    for _ in range(400):
        if total(lam_hi) <= budget:
            break
        lam_hi *= 8.0
        iterations += 1
    lam_lo = lam_hi
    for _ in range(400):
        if total(lam_lo) >= budget:
            break
        lam_lo *= 0.125
        iterations += 1
    for _ in range(200):
        mid = math.sqrt(lam_lo * lam_hi)
        if total(mid) > budget:
            lam_lo = mid
        else:
            lam_hi = mid
        iterations += 1
        if lam_hi - lam_lo <= 0.25 * tol_rel * lam_hi:
            break
    slots = [slot_at(i, lam_hi) for i in range(n)]
    scale = budget / sum(slots)
    slots = [t * scale for t in slots]
    value = math.fsum(f(t) for f, t in zip(per_hop_energy, slots))
    return SolveReport(tuple(slots), value, iterations, Certificate.CONVERGED)


def grid_solve(objective: Callable[[np.ndarray], np.ndarray],
               box: Sequence[Tuple[float, float]],
               resolution: int = 64,
               refinements: int = 2) -> SolveReport:
    """Exhaustive grid minimum plus local refinement; verification oracle.

    ``objective`` maps an (n, d) point array to n values with inf marking
    infeasible points.  After the full-box pass the box is shrunk by 3x
    around the incumbent (clipped to the original box) and re-gridded,
    ``refinements`` times.  Ground truth for the scheme solvers, never on
    the production path.
    """
    if resolution < 64:
        raise ValueError("resolution must be at least 64 points per dimension")
    dims = len(box)
    lo0 = np.array([b[0] for b in box], dtype=float)
    hi0 = np.array([b[1] for b in box], dtype=float)
    if np.any(hi0 < lo0):
        raise ValueError("box must have lo <= hi in every dimension")

    lo, hi = lo0.copy(), hi0.copy()
    best_val = math.inf
    best_pt = None
    evaluations = 0
    for _ in range(refinements + 1):
        axes = [np.linspace(lo[i], hi[i], resolution) for i in range(dims)]
        mesh = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([m.ravel() for m in mesh], axis=1)
        vals = objective(pts)
        evaluations += len(pts)
        k = int(np.argmin(vals))
        if vals[k] < best_val:
            best_val = float(vals[k])
            best_pt = pts[k].copy()
        if best_pt is None:
            break
        span = (hi - lo) / 3.0
        lo = np.maximum(lo0, best_pt - span / 2.0)
        hi = np.minimum(hi0, best_pt + span / 2.0)
    if best_pt is None or math.isinf(best_val):
        raise AllInfeasible("no feasible grid point in the search box")
    return SolveReport(tuple(best_pt), best_val, evaluations, Certificate.CONVERGED)

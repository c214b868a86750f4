"""Grid-search ground truth for the scheme solvers.

Everything here is re-derived from the raw rate/power formulas with numpy
and scipy only; none of it touches the kernel backends, so an agreement
check between a scheme solver and its oracle exercises two fully separate
code paths.

Active constraint faces (the time budget, the band cap, the power-cap
slot bounds) are baked into the grid parametrization: boxes are spanned in
normalized coordinates whose endpoints sit exactly on those faces, which
keeps the grid error quadratic around optima that live there.  The face
locations themselves come from bisections on the raw monotone formulas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.optimize import brentq

from mecrelay.model import Scenario, SchemeId
from mecrelay.solver import grid_solve

_EXP_CAP = 1020.0


@dataclass(frozen=True)
class OracleResult:
    feasible: bool
    energy: float
    point: Tuple[float, ...]


def _pow2m1(x):
    """2**x - 1, clipped against exponent overflow, elementwise."""
    return np.expm1(np.minimum(x, _EXP_CAP) * math.log(2.0))


def _power(t, b, dbits, g, n0):
    return b * n0 * _pow2m1(dbits / (t * b)) / g


def _hop_energy(t, b, dbits, g, n0):
    return t * _power(t, b, dbits, g, n0)


def _min_slot(b, dbits, g, n0, pmax):
    return dbits / (b * np.log2(1.0 + g * pmax / (b * n0)))


def _min_band(t, bmax, dbits, g, n0, pmax) -> float:
    """Smallest band meeting the power cap at slot t; inf if none."""
    if _power(t, bmax, dbits, g, n0) > pmax:
        return math.inf
    f = lambda b: _power(t, b, dbits, g, n0) - pmax
    return brentq(f, bmax * 1e-12, bmax, xtol=1e-300, rtol=1e-14)


def _min_band_vec(t, bmax, dbits, g, n0, pmax, iters=80):
    """Vectorized bisection twin of :func:`_min_band`."""
    t = np.asarray(t, dtype=float)
    lo = np.full_like(t, bmax * 1e-12)
    hi = np.full_like(t, bmax)
    hopeless = _power(t, hi, dbits, g, n0) > pmax
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        over = _power(t, mid, dbits, g, n0) > pmax
        lo = np.where(over, mid, lo)
        hi = np.where(over, hi, mid)
    return np.where(hopeless, np.inf, hi)


def _fd_pair_powers(t, b, dbits, g2, g3, g_self, g_cross, n0):
    """Shared-band powers, elementwise; inf where the coupling diverges."""
    x = dbits / (t * b)
    gamma = _pow2m1(x)
    beta = (g_self / g2) * (g_cross / g3)
    with np.errstate(over="ignore", invalid="ignore"):
        denom = 1.0 - beta * gamma * gamma
        scale = np.where(denom > 0.0, b * n0 * gamma / np.maximum(denom, 1e-300), np.inf)
        p2 = scale / g2 * (1.0 + g_self * gamma / g3)
        p3 = scale / g3 * (1.0 + g_cross * gamma / g2)
    bad = ~np.isfinite(gamma) | (denom <= 0.0)
    p2 = np.where(bad, np.inf, p2)
    p3 = np.where(bad, np.inf, p3)
    return p2, p3


def _bool_threshold(pred, hi: float, rtol: float = 1e-13) -> float:
    """Smallest x in (0, hi] with pred(x) true, for monotone pred."""
    lo = hi * 1e-15
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if pred(mid):
            hi = mid
        else:
            lo = mid
    return hi


def oracle_hd_chain(scenario: Scenario, resolution: int = 64,
                    refinements: int = 2) -> OracleResult:
    """Grid reference for the sequential half-duplex chain (1-3 hops)."""
    p = scenario.params
    task = scenario.task
    gains = scenario.channels.hop_gains
    n0 = p.floor_psd
    bmax, pmax, dbits = p.bandwidth_max, p.power_max, task.data_bits
    budget = task.comm_budget()
    lows = [float(_min_slot(bmax, dbits, g, n0, pmax)) for g in gains]
    if budget <= 0 or sum(lows) > budget:
        return OracleResult(False, math.inf, ())

    if len(gains) == 1:
        def f(pts):
            return _hop_energy(pts[:, 0], bmax, dbits, gains[0], n0)
        rep = grid_solve(f, [(lows[0], budget)], resolution, refinements)
        return OracleResult(True, rep.value, rep.argmin)

    if len(gains) == 2:
        def f(pts):
            t1 = pts[:, 0]
            return (_hop_energy(t1, bmax, dbits, gains[0], n0)
                    + _hop_energy(budget - t1, bmax, dbits, gains[1], n0))
        rep = grid_solve(f, [(lows[0], budget - lows[1])], resolution, refinements)
        t1 = rep.argmin[0]
        return OracleResult(True, rep.value, (t1, budget - t1))

    lo1, lo2, lo3 = lows

    def f(pts):
        t1 = pts[:, 0]
        v = pts[:, 1]
        t2 = lo2 + v * (budget - t1 - lo3 - lo2)
        t3 = budget - t1 - t2
        return (_hop_energy(t1, bmax, dbits, gains[0], n0)
                + _hop_energy(t2, bmax, dbits, gains[1], n0)
                + _hop_energy(t3, bmax, dbits, gains[2], n0))

    rep = grid_solve(f, [(lo1, budget - lo2 - lo3), (0.0, 1.0)],
                     resolution, refinements)
    t1, v = rep.argmin
    t2 = lo2 + v * (budget - t1 - lo3 - lo2)
    return OracleResult(True, rep.value, (t1, t2, budget - t1 - t2))


def oracle_equal_split3(scenario: Scenario) -> OracleResult:
    """Closed-form recheck of the non-optimized baseline (no grid needed)."""
    p = scenario.params
    task = scenario.task
    n0 = p.floor_psd
    budget = task.comm_budget()
    if budget <= 0:
        return OracleResult(False, math.inf, ())
    t = budget / 3.0
    powers = [float(_power(t, p.bandwidth_max, task.data_bits, g, n0))
              for g in scenario.channels.hop_gains]
    if max(powers) > p.power_max:
        return OracleResult(False, math.inf, ())
    return OracleResult(True, t * sum(powers), (t, t, t))


def oracle_hd_fdo(scenario: Scenario, resolution: int = 64,
                  refinements: int = 2) -> OracleResult:
    """Grid reference for the orthogonal-band mixed-duplex case.

    Free coordinates: the first slot, the normalized position of the
    shared slot between its power-cap floor and the budget face, and the
    normalized band split between the two power-cap walls.
    """
    p = scenario.params
    task = scenario.task
    g1, g2, g3 = scenario.channels.hop_gains
    n0 = p.floor_psd
    bmax, pmax, dbits = p.bandwidth_max, p.power_max, task.data_bits
    budget = task.comm_budget()
    if budget <= 0:
        return OracleResult(False, math.inf, ())
    lo1 = float(_min_slot(bmax, dbits, g1, n0, pmax))
    if lo1 >= budget:
        return OracleResult(False, math.inf, ())

    def splittable(t2: float) -> bool:
        a = _min_band(t2, bmax, dbits, g2, n0, pmax)
        b = _min_band(t2, bmax, dbits, g3, n0, pmax)
        return math.isfinite(a) and math.isfinite(b) and a + b <= bmax

    t2_cap = budget - lo1
    if not splittable(t2_cap):
        return OracleResult(False, math.inf, ())
    t2_min = _bool_threshold(splittable, t2_cap)
    if budget - t2_min < lo1:
        return OracleResult(False, math.inf, ())

    def f(pts):
        t1 = pts[:, 0]
        s = pts[:, 1]
        w = pts[:, 2]
        t2 = t2_min + s * (budget - t1 - t2_min)
        mb2 = _min_band_vec(t2, bmax, dbits, g2, n0, pmax)
        mb3 = _min_band_vec(t2, bmax, dbits, g3, n0, pmax)
        b_lo = mb2
        b_hi = bmax - mb3
        ok = np.isfinite(b_lo) & np.isfinite(b_hi) & (b_hi >= b_lo)
        b2 = np.where(ok, b_lo + w * (b_hi - b_lo), bmax * 0.5)
        en = (_hop_energy(t1, bmax, dbits, g1, n0)
              + _hop_energy(t2, b2, dbits, g2, n0)
              + _hop_energy(t2, bmax - b2, dbits, g3, n0))
        return np.where(ok, en, np.inf)

    rep = grid_solve(f, [(lo1, budget - t2_min), (0.0, 1.0), (0.0, 1.0)],
                     resolution, refinements)
    t1, s, w = rep.argmin
    t2 = t2_min + s * (budget - t1 - t2_min)
    mb2 = _min_band(t2, bmax, dbits, g2, n0, pmax)
    mb3 = _min_band(t2, bmax, dbits, g3, n0, pmax)
    b2 = mb2 + w * (bmax - mb3 - mb2)
    return OracleResult(True, rep.value, (t1, t2, b2, bmax - b2))


def oracle_hd_fds(scenario: Scenario, resolution: int = 64,
                  refinements: int = 2) -> OracleResult:
    """Grid reference for the shared-band mixed-duplex case."""
    p = scenario.params
    task = scenario.task
    ch = scenario.channels
    g1, g2, g3 = ch.hop_gains
    g_self = ch.self_interference_gain or 0.0
    g_cross = ch.cross_interference_gain or 0.0
    n0 = p.floor_psd
    bmax, pmax, dbits = p.bandwidth_max, p.power_max, task.data_bits
    budget = task.comm_budget()
    if budget <= 0:
        return OracleResult(False, math.inf, ())
    lo1 = float(_min_slot(bmax, dbits, g1, n0, pmax))
    if lo1 >= budget:
        return OracleResult(False, math.inf, ())

    def pair_ok(t2: float) -> bool:
        p2, p3 = _fd_pair_powers(np.float64(t2), bmax, dbits, g2, g3,
                                 g_self, g_cross, n0)
        return bool(np.isfinite(p2) and np.isfinite(p3)
                    and p2 <= pmax and p3 <= pmax)

    t2_cap = budget - lo1
    if not pair_ok(t2_cap):
        return OracleResult(False, math.inf, ())
    t2_min = _bool_threshold(pair_ok, t2_cap)
    if budget - t2_min < lo1:
        return OracleResult(False, math.inf, ())

    def f(pts):
        t1 = pts[:, 0]
        s = pts[:, 1]
        t2 = t2_min + s * (budget - t1 - t2_min)
        p2, p3 = _fd_pair_powers(t2, bmax, dbits, g2, g3, g_self, g_cross, n0)
        ok = np.isfinite(p2) & np.isfinite(p3) & (p2 <= pmax) & (p3 <= pmax)
        en = _hop_energy(t1, bmax, dbits, g1, n0) + t2 * (p2 + p3)
        return np.where(ok, en, np.inf)

    rep = grid_solve(f, [(lo1, budget - t2_min), (0.0, 1.0)],
                     resolution, refinements)
    t1, s = rep.argmin
    t2 = t2_min + s * (budget - t1 - t2_min)
    return OracleResult(True, rep.value, (t1, t2))


def grid_reference(scheme: SchemeId, scenario: Scenario,
                   resolution: int = 64, refinements: int = 2
                   ) -> Optional[OracleResult]:
    """Oracle result for one scheme, or None where no oracle is defined."""
    if scheme in (SchemeId.DIRECT, SchemeId.TWO_HOP_HD, SchemeId.HD_HD):
        return oracle_hd_chain(scenario, resolution, refinements)
    if scheme is SchemeId.THREE_HOP_UNOPT:
        return oracle_equal_split3(scenario)
    if scheme is SchemeId.HD_FDO:
        return oracle_hd_fdo(scenario, resolution, refinements)
    if scheme is SchemeId.HD_FDS:
        return oracle_hd_fds(scenario, resolution, refinements)
    return None

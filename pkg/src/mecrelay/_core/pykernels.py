"""Pure-Python numeric kernels for the per-drop allocation solves.

This module is the reference implementation of the hot path: closed-form
link math (capacity, power inversion, coupled full-duplex powers) and the
three per-case optimizers plus baselines, all operating on plain floats.
A compiled twin (``_speedups``) implements the same algorithms; the
package picks one at import time.  Keep the two in lockstep: every change
here must be mirrored there.

Conventions: all quantities SI linear (W, Hz, s, bits).  ``n0`` is the
total receiver noise-plus-interference spectral density sigma + I_b in
W/Hz.  Infeasible solves return ``ok == 0``; powers that would overflow
the double exponent range come back as ``inf`` and fail the power cap.
"""

import math

BACKEND_NAME = "python"

LN2 = math.log(2.0)
INV_E = math.exp(-1.0)
INVPHI = (math.sqrt(5.0) - 1.0) / 2.0

# D/(t*b) beyond this would overflow the double exponent range.
EXP_CAP = 1020.0

# Relative width below which a search interval is treated as a single point.
_POINT = 1e-13


def _expm1_2(x):
    """2**x - 1 without cancellation for small x; inf past EXP_CAP."""
    if x > EXP_CAP:
        return math.inf
    return math.expm1(x * LN2)


def hd_capacity(bandwidth, power, gain, n0):
    """Shannon rate of an interference-free hop, bit/s."""
    return bandwidth * math.log1p(power * gain / (bandwidth * n0)) / LN2


def fd_shared_capacities(bandwidth, p_first, p_second, g_first, g_second,
                         g_self, g_cross, n0):
    """Rates of the two simultaneous shared-band hops, bit/s.

    The first hop's receiver sees the second transmitter through ``g_self``
    (residual self-interference); the second hop's receiver sees the first
    transmitter through ``g_cross``.
    """
    k = bandwidth * n0
    c1 = bandwidth * math.log1p(p_first * g_first / (k + p_second * g_self)) / LN2
    c2 = bandwidth * math.log1p(p_second * g_second / (k + p_first * g_cross)) / LN2
    return c1, c2


def required_power_hd(slot, bandwidth, data_bits, gain, n0):
    """Transmit power that carries ``data_bits`` in ``slot`` seconds."""
    gamma = _expm1_2(data_bits / (slot * bandwidth))
    if not math.isfinite(gamma):
        return math.inf
    return bandwidth * n0 * gamma / gain


def hd_hop_energy(slot, bandwidth, data_bits, gain, n0):
    """slot * required power; the per-hop objective term."""
    gamma = _expm1_2(data_bits / (slot * bandwidth))
    if not math.isfinite(gamma):
        return math.inf
    return slot * bandwidth * n0 * gamma / gain


def hd_energy_slope(slot, bandwidth, data_bits, gain, n0):
    """d/dt of the per-hop energy; strictly negative, increasing in t."""
    a = bandwidth * n0 / gain
    x = data_bits / (slot * bandwidth)
    gamma = _expm1_2(x)
    if not math.isfinite(gamma):
        return -math.inf
    # e'(t) = A * [ (2^x - 1) - x ln2 * 2^x ]
    return a * (gamma - x * LN2 * (gamma + 1.0))


def min_slot_hd(bandwidth, data_bits, gain, n0, power_max):
    """Shortest slot allowed by the power cap (power cap met with equality)."""
    snr = gain * power_max / (bandwidth * n0)
    return data_bits / (bandwidth * math.log1p(snr) / LN2)


def _lambert_w0(y):
    """Principal-branch Lambert W on [-1/e, inf), Halley iteration."""
    if y <= -INV_E:
        return -1.0
    if y == 0.0:
        return 0.0
    if y < -0.25:
        # series around the branch point; exact enough there that a Halley
        # polish would only add cancellation noise
        p = math.sqrt(2.0 * (math.e * y + 1.0))
        w = -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0
                                                     - p * (43.0 / 540.0))))
        if p < 1e-3:
            return w
    elif y < 4.0:
        w = math.log1p(y) * 0.7
    else:
        l1 = math.log(y)
        l2 = math.log(l1)
        w = l1 - l2 + l2 / l1
    for _ in range(40):
        ew = math.exp(w)
        f = w * ew - y
        denom = ew * (w + 1.0) - (w + 2.0) * f / (2.0 * w + 2.0)
        if denom == 0.0:
            break
        dw = f / denom
        w -= dw
        if abs(dw) <= 1e-15 * (1.0 + abs(w)):
            break
    return w


def slot_for_slope(slope_mag, bandwidth, data_bits, gain, n0):
    """Slot at which the energy slope equals ``-slope_mag`` (closed form).

    Solving A*[2^x (1 - x ln2) - 1] = -lam for x = D/(t b) reduces to
    x = (1 + W0(-(1 - lam/A)/e)) / ln2.
    """
    a = bandwidth * n0 / gain
    u = 1.0 - slope_mag / a
    w = _lambert_w0(-u * INV_E)
    x = (1.0 + w) / LN2
    if x <= 0.0:
        return math.inf
    return data_bits / (bandwidth * x)


def min_bandwidth_hd(slot, bandwidth_max, data_bits, gain, n0, power_max, tol):
    """Smallest band (within the cap) meeting the power cap; inf if none.

    Required power is strictly decreasing in bandwidth, so this is a
    bisection on a monotone predicate.
    """
    if required_power_hd(slot, bandwidth_max, data_bits, gain, n0) > power_max:
        return math.inf
    lo = bandwidth_max * 1e-15
    hi = bandwidth_max
    while hi - lo > tol * hi:
        mid = 0.5 * (lo + hi)
        if required_power_hd(slot, mid, data_bits, gain, n0) > power_max:
            lo = mid
        else:
            hi = mid
    return hi


def _log2_gamma(exponent):
    """log2(2**exponent - 1); switches to the asymptote for large arguments."""
    if exponent >= 64.0:
        return exponent
    return math.log2(_expm1_2(exponent))


def fd_shared_powers(slot, bandwidth, data_bits, g_first, g_second,
                     g_self, g_cross, n0):
    """Decoupled shared-band powers; returns (ok, p_first, p_second).

    ``ok == 0`` signals the interference-coupled system has no positive
    solution (beta * Gamma^2 >= 1); the slot is too short for shared-band
    full duplex.  The feasibility test runs in log space so the boundary
    is detected before anything can overflow.
    """
    exponent = data_bits / (slot * bandwidth)
    beta = (g_self / g_first) * (g_cross / g_second)
    if beta > 0.0:
        if math.log2(beta) + 2.0 * _log2_gamma(exponent) >= 0.0:
            return 0, 0.0, 0.0
    gamma = _expm1_2(exponent)
    if not math.isfinite(gamma):
        return 1, math.inf, math.inf
    k = bandwidth * n0
    scale = k * gamma / (1.0 - beta * gamma * gamma)
    p_first = scale / g_first * (1.0 + g_self * gamma / g_second)
    p_second = scale / g_second * (1.0 + g_cross * gamma / g_first)
    return 1, p_first, p_second


# ---------------------------------------------------------------------------
# scheme solves
# ---------------------------------------------------------------------------

def solve_hd_chain(budget, data_bits, nhops, g1, g2, g3, bandwidth, n0,
                   power_max, tol):
    """Optimal sequential half-duplex chain over 1..3 hops at full band.

    Minimizes the separable convex sum energy with the time budget active,
    equalizing marginal energies across hops not clamped at their power-cap
    slot (bisection on the shared multiplier, closed-form inner inversion).
    Returns (ok, t1, t2, t3, p1, p2, p3, energy); unused hops are zero.
    """
    if budget <= 0.0:
        return 0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, math.inf
    gains = (g1, g2, g3)[:nhops]
    lows = [min_slot_hd(bandwidth, data_bits, g, n0, power_max) for g in gains]
    if sum(lows) > budget:
        return 0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, math.inf

    if nhops == 1:
        t1 = budget  # energy strictly decreasing in the slot
        p1 = required_power_hd(t1, bandwidth, data_bits, g1, n0)
        return 1, t1, 0.0, 0.0, p1, 0.0, 0.0, t1 * p1

    def slots_at(lam):
        total = 0.0
        ts = []
        for lo, g in zip(lows, gains):
            t = slot_for_slope(lam, bandwidth, data_bits, g, n0)
            if t < lo:
                t = lo
            ts.append(t)
            total += t
        return ts, total

    lam_hi = 1.0
    for _ in range(400):
        _, total = slots_at(lam_hi)
        if total <= budget:
            break
        lam_hi *= 8.0
    lam_lo = lam_hi
    for _ in range(400):
        _, total = slots_at(lam_lo)
        if total >= budget:
            break
        lam_lo *= 0.125
    for _ in range(200):
        mid = math.sqrt(lam_lo * lam_hi)
        _, total = slots_at(mid)
        if total > budget:
            lam_lo = mid
        else:
            lam_hi = mid
        if lam_hi - lam_lo <= tol * lam_hi:
            break
    ts, total = slots_at(lam_hi)
    # scale up to hit the budget exactly; enlarging slots never violates
    # the power-cap lower bounds
    scale = budget / total
    ts = [t * scale for t in ts]
    ps = [required_power_hd(t, bandwidth, data_bits, g, n0)
          for t, g in zip(ts, gains)]
    energy = sum(t * p for t, p in zip(ts, ps))
    out_t = (ts + [0.0, 0.0])[:3]
    out_p = (ps + [0.0, 0.0])[:3]
    return 1, out_t[0], out_t[1], out_t[2], out_p[0], out_p[1], out_p[2], energy


def solve_equal_split3(budget, data_bits, g1, g2, g3, bandwidth, n0, power_max):
    """Non-optimized 3-hop baseline: equal slots, full band, minimal power."""
    if budget <= 0.0:
        return 0, 0.0, 0.0, 0.0, 0.0, math.inf
    t = budget / 3.0
    p1 = required_power_hd(t, bandwidth, data_bits, g1, n0)
    p2 = required_power_hd(t, bandwidth, data_bits, g2, n0)
    p3 = required_power_hd(t, bandwidth, data_bits, g3, n0)
    if p1 > power_max or p2 > power_max or p3 > power_max:
        return 0, 0.0, 0.0, 0.0, 0.0, math.inf
    return 1, t, p1, p2, p3, t * (p1 + p2 + p3)


def solve_hd_fdo(budget, data_bits, g1, g2, g3, bandwidth_max, n0,
                 power_max, tol):
    """First hop half duplex, relayed hops simultaneous on split bands.

    Nested golden sections: outer over the first slot, inner over the
    band split of the overlapped hops (the two relayed hops share the slot
    t2 and the band cap, both active at the optimum).  Brackets are
    pre-shrunk to the power-feasible interval so the objective is finite
    and convex everywhere it is probed.
    Returns (ok, t1, t2, b2, b3, p1, p2, p3, energy).
    """
    if budget <= 0.0:
        return 0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, math.inf
    low1 = min_slot_hd(bandwidth_max, data_bits, g1, n0, power_max)
    if low1 >= budget:
        return 0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, math.inf

    def band_bounds(t2):
        mb2 = min_bandwidth_hd(t2, bandwidth_max, data_bits, g2, n0,
                               power_max, tol * 1e-2)
        mb3 = min_bandwidth_hd(t2, bandwidth_max, data_bits, g3, n0,
                               power_max, tol * 1e-2)
        return mb2, mb3

    def splittable(t2):
        mb2, mb3 = band_bounds(t2)
        return math.isfinite(mb2) and math.isfinite(mb3) \
            and mb2 + mb3 <= bandwidth_max

    t2_cap = budget - low1
    if not splittable(t2_cap):
        return 0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, math.inf
    lo = t2_cap * 1e-15
    hi = t2_cap
    while hi - lo > tol * 1e-2 * hi:
        mid = 0.5 * (lo + hi)
        if splittable(mid):
            hi = mid
        else:
            lo = mid
    t2_min = hi

    def inner_value(t2):
        """Best energy of the overlapped hops for a given shared slot."""
        mb2, mb3 = band_bounds(t2)
        b_lo = mb2
        b_hi = bandwidth_max - mb3
        if not (math.isfinite(b_lo) and b_lo <= b_hi):
            return math.inf, 0.0

        def pair(b2f):
            return (hd_hop_energy(t2, b2f, data_bits, g2, n0)
                    + hd_hop_energy(t2, bandwidth_max - b2f, data_bits, g3, n0))

        span0 = b_hi - b_lo
        if span0 <= _POINT * bandwidth_max:
            mid = 0.5 * (b_lo + b_hi)
            return pair(mid), mid
        a, b = b_lo, b_hi
        c = b - INVPHI * (b - a)
        d = a + INVPHI * (b - a)
        fc = pair(c)
        fd = pair(d)
        while b - a > tol * span0:
            if fc < fd:
                b, d, fd = d, c, fc
                c = b - INVPHI * (b - a)
                fc = pair(c)
            else:
                a, c, fc = c, d, fd
                d = a + INVPHI * (b - a)
                fd = pair(d)
        mid = 0.5 * (a + b)
        return pair(mid), mid

    def outer(t1):
        val, _ = inner_value(budget - t1)
        return val + hd_hop_energy(t1, bandwidth_max, data_bits, g1, n0)

    t1_lo = low1
    t1_hi = budget - t2_min
    if t1_hi < t1_lo:
        # the feasibility bisections agree only to tolerance; treat the
        # inverted sliver as the single point at the power-cap slot
        if t1_hi < t1_lo * (1.0 - 1e-9):
            return 0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, math.inf
        t1 = t1_lo
    elif t1_hi - t1_lo <= _POINT * budget:
        t1 = 0.5 * (t1_lo + t1_hi)
    else:
        a, b = t1_lo, t1_hi
        span0 = b - a
        c = b - INVPHI * (b - a)
        d = a + INVPHI * (b - a)
        fc = outer(c)
        fd = outer(d)
        while b - a > tol * span0:
            if fc < fd:
                b, d, fd = d, c, fc
                c = b - INVPHI * (b - a)
                fc = outer(c)
            else:
                a, c, fc = c, d, fd
                d = a + INVPHI * (b - a)
                fd = outer(d)
        t1 = 0.5 * (a + b)

    t2 = budget - t1
    val, b2 = inner_value(t2)
    if not math.isfinite(val):
        return 0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, math.inf
    b3 = bandwidth_max - b2
    p1 = required_power_hd(t1, bandwidth_max, data_bits, g1, n0)
    p2 = required_power_hd(t2, b2, data_bits, g2, n0)
    p3 = required_power_hd(t2, b3, data_bits, g3, n0)
    energy = t1 * p1 + t2 * (p2 + p3)
    return 1, t1, t2, b2, b3, p1, p2, p3, energy


def solve_hd_fds(budget, data_bits, g1, g2, g3, g_self, g_cross,
                 bandwidth_max, n0, power_max, tol):
    """First hop half duplex, relayed hops simultaneous on the full band.

    Golden section over the first slot; the overlapped-hop powers come from
    the decoupled closed form and the bracket is pre-shrunk to the region
    where the coupled system is solvable and within the power cap.
    Returns (ok, t1, t2, p1, p2, p3, energy).
    """
    if budget <= 0.0:
        return 0, 0.0, 0.0, 0.0, 0.0, 0.0, math.inf
    low1 = min_slot_hd(bandwidth_max, data_bits, g1, n0, power_max)
    if low1 >= budget:
        return 0, 0.0, 0.0, 0.0, 0.0, 0.0, math.inf

    def pair_ok(t2):
        ok, p2, p3 = fd_shared_powers(t2, bandwidth_max, data_bits, g2, g3,
                                      g_self, g_cross, n0)
        return ok == 1 and p2 <= power_max and p3 <= power_max

    t2_cap = budget - low1
    if not pair_ok(t2_cap):
        return 0, 0.0, 0.0, 0.0, 0.0, 0.0, math.inf
    lo = t2_cap * 1e-15
    hi = t2_cap
    while hi - lo > tol * 1e-2 * hi:
        mid = 0.5 * (lo + hi)
        if pair_ok(mid):
            hi = mid
        else:
            lo = mid
    t2_min = hi

    def objective(t1):
        t2 = budget - t1
        ok, p2, p3 = fd_shared_powers(t2, bandwidth_max, data_bits, g2, g3,
                                      g_self, g_cross, n0)
        if ok != 1 or p2 > power_max or p3 > power_max:
            return math.inf
        return (hd_hop_energy(t1, bandwidth_max, data_bits, g1, n0)
                + t2 * (p2 + p3))

    t1_lo = low1
    t1_hi = budget - t2_min
    if t1_hi < t1_lo:
        if t1_hi < t1_lo * (1.0 - 1e-9):
            return 0, 0.0, 0.0, 0.0, 0.0, 0.0, math.inf
        t1 = t1_lo
    elif t1_hi - t1_lo <= _POINT * budget:
        t1 = 0.5 * (t1_lo + t1_hi)
    else:
        a, b = t1_lo, t1_hi
        span0 = b - a
        c = b - INVPHI * (b - a)
        d = a + INVPHI * (b - a)
        fc = objective(c)
        fd = objective(d)
        while b - a > tol * span0:
            if fc < fd:
                b, d, fd = d, c, fc
                c = b - INVPHI * (b - a)
                fc = objective(c)
            else:
                a, c, fc = c, d, fd
                d = a + INVPHI * (b - a)
                fd = objective(d)
        t1 = 0.5 * (a + b)

    t2 = budget - t1
    ok, p2, p3 = fd_shared_powers(t2, bandwidth_max, data_bits, g2, g3,
                                  g_self, g_cross, n0)
    if ok != 1:
        return 0, 0.0, 0.0, 0.0, 0.0, 0.0, math.inf
    p1 = required_power_hd(t1, bandwidth_max, data_bits, g1, n0)
    energy = t1 * p1 + t2 * (p2 + p3)
    return 1, t1, t2, p1, p2, p3, energy

# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of ``pykernels``: same algorithms, same constants, same
iteration logic, C doubles throughout.  Keep in lockstep with that module;
the backend-agreement tests hold the two to near-bitwise equality."""

from libc.math cimport expm1, log1p, log2, log, exp, sqrt, fabs, isfinite, INFINITY

BACKEND_NAME = "compiled"

cdef double LN2 = log(2.0)
cdef double INV_E = exp(-1.0)
cdef double INVPHI = (sqrt(5.0) - 1.0) / 2.0
cdef double M_E = exp(1.0)
cdef double EXP_CAP = 1020.0
cdef double _POINT = 1e-13


cdef inline double _expm1_2(double x) nogil:
    if x > EXP_CAP:
        return INFINITY
    return expm1(x * LN2)


cdef inline double _hd_capacity(double bandwidth, double power, double gain,
                                double n0) nogil:
    return bandwidth * log1p(power * gain / (bandwidth * n0)) / LN2


cdef inline double _required_power(double slot, double bandwidth,
                                   double data_bits, double gain,
                                   double n0) nogil:
    cdef double gamma = _expm1_2(data_bits / (slot * bandwidth))
    if not isfinite(gamma):
        return INFINITY
    return bandwidth * n0 * gamma / gain


cdef inline double _hop_energy(double slot, double bandwidth, double data_bits,
                               double gain, double n0) nogil:
    cdef double gamma = _expm1_2(data_bits / (slot * bandwidth))
    if not isfinite(gamma):
        return INFINITY
    return slot * bandwidth * n0 * gamma / gain


cdef inline double _energy_slope(double slot, double bandwidth, double data_bits,
                                 double gain, double n0) nogil:
    cdef double a = bandwidth * n0 / gain
    cdef double x = data_bits / (slot * bandwidth)
    cdef double gamma = _expm1_2(x)
    if not isfinite(gamma):
        return -INFINITY
    return a * (gamma - x * LN2 * (gamma + 1.0))


cdef inline double _min_slot(double bandwidth, double data_bits, double gain,
                             double n0, double power_max) nogil:
    cdef double snr = gain * power_max / (bandwidth * n0)
    return data_bits / (bandwidth * log1p(snr) / LN2)


cdef inline double _w0(double y) nogil:
    cdef double p, w, ew, f, denom, dw, l1, l2
    cdef int i
    if y <= -INV_E:
        return -1.0
    if y == 0.0:
        return 0.0
    if y < -0.25:
        # series around the branch point; exact enough there that a Halley
        # polish would only add cancellation noise
        p = sqrt(2.0 * (M_E * y + 1.0))
        w = -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0
                                                     - p * (43.0 / 540.0))))
        if p < 1e-3:
            return w
    elif y < 4.0:
        w = log1p(y) * 0.7
    else:
        l1 = log(y)
        l2 = log(l1)
        w = l1 - l2 + l2 / l1
    for i in range(40):
        ew = exp(w)
        f = w * ew - y
        denom = ew * (w + 1.0) - (w + 2.0) * f / (2.0 * w + 2.0)
        if denom == 0.0:
            break
        dw = f / denom
        w -= dw
        if fabs(dw) <= 1e-15 * (1.0 + fabs(w)):
            break
    return w


cdef inline double _slot_for_slope(double slope_mag, double bandwidth,
                                   double data_bits, double gain,
                                   double n0) nogil:
    cdef double a = bandwidth * n0 / gain
    cdef double u = 1.0 - slope_mag / a
    cdef double w = _w0(-u * INV_E)
    cdef double x = (1.0 + w) / LN2
    if x <= 0.0:
        return INFINITY
    return data_bits / (bandwidth * x)


cdef inline double _min_bandwidth(double slot, double bandwidth_max,
                                  double data_bits, double gain, double n0,
                                  double power_max, double tol) nogil:
    cdef double lo, hi, mid
    if _required_power(slot, bandwidth_max, data_bits, gain, n0) > power_max:
        return INFINITY
    lo = bandwidth_max * 1e-15
    hi = bandwidth_max
    while hi - lo > tol * hi:
        mid = 0.5 * (lo + hi)
        if _required_power(slot, mid, data_bits, gain, n0) > power_max:
            lo = mid
        else:
            hi = mid
    return hi


cdef inline double _log2_gamma(double exponent) nogil:
    if exponent >= 64.0:
        return exponent
    return log2(_expm1_2(exponent))


cdef inline int _fd_powers(double slot, double bandwidth, double data_bits,
                           double g_first, double g_second, double g_self,
                           double g_cross, double n0,
                           double* p_first, double* p_second) nogil:
    cdef double exponent = data_bits / (slot * bandwidth)
    cdef double beta = (g_self / g_first) * (g_cross / g_second)
    cdef double gamma, k, scale
    if beta > 0.0:
        if log2(beta) + 2.0 * _log2_gamma(exponent) >= 0.0:
            p_first[0] = 0.0
            p_second[0] = 0.0
            return 0
    gamma = _expm1_2(exponent)
    if not isfinite(gamma):
        p_first[0] = INFINITY
        p_second[0] = INFINITY
        return 1
    k = bandwidth * n0
    scale = k * gamma / (1.0 - beta * gamma * gamma)
    p_first[0] = scale / g_first * (1.0 + g_self * gamma / g_second)
    p_second[0] = scale / g_second * (1.0 + g_cross * gamma / g_first)
    return 1


# ---------------------------------------------------------------------------
# python-visible primitives
# ---------------------------------------------------------------------------

def hd_capacity(double bandwidth, double power, double gain, double n0):
    """Shannon rate of an interference-free hop, bit/s."""
    return _hd_capacity(bandwidth, power, gain, n0)


def fd_shared_capacities(double bandwidth, double p_first, double p_second,
                         double g_first, double g_second, double g_self,
                         double g_cross, double n0):
    """Rates of the two simultaneous shared-band hops, bit/s."""
    cdef double k = bandwidth * n0
    cdef double c1 = bandwidth * log1p(p_first * g_first / (k + p_second * g_self)) / LN2
    cdef double c2 = bandwidth * log1p(p_second * g_second / (k + p_first * g_cross)) / LN2
    return c1, c2


def required_power_hd(double slot, double bandwidth, double data_bits,
                      double gain, double n0):
    """Transmit power that carries ``data_bits`` in ``slot`` seconds."""
    return _required_power(slot, bandwidth, data_bits, gain, n0)


def hd_hop_energy(double slot, double bandwidth, double data_bits,
                  double gain, double n0):
    """slot * required power; the per-hop objective term."""
    return _hop_energy(slot, bandwidth, data_bits, gain, n0)


def hd_energy_slope(double slot, double bandwidth, double data_bits,
                    double gain, double n0):
    """d/dt of the per-hop energy; strictly negative, increasing in t."""
    return _energy_slope(slot, bandwidth, data_bits, gain, n0)


def min_slot_hd(double bandwidth, double data_bits, double gain, double n0,
                double power_max):
    """Shortest slot allowed by the power cap."""
    return _min_slot(bandwidth, data_bits, gain, n0, power_max)


def slot_for_slope(double slope_mag, double bandwidth, double data_bits,
                   double gain, double n0):
    """Slot at which the energy slope equals ``-slope_mag`` (closed form)."""
    return _slot_for_slope(slope_mag, bandwidth, data_bits, gain, n0)


def min_bandwidth_hd(double slot, double bandwidth_max, double data_bits,
                     double gain, double n0, double power_max, double tol):
    """Smallest band (within the cap) meeting the power cap; inf if none."""
    return _min_bandwidth(slot, bandwidth_max, data_bits, gain, n0,
                          power_max, tol)


def fd_shared_powers(double slot, double bandwidth, double data_bits,
                     double g_first, double g_second, double g_self,
                     double g_cross, double n0):
    """Decoupled shared-band powers; returns (ok, p_first, p_second)."""
    cdef double p1 = 0.0, p2 = 0.0
    cdef int ok = _fd_powers(slot, bandwidth, data_bits, g_first, g_second,
                             g_self, g_cross, n0, &p1, &p2)
    return ok, p1, p2


# ---------------------------------------------------------------------------
# scheme solves
# ---------------------------------------------------------------------------

def solve_hd_chain(double budget, double data_bits, int nhops, double g1,
                   double g2, double g3, double bandwidth, double n0,
                   double power_max, double tol):
    """Optimal sequential half-duplex chain over 1..3 hops at full band."""
    cdef double gains[3]
    cdef double lows[3]
    cdef double ts[3]
    cdef double ps[3]
    cdef double low_sum = 0.0, lam_hi, lam_lo, mid, total, scale, energy, t1, p1, t
    cdef int i, j
    if budget <= 0.0:
        return 0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, INFINITY
    gains[0] = g1; gains[1] = g2; gains[2] = g3
    for i in range(nhops):
        lows[i] = _min_slot(bandwidth, data_bits, gains[i], n0, power_max)
        low_sum += lows[i]
    if low_sum > budget:
        return 0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, INFINITY

    if nhops == 1:
        t1 = budget
        p1 = _required_power(t1, bandwidth, data_bits, g1, n0)
        return 1, t1, 0.0, 0.0, p1, 0.0, 0.0, t1 * p1

    lam_hi = 1.0
    for j in range(400):
        total = 0.0
        for i in range(nhops):
            t = _slot_for_slope(lam_hi, bandwidth, data_bits, gains[i], n0)
            if t < lows[i]:
                t = lows[i]
            total += t
        if total <= budget:
            break
        lam_hi *= 8.0
    lam_lo = lam_hi
    for j in range(400):
        total = 0.0
        for i in range(nhops):
            t = _slot_for_slope(lam_lo, bandwidth, data_bits, gains[i], n0)
            if t < lows[i]:
                t = lows[i]
            total += t
        if total >= budget:
            break
        lam_lo *= 0.125
    for j in range(200):
        mid = sqrt(lam_lo * lam_hi)
        total = 0.0
        for i in range(nhops):
            t = _slot_for_slope(mid, bandwidth, data_bits, gains[i], n0)
            if t < lows[i]:
                t = lows[i]
            total += t
        if total > budget:
            lam_lo = mid
        else:
            lam_hi = mid
        if lam_hi - lam_lo <= tol * lam_hi:
            break
    total = 0.0
    for i in range(nhops):
        t = _slot_for_slope(lam_hi, bandwidth, data_bits, gains[i], n0)
        if t < lows[i]:
            t = lows[i]
        ts[i] = t
        total += t
    scale = budget / total
    energy = 0.0
    for i in range(nhops):
        ts[i] *= scale
        ps[i] = _required_power(ts[i], bandwidth, data_bits, gains[i], n0)
        energy += ts[i] * ps[i]
    for i in range(nhops, 3):
        ts[i] = 0.0
        ps[i] = 0.0
    return 1, ts[0], ts[1], ts[2], ps[0], ps[1], ps[2], energy


def solve_equal_split3(double budget, double data_bits, double g1, double g2,
                       double g3, double bandwidth, double n0,
                       double power_max):
    """Non-optimized 3-hop baseline: equal slots, full band, minimal power."""
    cdef double t, p1, p2, p3
    if budget <= 0.0:
        return 0, 0.0, 0.0, 0.0, 0.0, INFINITY
    t = budget / 3.0
    p1 = _required_power(t, bandwidth, data_bits, g1, n0)
    p2 = _required_power(t, bandwidth, data_bits, g2, n0)
    p3 = _required_power(t, bandwidth, data_bits, g3, n0)
    if p1 > power_max or p2 > power_max or p3 > power_max:
        return 0, 0.0, 0.0, 0.0, 0.0, INFINITY
    return 1, t, p1, p2, p3, t * (p1 + p2 + p3)


cdef inline double _fdo_pair(double t2, double b2f, double bandwidth_max,
                             double data_bits, double g2, double g3,
                             double n0) nogil:
    return (_hop_energy(t2, b2f, data_bits, g2, n0)
            + _hop_energy(t2, bandwidth_max - b2f, data_bits, g3, n0))


cdef inline double _fdo_inner(double t2, double bandwidth_max, double data_bits,
                              double g2, double g3, double n0,
                              double power_max, double tol,
                              double* b2_out) nogil:
    """Best overlapped-hop energy for a given shared slot."""
    cdef double mb2, mb3, b_lo, b_hi, span0, a, b, c, d, fc, fd, mid
    mb2 = _min_bandwidth(t2, bandwidth_max, data_bits, g2, n0, power_max,
                         tol * 1e-2)
    mb3 = _min_bandwidth(t2, bandwidth_max, data_bits, g3, n0, power_max,
                         tol * 1e-2)
    b_lo = mb2
    b_hi = bandwidth_max - mb3
    if not (isfinite(b_lo) and b_lo <= b_hi):
        b2_out[0] = 0.0
        return INFINITY
    span0 = b_hi - b_lo
    if span0 <= _POINT * bandwidth_max:
        mid = 0.5 * (b_lo + b_hi)
        b2_out[0] = mid
        return _fdo_pair(t2, mid, bandwidth_max, data_bits, g2, g3, n0)
    a = b_lo
    b = b_hi
    c = b - INVPHI * (b - a)
    d = a + INVPHI * (b - a)
    fc = _fdo_pair(t2, c, bandwidth_max, data_bits, g2, g3, n0)
    fd = _fdo_pair(t2, d, bandwidth_max, data_bits, g2, g3, n0)
    while b - a > tol * span0:
        if fc < fd:
            b = d; d = c; fd = fc
            c = b - INVPHI * (b - a)
            fc = _fdo_pair(t2, c, bandwidth_max, data_bits, g2, g3, n0)
        else:
            a = c; c = d; fc = fd
            d = a + INVPHI * (b - a)
            fd = _fdo_pair(t2, d, bandwidth_max, data_bits, g2, g3, n0)
    mid = 0.5 * (a + b)
    b2_out[0] = mid
    return _fdo_pair(t2, mid, bandwidth_max, data_bits, g2, g3, n0)


cdef inline int _fdo_splittable(double t2, double bandwidth_max,
                                double data_bits, double g2, double g3,
                                double n0, double power_max,
                                double tol) nogil:
    cdef double mb2 = _min_bandwidth(t2, bandwidth_max, data_bits, g2, n0,
                                     power_max, tol * 1e-2)
    cdef double mb3 = _min_bandwidth(t2, bandwidth_max, data_bits, g3, n0,
                                     power_max, tol * 1e-2)
    return isfinite(mb2) and isfinite(mb3) and mb2 + mb3 <= bandwidth_max


def solve_hd_fdo(double budget, double data_bits, double g1, double g2,
                 double g3, double bandwidth_max, double n0, double power_max,
                 double tol):
    """First hop half duplex, relayed hops simultaneous on split bands."""
    cdef double low1, t2_cap, lo, hi, mid, t2_min, t1_lo, t1_hi, t1, t2
    cdef double a, b, c, d, fc, fd, span0, val, b2, b3, p1, p2, p3, energy
    cdef double b2_tmp = 0.0
    if budget <= 0.0:
        return 0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, INFINITY
    low1 = _min_slot(bandwidth_max, data_bits, g1, n0, power_max)
    if low1 >= budget:
        return 0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, INFINITY

    t2_cap = budget - low1
    if not _fdo_splittable(t2_cap, bandwidth_max, data_bits, g2, g3, n0,
                           power_max, tol):
        return 0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, INFINITY
    lo = t2_cap * 1e-15
    hi = t2_cap
    while hi - lo > tol * 1e-2 * hi:
        mid = 0.5 * (lo + hi)
        if _fdo_splittable(mid, bandwidth_max, data_bits, g2, g3, n0,
                           power_max, tol):
            hi = mid
        else:
            lo = mid
    t2_min = hi

    t1_lo = low1
    t1_hi = budget - t2_min
    if t1_hi < t1_lo:
        if t1_hi < t1_lo * (1.0 - 1e-9):
            return 0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, INFINITY
        t1 = t1_lo
    elif t1_hi - t1_lo <= _POINT * budget:
        t1 = 0.5 * (t1_lo + t1_hi)
    else:
        a = t1_lo
        b = t1_hi
        span0 = b - a
        c = b - INVPHI * (b - a)
        d = a + INVPHI * (b - a)
        fc = (_fdo_inner(budget - c, bandwidth_max, data_bits, g2, g3, n0,
                         power_max, tol, &b2_tmp)
              + _hop_energy(c, bandwidth_max, data_bits, g1, n0))
        fd = (_fdo_inner(budget - d, bandwidth_max, data_bits, g2, g3, n0,
                         power_max, tol, &b2_tmp)
              + _hop_energy(d, bandwidth_max, data_bits, g1, n0))
        while b - a > tol * span0:
            if fc < fd:
                b = d; d = c; fd = fc
                c = b - INVPHI * (b - a)
                fc = (_fdo_inner(budget - c, bandwidth_max, data_bits, g2, g3,
                                 n0, power_max, tol, &b2_tmp)
                      + _hop_energy(c, bandwidth_max, data_bits, g1, n0))
            else:
                a = c; c = d; fc = fd
                d = a + INVPHI * (b - a)
                fd = (_fdo_inner(budget - d, bandwidth_max, data_bits, g2, g3,
                                 n0, power_max, tol, &b2_tmp)
                      + _hop_energy(d, bandwidth_max, data_bits, g1, n0))
        t1 = 0.5 * (a + b)

    t2 = budget - t1
    val = _fdo_inner(t2, bandwidth_max, data_bits, g2, g3, n0, power_max,
                     tol, &b2_tmp)
    if not isfinite(val):
        return 0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, INFINITY
    b2 = b2_tmp
    b3 = bandwidth_max - b2
    p1 = _required_power(t1, bandwidth_max, data_bits, g1, n0)
    p2 = _required_power(t2, b2, data_bits, g2, n0)
    p3 = _required_power(t2, b3, data_bits, g3, n0)
    energy = t1 * p1 + t2 * (p2 + p3)
    return 1, t1, t2, b2, b3, p1, p2, p3, energy


cdef inline int _fds_ok(double t2, double bandwidth_max, double data_bits,
                        double g2, double g3, double g_self, double g_cross,
                        double n0, double power_max) nogil:
    cdef double p2 = 0.0, p3 = 0.0
    cdef int ok = _fd_powers(t2, bandwidth_max, data_bits, g2, g3, g_self,
                             g_cross, n0, &p2, &p3)
    return ok == 1 and p2 <= power_max and p3 <= power_max


cdef inline double _fds_obj(double t1, double budget, double bandwidth_max,
                            double data_bits, double g1, double g2, double g3,
                            double g_self, double g_cross, double n0,
                            double power_max) nogil:
    cdef double t2 = budget - t1
    cdef double p2 = 0.0, p3 = 0.0
    cdef int ok = _fd_powers(t2, bandwidth_max, data_bits, g2, g3, g_self,
                             g_cross, n0, &p2, &p3)
    if ok != 1 or p2 > power_max or p3 > power_max:
        return INFINITY
    return _hop_energy(t1, bandwidth_max, data_bits, g1, n0) + t2 * (p2 + p3)


def solve_hd_fds(double budget, double data_bits, double g1, double g2,
                 double g3, double g_self, double g_cross,
                 double bandwidth_max, double n0, double power_max,
                 double tol):
    """First hop half duplex, relayed hops simultaneous on the full band."""
    cdef double low1, t2_cap, lo, hi, mid, t2_min, t1_lo, t1_hi, t1, t2
    cdef double a, b, c, d, fc, fd, span0, p1, energy
    cdef double p2 = 0.0, p3 = 0.0
    cdef int ok
    if budget <= 0.0:
        return 0, 0.0, 0.0, 0.0, 0.0, 0.0, INFINITY
    low1 = _min_slot(bandwidth_max, data_bits, g1, n0, power_max)
    if low1 >= budget:
        return 0, 0.0, 0.0, 0.0, 0.0, 0.0, INFINITY

    t2_cap = budget - low1
    if not _fds_ok(t2_cap, bandwidth_max, data_bits, g2, g3, g_self, g_cross,
                   n0, power_max):
        return 0, 0.0, 0.0, 0.0, 0.0, 0.0, INFINITY
    lo = t2_cap * 1e-15
    hi = t2_cap
    while hi - lo > tol * 1e-2 * hi:
        mid = 0.5 * (lo + hi)
        if _fds_ok(mid, bandwidth_max, data_bits, g2, g3, g_self, g_cross,
                   n0, power_max):
            hi = mid
        else:
            lo = mid
    t2_min = hi

    t1_lo = low1
    t1_hi = budget - t2_min
    if t1_hi < t1_lo:
        if t1_hi < t1_lo * (1.0 - 1e-9):
            return 0, 0.0, 0.0, 0.0, 0.0, 0.0, INFINITY
        t1 = t1_lo
    elif t1_hi - t1_lo <= _POINT * budget:
        t1 = 0.5 * (t1_lo + t1_hi)
    else:
        a = t1_lo
        b = t1_hi
        span0 = b - a
        c = b - INVPHI * (b - a)
        d = a + INVPHI * (b - a)
        fc = _fds_obj(c, budget, bandwidth_max, data_bits, g1, g2, g3,
                      g_self, g_cross, n0, power_max)
        fd = _fds_obj(d, budget, bandwidth_max, data_bits, g1, g2, g3,
                      g_self, g_cross, n0, power_max)
        while b - a > tol * span0:
            if fc < fd:
                b = d; d = c; fd = fc
                c = b - INVPHI * (b - a)
                fc = _fds_obj(c, budget, bandwidth_max, data_bits, g1, g2, g3,
                              g_self, g_cross, n0, power_max)
            else:
                a = c; c = d; fc = fd
                d = a + INVPHI * (b - a)
                fd = _fds_obj(d, budget, bandwidth_max, data_bits, g1, g2, g3,
                              g_self, g_cross, n0, power_max)
        t1 = 0.5 * (a + b)

    t2 = budget - t1
    ok = _fd_powers(t2, bandwidth_max, data_bits, g2, g3, g_self, g_cross,
                    n0, &p2, &p3)
    if ok != 1:
        return 0, 0.0, 0.0, 0.0, 0.0, 0.0, INFINITY
    p1 = _required_power(t1, bandwidth_max, data_bits, g1, n0)
    energy = t1 * p1 + t2 * (p2 + p3)
    return 1, t1, t2, p1, p2, p3, energy

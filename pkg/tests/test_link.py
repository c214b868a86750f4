import math

import numpy as np
import pytest

from mecrelay import link
from mecrelay.model import ChannelSet, RadioParams, TaskSpec
from mecrelay.verify import min_eig_trace_ratio, numerical_hessian
from tests.conftest import FLOOR_PSD

# frozen from an independent 40-digit evaluation of the rate formula at
# b=20 MHz, p=0.1 W, g=1e-13 over the -174/-150 dBm/Hz floor
RATE_REFERENCE = 14366.166426639010


def toy_params(floor=1.0, bandwidth=1.0, power=1.0):
    # unit-scale parameters for boundary arithmetic (floor split in half)
    return RadioParams(bandwidth_max=bandwidth, power_max=power,
                       noise_psd=floor / 2, background_interference_psd=floor / 2,
                       carrier_freq=1.0)


class TestHopNoiseFloor:
    def test_tracks_bandwidth(self, radio):
        half = link.HopNoiseFloor.for_bandwidth(10e6, radio)
        full = link.HopNoiseFloor.for_bandwidth(20e6, radio)
        assert full.k == pytest.approx(2 * half.k, rel=1e-12)
        assert full.k == pytest.approx(20e6 * FLOOR_PSD, rel=1e-12)
        assert full.k > 0


class TestHdCapacity:
    def test_zero_power_zero_rate(self, radio):
        assert link.hd_capacity(20e6, 0.0, 1e-9, radio) == 0.0

    def test_unit_snr_gives_bandwidth(self, radio):
        # p*g = b*(sigma+I_b) makes the log term exactly 1
        b = 20e6
        p = b * radio.floor_psd / 1e-9
        assert link.hd_capacity(b, p, 1e-9, radio) == pytest.approx(b, rel=1e-12)

    def test_frozen_reference_value(self, radio):
        assert radio.floor_psd == pytest.approx(FLOOR_PSD, rel=1e-14)
        rate = link.hd_capacity(20e6, 0.1, 1e-13, radio)
        assert rate == pytest.approx(RATE_REFERENCE, rel=1e-12)

    def test_monotone_in_power_and_bandwidth(self, radio):
        rng = np.random.default_rng(2)
        for _ in range(50):
            b = rng.uniform(1e6, 20e6)
            p = rng.uniform(1e-3, 0.1)
            g = 10 ** rng.uniform(-12, -8)
            r = link.hd_capacity(b, p, g, radio)
            assert link.hd_capacity(b, p * 1.1, g, radio) > r
            assert link.hd_capacity(b * 1.1, p, g, radio) > r


class TestFdSharedCapacities:
    def _channels(self, g_self, g_cross):
        return ChannelSet.three_hop(1e-9, 2e-10, 3e-10, g_self, g_cross)

    def test_zero_interference_reduces_to_hd(self, radio):
        ch = self._channels(0.0, 0.0)
        c1, c2 = link.fd_shared_capacities(20e6, 0.05, 0.08, ch, radio)
        assert c1 == pytest.approx(link.hd_capacity(20e6, 0.05, 2e-10, radio), rel=1e-12)
        assert c2 == pytest.approx(link.hd_capacity(20e6, 0.08, 3e-10, radio), rel=1e-12)

    def test_zero_powers(self, radio):
        ch = self._channels(1e-11, 1e-11)
        assert link.fd_shared_capacities(20e6, 0.0, 0.0, ch, radio) == (0.0, 0.0)

    def test_symmetric_instance(self, radio):
        ch = ChannelSet.three_hop(1e-9, 2e-10, 2e-10, 1e-11, 1e-11)
        c1, c2 = link.fd_shared_capacities(20e6, 0.05, 0.05, ch, radio)
        assert c1 == pytest.approx(c2, rel=1e-14)

    def test_interference_reduces_rate(self, radio):
        clean = self._channels(0.0, 0.0)
        dirty = self._channels(1e-10, 1e-10)
        c1_clean, c2_clean = link.fd_shared_capacities(20e6, 0.05, 0.08, clean, radio)
        c1_dirty, c2_dirty = link.fd_shared_capacities(20e6, 0.05, 0.08, dirty, radio)
        assert c1_dirty < c1_clean and c2_dirty < c2_clean


class TestRequiredPower:
    def test_unit_exponent(self):
        # t*b = D makes the required SNR exactly 1, so p = K/g
        params = toy_params(floor=2.0, bandwidth=4.0)
        p = link.required_power_hd(0.25, 4.0, 1.0, 0.5, params)
        assert p == pytest.approx(4.0 * 2.0 / 0.5, rel=1e-12)

    def test_vanishes_for_long_slots(self, radio):
        prev = math.inf
        for t in [0.01, 0.1, 1.0, 10.0, 1e3, 1e6, 1e9]:
            p = link.required_power_hd(t, 20e6, 1e6, 1e-10, radio)
            assert p < prev
            prev = p
        assert prev < 1e-11

    def test_round_trip_against_capacity(self, radio):
        rng = np.random.default_rng(3)
        for _ in range(300):
            t = rng.uniform(1e-3, 2.0)
            b = rng.uniform(1e6, 20e6)
            d = rng.uniform(1e5, 4e6)
            g = 10 ** rng.uniform(-13, -8)
            p = link.required_power_hd(t, b, d, g, radio)
            delivered = link.hd_capacity(b, p, g, radio) * t
            assert delivered == pytest.approx(d, rel=1e-9)

    def test_overflow_guard(self, radio):
        assert math.isinf(link.required_power_hd(1e-12, 1.0, 1e6, 1e-9, radio))


class TestMinSlot:
    def test_unit_slot_construction(self):
        # g*P_max = K and b = D numerically -> slot of exactly 1 s
        params = toy_params(floor=1.0, bandwidth=1.0, power=1.0)
        assert link.min_slot_hd(1.0, 1.0, 1.0, params) == pytest.approx(1.0, rel=1e-12)

    def test_power_cap_met_with_equality(self, radio):
        rng = np.random.default_rng(4)
        for _ in range(200):
            b = rng.uniform(1e6, 20e6)
            d = rng.uniform(1e5, 4e6)
            g = 10 ** rng.uniform(-12, -8)
            slot = link.min_slot_hd(b, d, g, radio)
            p = link.required_power_hd(slot, b, d, g, radio)
            assert p == pytest.approx(radio.power_max, rel=1e-9)

    def test_doubling_gain_shrinks_slot(self, radio):
        for g in [1e-12, 1e-10, 1e-8]:
            s1 = link.min_slot_hd(20e6, 1e6, g, radio)
            s2 = link.min_slot_hd(20e6, 1e6, 2 * g, radio)
            assert s2 < s1


class TestFdSharedPowers:
    def _channels(self, g_self=1e-11, g_cross=5e-11):
        return ChannelSet.three_hop(1e-9, 2e-10, 3e-10, g_self, g_cross)

    def test_decoupled_limit(self, radio):
        ch = self._channels(0.0, 0.0)
        got = link.fd_shared_powers(0.1, 20e6, 1e6, ch, radio)
        assert got is not None
        p2, p3 = got
        assert p2 == pytest.approx(link.required_power_hd(0.1, 20e6, 1e6, 2e-10, radio), rel=1e-12)
        assert p3 == pytest.approx(link.required_power_hd(0.1, 20e6, 1e6, 3e-10, radio), rel=1e-12)

    def test_back_substitution_residual(self, radio):
        rng = np.random.default_rng(5)
        checked = 0
        while checked < 200:
            g2, g3 = 10 ** rng.uniform(-11, -8.5, size=2)
            gs, gc = 10 ** rng.uniform(-13, -10, size=2)
            t = rng.uniform(5e-3, 1.0)
            d = rng.uniform(0.5e6, 2e6)
            ch = ChannelSet.three_hop(1e-9, g2, g3, gs, gc)
            got = link.fd_shared_powers(t, 20e6, d, ch, radio)
            if got is None:
                continue
            p2, p3 = got
            gamma = 2.0 ** (d / (t * 20e6)) - 1.0
            k = 20e6 * radio.floor_psd
            assert (k + p3 * gs) * gamma / g2 == pytest.approx(p2, rel=1e-9)
            assert (k + p2 * gc) * gamma / g3 == pytest.approx(p3, rel=1e-9)
            checked += 1

    def test_infeasible_exactly_past_coupling_boundary(self, radio):
        ch = self._channels(g_self=1e-10, g_cross=1e-10)
        beta = (1e-10 / 2e-10) * (1e-10 / 3e-10)
        gamma_crit = 1.0 / math.sqrt(beta)
        d = 1e6
        # slot at which Gamma crosses 1/sqrt(beta), from the closed form
        t_crit = d / (20e6 * math.log2(1.0 + gamma_crit))
        assert link.fd_shared_powers(t_crit * 1.0001, 20e6, d, ch, radio) is not None
        assert link.fd_shared_powers(t_crit * 0.9999, 20e6, d, ch, radio) is None

    def test_infeasibility_monotone_in_slot(self, radio):
        ch = self._channels(g_self=3e-10, g_cross=3e-10)
        slots = np.geomspace(1e-4, 2.0, 400)
        flags = [link.fd_shared_powers(t, 20e6, 1.5e6, ch, radio) is not None
                 for t in slots]
        assert flags == sorted(flags)  # infeasible prefix, feasible suffix


class TestComputeDelayAndEnergy:
    def test_table_corner(self):
        assert link.compute_delay(TaskSpec(2e6, 2000, 1.0, 4e10)) == pytest.approx(0.1, rel=1e-12)

    def test_smallest_draw(self):
        assert link.compute_delay(TaskSpec(0.5e6, 1500, 1.0, 4e10)) == pytest.approx(0.01875, rel=1e-12)

    def test_linear_in_data(self):
        one = link.compute_delay(TaskSpec(1e6, 1700, 1.0, 4e10))
        two = link.compute_delay(TaskSpec(2e6, 1700, 1.0, 4e10))
        assert two == pytest.approx(2 * one, rel=1e-12)

    def test_energy_of(self):
        assert link.energy_of([], []) == 0.0
        assert link.energy_of([0.1, 0.2], [0.0, 0.0]) == 0.0
        assert link.energy_of([0.1, 0.2], [0.05, 0.1]) == pytest.approx(0.025, rel=1e-12)
        assert link.energy_of([0.2, 0.1], [0.1, 0.05]) == pytest.approx(0.025, rel=1e-12)

    def test_energy_of_rejects_bad_input(self):
        with pytest.raises(ValueError):
            link.energy_of([0.1], [0.1, 0.2])
        with pytest.raises(ValueError):
            link.energy_of([-0.1], [0.1])


class TestShapeProperties:
    """Numerical grounding of the monotonicity/convexity facts the scheme
    solvers rely on."""

    def test_hop_energy_decreasing_in_bandwidth(self, radio):
        rng = np.random.default_rng(6)
        for _ in range(20):
            t = rng.uniform(5e-3, 1.0)
            d = rng.uniform(0.5e6, 2e6)
            g = 10 ** rng.uniform(-11, -8.5)
            bands = np.sort(rng.uniform(1e5, radio.bandwidth_max, size=100))
            energies = [t * link.required_power_hd(t, b, d, g, radio) for b in bands]
            assert all(e2 < e1 for e1, e2 in zip(energies, energies[1:]))

    def test_required_power_decreasing_convex_in_slot(self, radio):
        rng = np.random.default_rng(7)
        for _ in range(50):
            d = rng.uniform(0.5e6, 2e6)
            g = 10 ** rng.uniform(-11, -8.5)
            t = rng.uniform(2e-2, 1.0)
            h = 1e-4 * t
            pm, p0, pp = (link.required_power_hd(t + dt, 20e6, d, g, radio)
                          for dt in (-h, 0.0, h))
            assert pp < p0 < pm
            second = (pp - 2 * p0 + pm) / h ** 2
            assert second >= -1e-6 * abs(p0) / t ** 2

    def test_hop_energy_hessian_psd(self, radio):
        # e(t, b) jointly convex on 1000 random feasible points
        rng = np.random.default_rng(8)
        worst = math.inf
        for _ in range(1000):
            d = rng.uniform(0.5e6, 2e6)
            g = 10 ** rng.uniform(-11, -8.5)

            def f(x):
                return x[0] * link.required_power_hd(x[0], x[1], d, g, radio)

            x = np.array([rng.uniform(2e-2, 1.0),
                          rng.uniform(0.1, 1.0) * radio.bandwidth_max])
            h = numerical_hessian(f, x)
            worst = min(worst, min_eig_trace_ratio(h))
        assert worst >= -1e-6

import math

import numpy as np
import pytest

from mecrelay import schemes
from mecrelay.model import (Allocation, ChannelSet, DeadlineBelowComputeDelay,
                            NonPositiveField, RadioParams, SchemeId, TaskSpec,
                            dbm_per_hz_to_w_per_hz, validate, verify_allocation,
                            w_per_hz_to_dbm_per_hz)
from tests.conftest import make_scenario


class TestInvariants:
    def test_radio_params_reject_nonpositive(self, radio):
        for field, bad in [("bandwidth_max", 0.0), ("power_max", -1.0),
                           ("noise_psd", float("nan")),
                           ("background_interference_psd", float("inf")),
                           ("carrier_freq", 0.0)]:
            kwargs = dict(bandwidth_max=radio.bandwidth_max,
                          power_max=radio.power_max,
                          noise_psd=radio.noise_psd,
                          background_interference_psd=radio.background_interference_psd,
                          carrier_freq=radio.carrier_freq)
            kwargs[field] = bad
            with pytest.raises(NonPositiveField):
                RadioParams(**kwargs)

    def test_task_spec_rejects_nonpositive(self):
        with pytest.raises(NonPositiveField):
            TaskSpec(0.0, 1750, 0.6, 40e9)
        with pytest.raises(NonPositiveField):
            TaskSpec(1e6, 1750, -0.6, 40e9)

    def test_zero_gain_rejected(self):
        with pytest.raises(NonPositiveField):
            ChannelSet.single_hop(0.0)
        with pytest.raises(NonPositiveField):
            ChannelSet.three_hop(1e-9, 0.0, 1e-9, 1e-11, 1e-11)

    def test_gain_above_one_rejected(self):
        with pytest.raises(NonPositiveField):
            ChannelSet.single_hop(1.5)

    def test_interference_gain_zero_allowed(self):
        ch = ChannelSet.three_hop(1e-9, 1e-9, 1e-9, 0.0, 0.0)
        assert ch.self_interference_gain == 0.0

    def test_hop_count_bounds(self):
        with pytest.raises(NonPositiveField):
            ChannelSet(())
        with pytest.raises(NonPositiveField):
            ChannelSet((1e-9,) * 4)


class TestValidate:
    def test_table_midpoint_is_valid(self, radio):
        task = TaskSpec(1.25e6, 1750, 0.6, 40e9)
        scen = validate(radio, task, ChannelSet.single_hop(1e-9))
        assert scen.task.compute_delay() == pytest.approx(0.0546875, rel=1e-12)
        assert scen.task.compute_delay() == pytest.approx(0.0547, rel=1e-3)

    def test_deadline_below_compute_delay(self, radio):
        task = TaskSpec(2e6, 2000, 0.05, 40e9)
        assert task.compute_delay() == pytest.approx(0.1, rel=1e-12)
        with pytest.raises(DeadlineBelowComputeDelay):
            validate(radio, task, ChannelSet.single_hop(1e-9))

    def test_deadline_equal_compute_delay_rejected(self, radio):
        task = TaskSpec(2e6, 2000, 0.1, 40e9)
        with pytest.raises(DeadlineBelowComputeDelay):
            validate(radio, task, ChannelSet.single_hop(1e-9))


class TestUnitRoundTrip:
    def test_dbm_per_hz_round_trip(self):
        rng = np.random.default_rng(1)
        for x in list(rng.uniform(-200, -50, size=200)) + [-174.0, -150.0]:
            back = w_per_hz_to_dbm_per_hz(dbm_per_hz_to_w_per_hz(x))
            assert back == pytest.approx(x, rel=1e-12, abs=1e-12)

    def test_table_values_linear(self):
        assert dbm_per_hz_to_w_per_hz(-174.0) == pytest.approx(3.9810717055349725e-21, rel=1e-12)
        assert dbm_per_hz_to_w_per_hz(-150.0) == pytest.approx(1e-18, rel=1e-12)


class TestVerifier:
    def _solved(self, radio):
        scen = make_scenario(radio, (3e-10, 4e-10, 2e-10))
        alloc = schemes.solve_hd_hd(scen)
        assert alloc.feasible
        return scen, alloc

    def test_clean_allocation_passes(self, radio):
        scen, alloc = self._solved(radio)
        assert verify_allocation(alloc, scen) == []

    def test_catches_power_above_cap(self, radio):
        scen, alloc = self._solved(radio)
        bad = Allocation(alloc.scheme_id, alloc.time_slots,
                         (radio.power_max * 1.01,) + alloc.powers[1:],
                         alloc.bandwidths, alloc.total_energy, True,
                         alloc.comm_delay)
        assert any("power" in p for p in verify_allocation(bad, scen))

    def test_catches_bandwidth_above_cap(self, radio):
        scen, alloc = self._solved(radio)
        bad = Allocation(alloc.scheme_id, alloc.time_slots, alloc.powers,
                         (radio.bandwidth_max * 1.01,) + alloc.bandwidths[1:],
                         alloc.total_energy, True, alloc.comm_delay)
        assert any("bandwidth" in p for p in verify_allocation(bad, scen))

    def test_catches_deadline_violation(self, radio):
        scen, alloc = self._solved(radio)
        bad = Allocation(alloc.scheme_id, alloc.time_slots, alloc.powers,
                         alloc.bandwidths, alloc.total_energy, True,
                         scen.task.deadline * 2)
        assert any("budget" in p for p in verify_allocation(bad, scen))

    def test_catches_energy_mismatch(self, radio):
        scen, alloc = self._solved(radio)
        bad = Allocation(alloc.scheme_id, alloc.time_slots, alloc.powers,
                         alloc.bandwidths, alloc.total_energy * 1.001, True,
                         alloc.comm_delay)
        assert any("total_energy" in p for p in verify_allocation(bad, scen))

    def test_catches_undersized_throughput(self, radio):
        scen, alloc = self._solved(radio)
        bad = Allocation(alloc.scheme_id, alloc.time_slots,
                         tuple(p * 0.9 for p in alloc.powers),
                         alloc.bandwidths,
                         sum(t * p * 0.9 for t, p in zip(alloc.time_slots, alloc.powers)),
                         True, alloc.comm_delay)
        assert any("delivered" in p for p in verify_allocation(bad, scen))

    def test_infeasible_is_vacuous(self, radio):
        scen, _ = self._solved(radio)
        assert verify_allocation(Allocation.infeasible(SchemeId.HD_HD), scen) == []

    def test_every_scheme_output_audits_clean(self, radio):
        from tests.conftest import random_scenarios
        for scen in random_scenarios(radio, 10, seed=42):
            for solver in (schemes.solve_hd_hd, schemes.solve_hd_fdo,
                           schemes.solve_hd_fds, schemes.baseline_three_hop_unopt):
                alloc = solver(scen)
                assert verify_allocation(alloc, scen) == []

    def test_infeasible_energy_is_inf_sentinel(self, radio):
        scen = make_scenario(radio, (1e-14, 1e-14, 1e-14), deadline=0.2)
        alloc = schemes.solve_hd_hd(scen)
        assert not alloc.feasible
        assert math.isinf(alloc.total_energy)

"""Per-scheme allocation solvers and the four comparison baselines.

Each solver takes a validated scenario and returns an Allocation; an
infeasible drop comes back as the inf-energy sentinel rather than an
error so the harness can count failures per scheme.  The numeric work
happens in the selected kernel backend.
"""

from __future__ import annotations

from dataclasses import dataclass

from mecrelay._core import kernels as _k
from mecrelay.model import Allocation, Scenario, SchemeId


@dataclass(frozen=True)
class SchemeConfig:
    """Knobs of the baseline policies and the full-duplex residual SI."""

    si_cancellation_db: float = 110.0
    baseline_time_policy: str = "equal-split"

    def __post_init__(self):
        if self.si_cancellation_db < 0:
            raise ValueError("si_cancellation_db must be nonnegative")
        if self.baseline_time_policy != "equal-split":
            raise ValueError("only the equal-split baseline policy exists")

    @property
    def self_interference_gain(self) -> float:
        return 10.0 ** (-self.si_cancellation_db / 10.0)


DEFAULT_TOL = 1e-9


def solve_hd_hd(scenario: Scenario, tol: float = DEFAULT_TOL) -> Allocation:
    """Both relays half duplex: three sequential slots, full band each.

    Slots equalize marginal energies over the communication budget with
    power-cap lower bounds; powers follow from the capacity inversion.
    """
    p = scenario.params
    t = scenario.task
    g1, g2, g3 = scenario.channels.hop_gains
    ok, t1, t2, t3, p1, p2, p3, energy = _k.solve_hd_chain(
        t.comm_budget(), t.data_bits, 3, g1, g2, g3,
        p.bandwidth_max, p.floor_psd, p.power_max, tol)
    if ok != 1:
        return Allocation.infeasible(SchemeId.HD_HD)
    return Allocation(SchemeId.HD_HD, (t1, t2, t3), (p1, p2, p3),
                      (p.bandwidth_max,) * 3, energy, True, t1 + t2 + t3)


def solve_hd_fdo(scenario: Scenario, tol: float = DEFAULT_TOL) -> Allocation:
    """First relay half duplex, second full duplex on orthogonal bands.

    The two relayed hops run simultaneously in the shared second slot, so
    wall-clock delay is t1 + t2 while three hops consume energy.
    """
    p = scenario.params
    t = scenario.task
    g1, g2, g3 = scenario.channels.hop_gains
    ok, t1, t2, b2, b3, p1, p2, p3, energy = _k.solve_hd_fdo(
        t.comm_budget(), t.data_bits, g1, g2, g3,
        p.bandwidth_max, p.floor_psd, p.power_max, tol)
    if ok != 1:
        return Allocation.infeasible(SchemeId.HD_FDO)
    return Allocation(SchemeId.HD_FDO, (t1, t2, t2), (p1, p2, p3),
                      (p.bandwidth_max, b2, b3), energy, True, t1 + t2)


def solve_hd_fds(scenario: Scenario, tol: float = DEFAULT_TOL) -> Allocation:
    """First relay half duplex, second full duplex reusing the whole band.

    The overlapped hops interfere (residual self-interference at the relay,
    cross interference at the destination); their powers come from the
    decoupled closed form of the coupled rate equations.
    """
    p = scenario.params
    t = scenario.task
    ch = scenario.channels
    g1, g2, g3 = ch.hop_gains
    ok, t1, t2, p1, p2, p3, energy = _k.solve_hd_fds(
        t.comm_budget(), t.data_bits, g1, g2, g3,
        ch.self_interference_gain or 0.0, ch.cross_interference_gain or 0.0,
        p.bandwidth_max, p.floor_psd, p.power_max, tol)
    if ok != 1:
        return Allocation.infeasible(SchemeId.HD_FDS)
    return Allocation(SchemeId.HD_FDS, (t1, t2, t2), (p1, p2, p3),
                      (p.bandwidth_max,) * 3, energy, True, t1 + t2)


def baseline_local(task, ue_speed: float) -> Allocation:
    """Compute at the UE: no radio use; energy excluded from the metrics."""
    if ue_speed <= 0:
        raise ValueError("ue_speed must be positive")
    delay = task.cycles_per_bit * task.data_bits / ue_speed
    if delay > task.deadline:
        return Allocation.infeasible(SchemeId.LOCAL)
    return Allocation(SchemeId.LOCAL, (), (), (), 0.0, True, 0.0)


def baseline_direct(scenario: Scenario) -> Allocation:
    """Single-hop offload: full band, full budget (energy decreases with time)."""
    p = scenario.params
    t = scenario.task
    g = scenario.channels.hop_gains[0]
    ok, t1, _, _, p1, _, _, energy = _k.solve_hd_chain(
        t.comm_budget(), t.data_bits, 1, g, 0.0, 0.0,
        p.bandwidth_max, p.floor_psd, p.power_max, DEFAULT_TOL)
    if ok != 1:
        return Allocation.infeasible(SchemeId.DIRECT)
    return Allocation(SchemeId.DIRECT, (t1,), (p1,), (p.bandwidth_max,),
                      energy, True, t1)


def baseline_two_hop_hd(scenario: Scenario, tol: float = DEFAULT_TOL) -> Allocation:
    """One relay, half duplex, slot-optimized (the baseline gets its best case)."""
    p = scenario.params
    t = scenario.task
    g1, g2 = scenario.channels.hop_gains
    ok, t1, t2, _, p1, p2, _, energy = _k.solve_hd_chain(
        t.comm_budget(), t.data_bits, 2, g1, g2, 0.0,
        p.bandwidth_max, p.floor_psd, p.power_max, tol)
    if ok != 1:
        return Allocation.infeasible(SchemeId.TWO_HOP_HD)
    return Allocation(SchemeId.TWO_HOP_HD, (t1, t2), (p1, p2),
                      (p.bandwidth_max,) * 2, energy, True, t1 + t2)


def baseline_three_hop_unopt(scenario: Scenario) -> Allocation:
    """Two relays, half duplex, no optimization: equal slots, full band,
    minimal power per hop, feasible only if every hop stays under the cap."""
    p = scenario.params
    t = scenario.task
    g1, g2, g3 = scenario.channels.hop_gains
    ok, slot, p1, p2, p3, energy = _k.solve_equal_split3(
        t.comm_budget(), t.data_bits, g1, g2, g3,
        p.bandwidth_max, p.floor_psd, p.power_max)
    if ok != 1:
        return Allocation.infeasible(SchemeId.THREE_HOP_UNOPT)
    return Allocation(SchemeId.THREE_HOP_UNOPT, (slot,) * 3, (p1, p2, p3),
                      (p.bandwidth_max,) * 3, energy, True, 3 * slot)

"""Closed-form physical-layer math for all three relaying modes.

Thin typed layer over the selected kernel backend: capacities, the power
inversion that carries a task in a given slot, the power-cap slot bound,
and the coupled shared-band full-duplex powers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

from mecrelay._core import kernels as _k
from mecrelay.model import ChannelSet, RadioParams, TaskSpec


@dataclass(frozen=True)
class HopNoiseFloor:
    """Per-hop noise-plus-interference power K = b * (sigma + I_b), W.

    Bandwidth-dependent: recompute whenever the hop bandwidth changes.
    """

    k: float

    @classmethod
    def for_bandwidth(cls, bandwidth: float, params: RadioParams) -> "HopNoiseFloor":
        return cls(bandwidth * params.floor_psd)


def hd_capacity(bandwidth: float, power: float, gain: float,
                params: RadioParams) -> float:
    """Shannon rate of an interference-free hop, bit/s."""
    return _k.hd_capacity(bandwidth, power, gain, params.floor_psd)


def fd_shared_capacities(bandwidth: float, p_tx1: float, p_tx2: float,
                         channels: ChannelSet, params: RadioParams
                         ) -> Tuple[float, float]:
    """Rates of the two overlapped shared-band hops of a 3-hop route.

    ``p_tx1`` feeds the relayed hop into the second relay (whose own
    transmission leaks back through the self-interference gain) and
    ``p_tx2`` the final hop into the destination (which hears the first
    transmitter through the cross gain).
    """
    g_self = channels.self_interference_gain or 0.0
    g_cross = channels.cross_interference_gain or 0.0
    return _k.fd_shared_capacities(
        bandwidth, p_tx1, p_tx2,
        channels.hop_gains[1], channels.hop_gains[2],
        g_self, g_cross, params.floor_psd)


def required_power_hd(slot: float, bandwidth: float, data_bits: float,
                      gain: float, params: RadioParams) -> float:
    """Power carrying ``data_bits`` in ``slot`` seconds; inf if the slot is
    hopelessly short (exponent overflow)."""
    return _k.required_power_hd(slot, bandwidth, data_bits, gain, params.floor_psd)


def min_slot_hd(bandwidth: float, data_bits: float, gain: float,
                params: RadioParams) -> float:
    """Shortest slot the power cap allows on an interference-free hop."""
    return _k.min_slot_hd(bandwidth, data_bits, gain, params.floor_psd,
                          params.power_max)


def fd_shared_powers(slot: float, bandwidth: float, data_bits: float,
                     channels: ChannelSet, params: RadioParams
                     ) -> Optional[Tuple[float, float]]:
    """Decoupled powers of the overlapped shared-band hops.

    Returns None when the interference-coupled system has no positive
    solution (beta * Gamma^2 >= 1): the slot is too short for shared-band
    full duplex at any power.
    """
    g_self = channels.self_interference_gain or 0.0
    g_cross = channels.cross_interference_gain or 0.0
    ok, p2, p3 = _k.fd_shared_powers(
        slot, bandwidth, data_bits,
        channels.hop_gains[1], channels.hop_gains[2],
        g_self, g_cross, params.floor_psd)
    if ok != 1:
        return None
    return p2, p3


def compute_delay(task: TaskSpec) -> float:
    """Server processing time c*D/F_M, s."""
    return task.compute_delay()


def energy_of(slots: Sequence[float], powers: Sequence[float]) -> float:
    """Sum of slot * power over transmitting hops, J."""
    if len(slots) != len(powers):
        raise ValueError("slots and powers must have equal length")
    if any(t < 0 for t in slots) or any(p < 0 for p in powers):
        raise ValueError("slots and powers must be nonnegative")
    return math.fsum(t * p for t, p in zip(slots, powers))

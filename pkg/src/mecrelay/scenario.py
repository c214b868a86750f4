"""Drop generation: geometry, path loss, channel gains, task randomness.

One drop is one Monte Carlo realization: task parameters, the UE-to-base
distance, and the two relay positions inside their corridor boxes.  Drops
are generated from counter-based substreams keyed by (seed, drop index),
so parallel evaluation order cannot change any result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np

from mecrelay.model import ChannelSet, NonPositiveField, db_to_linear

COST231_HATA_URBAN = "cost231-hata-urban"
FREE_SPACE = "free-space"
_SPEED_OF_LIGHT = 299_792_458.0


@dataclass(frozen=True)
class PathLossModel:
    """Deterministic distance -> loss mapping.

    The urban Hata variant includes the +3 dB metropolitan correction and
    clamps distances below ``min_distance_clamp`` (the model's nominal
    validity starts far above the distances used here; the clamp keeps the
    short-range extrapolation bounded).  Set the clamp to 0 for the raw
    extrapolated curve.
    """

    model_id: str = COST231_HATA_URBAN
    bs_height: float = 10.0            # m
    ue_height: float = 1.5             # m (recorded; the pinned variant omits the mobile correction)
    min_distance_clamp: float = 25.0   # m

    def __post_init__(self):
        if self.model_id not in (COST231_HATA_URBAN, FREE_SPACE):
            raise NonPositiveField(f"unknown path loss model {self.model_id!r}")


def path_loss_db(model: PathLossModel, distance: float, freq: float) -> float:
    """Path loss in dB at ``distance`` meters and carrier ``freq`` Hz."""
    if distance <= 0:
        raise NonPositiveField("distance must be positive")
    d_km = max(distance, model.min_distance_clamp) / 1000.0
    if model.model_id == FREE_SPACE:
        return 20.0 * math.log10(4.0 * math.pi * d_km * 1000.0 * freq / _SPEED_OF_LIGHT)
    f_mhz = freq / 1e6
    hb = model.bs_height
    return (46.3 + 33.9 * math.log10(f_mhz) - 13.82 * math.log10(hb)
            + (44.9 - 6.55 * math.log10(hb)) * math.log10(d_km) + 3.0)


def gain_from_distance(model: PathLossModel, distance: float, freq: float,
                       shadowing_db: float = 0.0) -> float:
    """Linear power gain, clipped into (0, 1]."""
    g = db_to_linear(-(path_loss_db(model, distance, freq) + shadowing_db))
    return min(g, 1.0)


@dataclass(frozen=True)
class ZoneBox:
    """Axis-aligned relay corridor box along the UE->BS segment.

    The x extent is a fraction range of the UE-BS distance, the y extent a
    fixed lateral half-width in meters.
    """

    frac_lo: float
    frac_hi: float
    half_width: float

    def __post_init__(self):
        if not 0.0 <= self.frac_lo < self.frac_hi <= 1.0:
            raise NonPositiveField("zone fractions must satisfy 0 <= lo < hi <= 1")
        if self.half_width < 0:
            raise NonPositiveField("zone half width must be nonnegative")

    def contains(self, xy: Tuple[float, float], span: float) -> bool:
        x, y = xy
        return (self.frac_lo * span <= x <= self.frac_hi * span
                and abs(y) <= self.half_width)


@dataclass(frozen=True)
class Geometry:
    """Drop geometry: distance range and the two relay corridor boxes."""

    distance_lo: float = 25.0
    distance_hi: float = 150.0
    relay1_zone: ZoneBox = ZoneBox(0.25, 0.50, 15.0)
    relay2_zone: ZoneBox = ZoneBox(0.50, 0.75, 15.0)
    min_node_distance: float = 1.0

    def __post_init__(self):
        if not 0 < self.distance_lo < self.distance_hi:
            raise NonPositiveField("need 0 < distance_lo < distance_hi")


@dataclass(frozen=True)
class TaskRanges:
    """Uniform draw ranges of the per-drop task parameters."""

    data_bits: Tuple[float, float] = (0.5e6, 2e6)
    cycles_per_bit: Tuple[float, float] = (1500.0, 2000.0)
    ue_speed: Tuple[float, float] = (0.5e9, 2e9)
    server_speed: float = 40e9


@dataclass(frozen=True)
class Drop:
    """One generated drop: geometry, channel gains, and task draw."""

    index: int
    ue_bs_distance: float
    relay1: Tuple[float, float]
    relay2: Tuple[float, float]
    data_bits: float
    cycles_per_bit: float
    ue_speed: float
    hop_gains: Tuple[float, float, float]      # UE->R1, R1->R2, R2->BS
    relay1_bs_gain: float                       # R1->BS (2-hop second hop = cross path)
    direct_gain: float                          # UE->BS
    self_interference_gain: float

    def channels3(self) -> ChannelSet:
        return ChannelSet.three_hop(*self.hop_gains,
                                    self_interference_gain=self.self_interference_gain,
                                    cross_interference_gain=self.relay1_bs_gain)

    def channels2(self) -> ChannelSet:
        return ChannelSet.two_hop(self.hop_gains[0], self.relay1_bs_gain)

    def channels1(self) -> ChannelSet:
        return ChannelSet.single_hop(self.direct_gain)

    def to_record(self) -> Dict[str, object]:
        return {
            "index": self.index,
            "ue_bs_distance_m": self.ue_bs_distance,
            "relay1_xy_m": list(self.relay1),
            "relay2_xy_m": list(self.relay2),
            "data_bits": self.data_bits,
            "cycles_per_bit": self.cycles_per_bit,
            "ue_speed_cps": self.ue_speed,
            "hop_gains": list(self.hop_gains),
            "relay1_bs_gain": self.relay1_bs_gain,
            "direct_gain": self.direct_gain,
            "self_interference_gain": self.self_interference_gain,
        }

    @classmethod
    def from_record(cls, rec: Dict[str, object]) -> "Drop":
        return cls(
            index=int(rec["index"]),
            ue_bs_distance=float(rec["ue_bs_distance_m"]),
            relay1=tuple(rec["relay1_xy_m"]),
            relay2=tuple(rec["relay2_xy_m"]),
            data_bits=float(rec["data_bits"]),
            cycles_per_bit=float(rec["cycles_per_bit"]),
            ue_speed=float(rec["ue_speed_cps"]),
            hop_gains=tuple(rec["hop_gains"]),
            relay1_bs_gain=float(rec["relay1_bs_gain"]),
            direct_gain=float(rec["direct_gain"]),
            self_interference_gain=float(rec["self_interference_gain"]),
        )


def generate_drop(seed: int, index: int, geometry: Geometry,
                  pathloss: PathLossModel, task_ranges: TaskRanges,
                  carrier_freq: float, si_cancellation_db: float,
                  shadowing_sigma_db: float = 0.0) -> Drop:
    """Generate drop ``index`` of stream ``seed``; bitwise reproducible.

    Draw order is part of the reproducibility contract: distance, relay
    positions, task size, cycles per bit, UE speed, then (only when
    enabled) the per-link shadowing terms.
    """
    rng = np.random.default_rng([seed, index])
    span = rng.uniform(geometry.distance_lo, geometry.distance_hi)

    def draw_relay(zone: ZoneBox) -> Tuple[float, float]:
        return (span * rng.uniform(zone.frac_lo, zone.frac_hi),
                rng.uniform(-zone.half_width, zone.half_width))

    ue = (0.0, 0.0)
    bs = (span, 0.0)
    for _ in range(64):
        r1 = draw_relay(geometry.relay1_zone)
        r2 = draw_relay(geometry.relay2_zone)
        dmin = geometry.min_node_distance
        if (_dist(ue, r1) > dmin and _dist(r1, r2) > dmin and _dist(r2, bs) > dmin):
            break
    else:
        raise RuntimeError("could not place relays min_node_distance apart")

    data_bits = rng.uniform(*task_ranges.data_bits)
    cycles = rng.uniform(*task_ranges.cycles_per_bit)
    ue_speed = rng.uniform(*task_ranges.ue_speed)

    if shadowing_sigma_db > 0.0:
        sh = rng.normal(0.0, shadowing_sigma_db, size=5)
    else:
        sh = np.zeros(5)

    def g(a: Tuple[float, float], b: Tuple[float, float], i: int) -> float:
        return gain_from_distance(pathloss, _dist(a, b), carrier_freq, sh[i])

    return Drop(
        index=index,
        ue_bs_distance=span,
        relay1=r1,
        relay2=r2,
        data_bits=data_bits,
        cycles_per_bit=cycles,
        ue_speed=ue_speed,
        hop_gains=(g(ue, r1, 0), g(r1, r2, 1), g(r2, bs, 2)),
        relay1_bs_gain=g(r1, bs, 3),
        direct_gain=g(ue, bs, 4),
        self_interference_gain=db_to_linear(-si_cancellation_db),
    )


def _dist(a: Tuple[float, float], b: Tuple[float, float]) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])

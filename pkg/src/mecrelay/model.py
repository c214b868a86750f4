"""Domain types, unit discipline, and validation shared by all modules.

Everything numeric is SI linear (W, Hz, s, bits).  dBm/Hz and dB exist only
at the config-parsing and reporting boundaries; the converters live here so
the conversion happens exactly once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple


class ModelError(ValueError):
    """Base class for scenario validation failures."""


class NonPositiveField(ModelError):
    """A field that must be strictly positive (and finite) is not."""


class DeadlineBelowComputeDelay(ModelError):
    """Server compute time alone exceeds the deadline: no offloading scheme
    can succeed on this drop."""


def dbm_per_hz_to_w_per_hz(value_dbm_hz: float) -> float:
    return 10.0 ** ((value_dbm_hz - 30.0) / 10.0)


def w_per_hz_to_dbm_per_hz(value_w_hz: float) -> float:
    return 10.0 * math.log10(value_w_hz) + 30.0


def db_to_linear(value_db: float) -> float:
    return 10.0 ** (value_db / 10.0)


def linear_to_db(value: float) -> float:
    return 10.0 * math.log10(value)


def _require_positive(**fields: float) -> None:
    for name, value in fields.items():
        if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
            raise NonPositiveField(f"{name} must be strictly positive and finite, got {value!r}")


class SchemeId(str, Enum):
    """Offloading schemes evaluated by the harness."""

    LOCAL = "local"
    DIRECT = "direct"
    TWO_HOP_HD = "2hop"
    THREE_HOP_UNOPT = "unopt3"
    HD_HD = "hdhd"
    HD_FDO = "hdfdo"
    HD_FDS = "hdfds"


#: Schemes that relay through at least one intermediate node; the common
#: success set of the normalized-energy metric is taken over these.
RELAYING_SCHEMES = (
    SchemeId.TWO_HOP_HD,
    SchemeId.THREE_HOP_UNOPT,
    SchemeId.HD_HD,
    SchemeId.HD_FDO,
    SchemeId.HD_FDS,
)


@dataclass(frozen=True)
class RadioParams:
    """Global radio constants.

    noise_psd and background_interference_psd are stored linear (W/Hz);
    convert from dBm/Hz at config parse only.
    """

    bandwidth_max: float        # Hz
    power_max: float            # W
    noise_psd: float            # W/Hz
    background_interference_psd: float  # W/Hz
    carrier_freq: float         # Hz

    def __post_init__(self):
        _require_positive(
            bandwidth_max=self.bandwidth_max,
            power_max=self.power_max,
            noise_psd=self.noise_psd,
            background_interference_psd=self.background_interference_psd,
            carrier_freq=self.carrier_freq,
        )

    @property
    def floor_psd(self) -> float:
        """Total receiver noise-plus-interference density sigma + I_b, W/Hz."""
        return self.noise_psd + self.background_interference_psd


@dataclass(frozen=True)
class TaskSpec:
    """One offloaded computing task plus its deadline and the server speed."""

    data_bits: float        # bits (D)
    cycles_per_bit: float   # cycles/bit (c)
    deadline: float         # s (T_max)
    server_speed: float     # cycles/s (F_M)

    def __post_init__(self):
        _require_positive(
            data_bits=self.data_bits,
            cycles_per_bit=self.cycles_per_bit,
            deadline=self.deadline,
            server_speed=self.server_speed,
        )

    def compute_delay(self) -> float:
        """Server processing time c*D/F_M, s."""
        return self.cycles_per_bit * self.data_bits / self.server_speed

    def comm_budget(self) -> float:
        """Time left for communication after the server compute share."""
        return self.deadline - self.compute_delay()


@dataclass(frozen=True)
class ChannelSet:
    """Linear power gains of one drop's relaying route.

    ``hop_gains`` holds 1 (direct), 2 (single relay) or 3 (two relays)
    consecutive-hop gains.  The interference gains matter only for the
    shared-band full-duplex case: ``self_interference_gain`` couples the
    second relay's transmitter into its own receiver, and
    ``cross_interference_gain`` couples the first relay's transmitter into
    the destination receiver.
    """

    hop_gains: Tuple[float, ...]
    self_interference_gain: Optional[float] = None
    cross_interference_gain: Optional[float] = None

    def __post_init__(self):
        if not 1 <= len(self.hop_gains) <= 3:
            raise NonPositiveField("hop_gains must carry 1, 2, or 3 gains")
        for i, g in enumerate(self.hop_gains):
            if not (math.isfinite(g) and 0.0 < g <= 1.0):
                raise NonPositiveField(f"hop gain {i} must be in (0, 1], got {g!r}")
        for name in ("self_interference_gain", "cross_interference_gain"):
            g = getattr(self, name)
            if g is not None and not (math.isfinite(g) and 0.0 <= g <= 1.0):
                raise NonPositiveField(f"{name} must be in [0, 1], got {g!r}")

    @classmethod
    def three_hop(cls, g1: float, g2: float, g3: float,
                  self_interference_gain: float,
                  cross_interference_gain: float) -> "ChannelSet":
        return cls((g1, g2, g3), self_interference_gain, cross_interference_gain)

    @classmethod
    def two_hop(cls, g1: float, g2: float) -> "ChannelSet":
        return cls((g1, g2))

    @classmethod
    def single_hop(cls, g: float) -> "ChannelSet":
        return cls((g,))

    @property
    def nhops(self) -> int:
        return len(self.hop_gains)


@dataclass(frozen=True)
class Scenario:
    """A validated (params, task, channels) triple; see :func:`validate`."""

    params: RadioParams
    task: TaskSpec
    channels: ChannelSet


def validate(params: RadioParams, task: TaskSpec, channels: ChannelSet) -> Scenario:
    """Check all cross-type invariants and return a scenario token.

    The per-type invariants already hold (enforced at construction); the
    one cross check is that the server compute time leaves room under the
    deadline, without which every offloading scheme fails.
    """
    if not (task.compute_delay() < task.deadline):
        raise DeadlineBelowComputeDelay(
            f"compute delay {task.compute_delay():.6g}s >= deadline {task.deadline:.6g}s"
        )
    return Scenario(params, task, channels)


@dataclass(frozen=True)
class Allocation:
    """Solver output for one scheme on one scenario.

    For schemes whose relayed hops transmit simultaneously, the overlapped
    hops repeat the shared slot in ``time_slots`` so that sum(t_n * p_n)
    remains the consumed energy, while ``comm_delay`` counts wall-clock
    time.  Infeasible allocations carry empty arrays and an ``inf`` energy
    sentinel so the harness can average over successes only.
    """

    scheme_id: SchemeId
    time_slots: Tuple[float, ...]
    powers: Tuple[float, ...]
    bandwidths: Tuple[float, ...]
    total_energy: float
    feasible: bool
    comm_delay: float

    @classmethod
    def infeasible(cls, scheme_id: SchemeId) -> "Allocation":
        return cls(scheme_id, (), (), (), math.inf, False, math.inf)


#: Relative slack used when re-checking resource caps on a returned
#: allocation; solver tolerances sit orders of magnitude below this.
CAP_RTOL = 1e-9


def verify_allocation(alloc: Allocation, scenario: Scenario,
                      ue_speed: Optional[float] = None) -> list[str]:
    """Independent re-check of a feasible allocation; returns violations.

    Recomputes, from the allocation fields alone: the resource caps, the
    energy bookkeeping, the deadline, and the delivered bits per hop (using
    the interference-coupled rates for the shared-band case).  An empty
    list means the allocation audits clean.
    """
    if not alloc.feasible:
        return []
    p = scenario.params
    task = scenario.task
    problems: list[str] = []

    if alloc.scheme_id is SchemeId.LOCAL:
        if ue_speed is None:
            problems.append("local allocation audit needs the UE speed")
        elif task.cycles_per_bit * task.data_bits / ue_speed > task.deadline * (1 + CAP_RTOL):
            problems.append("local compute time exceeds the deadline")
        return problems

    if not (len(alloc.time_slots) == len(alloc.powers) == len(alloc.bandwidths)):
        return ["ragged allocation arrays"]

    for i, (t, pw, b) in enumerate(zip(alloc.time_slots, alloc.powers, alloc.bandwidths)):
        if t <= 0 or pw < 0 or b <= 0:
            problems.append(f"hop {i}: non-positive slot/band or negative power")
        if pw > p.power_max * (1 + CAP_RTOL):
            problems.append(f"hop {i}: power {pw:.6g} above cap {p.power_max:.6g}")
        if b > p.bandwidth_max * (1 + CAP_RTOL):
            problems.append(f"hop {i}: bandwidth {b:.6g} above cap {p.bandwidth_max:.6g}")

    energy = sum(t * pw for t, pw in zip(alloc.time_slots, alloc.powers))
    if not math.isclose(energy, alloc.total_energy, rel_tol=CAP_RTOL, abs_tol=0.0):
        problems.append("total_energy does not match sum(slot * power)")

    budget = task.comm_budget()
    if alloc.comm_delay > budget + CAP_RTOL * task.deadline:
        problems.append(f"comm delay {alloc.comm_delay:.6g} exceeds budget {budget:.6g}")

    problems.extend(_check_throughput(alloc, scenario))
    return problems


def _check_throughput(alloc: Allocation, scenario: Scenario) -> list[str]:
    """Delivered bits per hop >= task size, from first principles."""
    from mecrelay import link  # local import: link depends on model

    p = scenario.params
    task = scenario.task
    ch = scenario.channels
    need = task.data_bits * (1 - CAP_RTOL)
    problems = []

    def hop_bits(i: int, gain: float) -> float:
        rate = link.hd_capacity(alloc.bandwidths[i], alloc.powers[i], gain, p)
        return rate * alloc.time_slots[i]

    if alloc.scheme_id in (SchemeId.DIRECT, SchemeId.TWO_HOP_HD,
                           SchemeId.THREE_HOP_UNOPT, SchemeId.HD_HD):
        for i, g in enumerate(ch.hop_gains[: len(alloc.time_slots)]):
            if hop_bits(i, g) < need:
                problems.append(f"hop {i}: delivered bits below task size")
    elif alloc.scheme_id is SchemeId.HD_FDO:
        if hop_bits(0, ch.hop_gains[0]) < need:
            problems.append("hop 0: delivered bits below task size")
        for i in (1, 2):
            if hop_bits(i, ch.hop_gains[i]) < need:
                problems.append(f"hop {i}: delivered bits below task size")
    elif alloc.scheme_id is SchemeId.HD_FDS:
        if hop_bits(0, ch.hop_gains[0]) < need:
            problems.append("hop 0: delivered bits below task size")
        c2, c3 = link.fd_shared_capacities(
            alloc.bandwidths[1], alloc.powers[1], alloc.powers[2],
            scenario.channels, p)
        if c2 * alloc.time_slots[1] < need:
            problems.append("hop 1: delivered bits below task size")
        if c3 * alloc.time_slots[2] < need:
            problems.append("hop 2: delivered bits below task size")
    return problems

"""Run configuration: parsing, validation, defaults.

One declarative YAML (or JSON) file plus CLI flag overrides drives a run.
Defaults mirror the evaluation settings (20 MHz band, 100 mW cap, -174 and
-150 dBm/Hz floors, 2 GHz carrier, task and distance draw ranges).  All
dB-to-linear conversion happens here, once, at the parse boundary.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, fields, is_dataclass
from typing import Any, Dict, List, Tuple

import yaml

from mecrelay.model import RadioParams, SchemeId, dbm_per_hz_to_w_per_hz
from mecrelay.scenario import Geometry, PathLossModel, TaskRanges, ZoneBox
from mecrelay.schemes import SchemeConfig


class ConfigError(ValueError):
    pass


DEFAULT_TMAX_GRID = tuple(round(0.1 * k, 10) for k in range(1, 11))
ALL_SCHEME_TOKENS = tuple(s.value for s in SchemeId)


@dataclass
class RadioConfig:
    bandwidth_max_hz: float = 20e6
    power_max_w: float = 0.1
    noise_psd_dbm_hz: float = -174.0
    background_interference_dbm_hz: float = -150.0
    carrier_freq_hz: float = 2e9


@dataclass
class GeometryConfig:
    distance_m: Tuple[float, float] = (25.0, 150.0)
    relay1_zone_frac: Tuple[float, float] = (0.25, 0.50)
    relay2_zone_frac: Tuple[float, float] = (0.50, 0.75)
    lateral_half_width_m: float = 15.0
    min_node_distance_m: float = 1.0


@dataclass
class PathLossConfig:
    model: str = "cost231-hata-urban"
    bs_height_m: float = 10.0
    ue_height_m: float = 1.5
    min_distance_clamp_m: float = 25.0


@dataclass
class TaskConfig:
    data_bits: Tuple[float, float] = (0.5e6, 2e6)
    cycles_per_bit: Tuple[float, float] = (1500.0, 2000.0)
    ue_speed_cps: Tuple[float, float] = (0.5e9, 2e9)
    server_speed_cps: float = 40e9


@dataclass
class RunConfig:
    seed: int = 12345
    drops: int = 20000
    tmax_grid: Tuple[float, ...] = DEFAULT_TMAX_GRID
    schemes: Tuple[str, ...] = ALL_SCHEME_TOKENS
    radio: RadioConfig = field(default_factory=RadioConfig)
    geometry: GeometryConfig = field(default_factory=GeometryConfig)
    path_loss: PathLossConfig = field(default_factory=PathLossConfig)
    task: TaskConfig = field(default_factory=TaskConfig)
    si_cancellation_db: float = 110.0
    shadowing_sigma_db: float = 0.0
    common_set: str = "all"
    workers: int = 0            # 0 = one per CPU
    out_dir: str = "results"
    tol_rel: float = 1e-9
    audit: bool = True
    dump_drops: bool = False
    oracle_mode: bool = False
    oracle_samples: int = 25

    def __post_init__(self):
        if self.drops < 1:
            raise ConfigError("drops must be >= 1")
        if len(self.tmax_grid) == 0 or any(t <= 0 for t in self.tmax_grid):
            raise ConfigError("tmax_grid must be a non-empty list of positive seconds")
        if list(self.tmax_grid) != sorted(self.tmax_grid):
            raise ConfigError("tmax_grid must be sorted ascending")
        unknown = [s for s in self.schemes if s not in ALL_SCHEME_TOKENS]
        if unknown:
            raise ConfigError(f"unknown schemes {unknown}; valid: {list(ALL_SCHEME_TOKENS)}")
        if len(set(self.schemes)) != len(self.schemes):
            raise ConfigError("duplicate scheme tokens")
        if self.common_set not in ("all", "direct"):
            raise ConfigError("common_set must be 'all' or 'direct'")
        if self.common_set == "direct" and "direct" not in self.schemes:
            raise ConfigError("common_set 'direct' needs the direct scheme enabled")
        if not 0.0 < self.tol_rel <= 1e-3:
            raise ConfigError("tol_rel must lie in (0, 1e-3]")
        if self.si_cancellation_db < 0:
            raise ConfigError("si_cancellation_db must be nonnegative")
        if self.workers < 0:
            raise ConfigError("workers must be nonnegative (0 = auto)")
        lo, hi = self.geometry.distance_m
        if not 0 < lo < hi:
            raise ConfigError("geometry.distance_m must be an increasing positive pair")

    # -- derived domain objects ------------------------------------------

    def radio_params(self) -> RadioParams:
        r = self.radio
        return RadioParams(
            bandwidth_max=r.bandwidth_max_hz,
            power_max=r.power_max_w,
            noise_psd=dbm_per_hz_to_w_per_hz(r.noise_psd_dbm_hz),
            background_interference_psd=dbm_per_hz_to_w_per_hz(
                r.background_interference_dbm_hz),
            carrier_freq=r.carrier_freq_hz,
        )

    def geometry_model(self) -> Geometry:
        g = self.geometry
        return Geometry(
            distance_lo=g.distance_m[0],
            distance_hi=g.distance_m[1],
            relay1_zone=ZoneBox(*g.relay1_zone_frac, g.lateral_half_width_m),
            relay2_zone=ZoneBox(*g.relay2_zone_frac, g.lateral_half_width_m),
            min_node_distance=g.min_node_distance_m,
        )

    def pathloss_model(self) -> PathLossModel:
        p = self.path_loss
        return PathLossModel(
            model_id=p.model,
            bs_height=p.bs_height_m,
            ue_height=p.ue_height_m,
            min_distance_clamp=p.min_distance_clamp_m,
        )

    def task_ranges(self) -> TaskRanges:
        t = self.task
        return TaskRanges(
            data_bits=tuple(t.data_bits),
            cycles_per_bit=tuple(t.cycles_per_bit),
            ue_speed=tuple(t.ue_speed_cps),
            server_speed=t.server_speed_cps,
        )

    def scheme_ids(self) -> List[SchemeId]:
        return [SchemeId(s) for s in self.schemes]

    def scheme_config(self) -> SchemeConfig:
        return SchemeConfig(si_cancellation_db=self.si_cancellation_db)

    def effective_workers(self) -> int:
        return self.workers if self.workers > 0 else (os.cpu_count() or 1)

    # -- serialization ----------------------------------------------------

    def to_dict(self) -> Dict[str, Any]:
        return _dataclass_to_dict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunConfig":
        return _dataclass_from_dict(cls, data, path="config")

    @classmethod
    def from_file(cls, path: str) -> "RunConfig":
        with open(path, "r", encoding="utf-8") as fh:
            data = yaml.safe_load(fh)
        if data is None:
            data = {}
        if not isinstance(data, dict):
            raise ConfigError(f"{path} must contain a mapping at top level")
        return cls.from_dict(data)


def _dataclass_to_dict(obj: Any) -> Any:
    if is_dataclass(obj):
        return {f.name: _dataclass_to_dict(getattr(obj, f.name)) for f in fields(obj)}
    if isinstance(obj, (list, tuple)):
        return [_dataclass_to_dict(v) for v in obj]
    return obj


def _dataclass_from_dict(cls, data: Dict[str, Any], path: str) -> Any:
    if not isinstance(data, dict):
        raise ConfigError(f"{path} must be a mapping, got {type(data).__name__}")
    allowed = {f.name: f for f in fields(cls)}
    unknown = set(data) - set(allowed)
    if unknown:
        raise ConfigError(f"unknown key(s) under {path}: {sorted(unknown)}")
    kwargs = {}
    for name, value in data.items():
        f = allowed[name]
        if is_dataclass(f.type) or (isinstance(f.type, str) and f.type in _SECTIONS):
            section_cls = _SECTIONS[f.type] if isinstance(f.type, str) else f.type
            kwargs[name] = _dataclass_from_dict(section_cls, value, f"{path}.{name}")
        elif isinstance(value, list):
            kwargs[name] = tuple(value)
        else:
            kwargs[name] = value
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise ConfigError(f"bad value under {path}: {exc}") from exc


_SECTIONS = {
    "RadioConfig": RadioConfig,
    "GeometryConfig": GeometryConfig,
    "PathLossConfig": PathLossConfig,
    "TaskConfig": TaskConfig,
}

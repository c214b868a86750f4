"""Monte Carlo experiment runner and metric aggregation.

Evaluates every enabled scheme on the same drop population across a
deadline grid, then aggregates three metrics per (deadline, scheme): the
success probability, the mean energy over the scheme's own successes, and
the mean energy over the common success set of the relaying schemes.
Drops are independent, so the pool workers each process an index range;
the reduction is by drop index and therefore identical for any worker
count.
"""

from __future__ import annotations

import csv
import json
import math
import multiprocessing as mp
import time
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from mecrelay import schemes as sch
from mecrelay._core import BACKEND
from mecrelay.config import RunConfig
from mecrelay.model import (RELAYING_SCHEMES, Allocation, Scenario, SchemeId,
                            TaskSpec, verify_allocation)
from mecrelay.scenario import Drop, generate_drop

CSV_SCHEMA = "mecrelay.metrics.v1"
SUMMARY_SCHEMA = "mecrelay.summary.v1"


class AuditError(RuntimeError):
    """An allocation failed the independent resource re-check."""


@dataclass(frozen=True)
class MetricsRow:
    tmax: float
    scheme: SchemeId
    drop_count: int
    successes: int
    success_probability: float
    mean_energy_success: float   # nan when undefined
    mean_energy_common: float    # nan when undefined
    common_count: int


@dataclass(frozen=True)
class MetricsTable:
    rows: Tuple[MetricsRow, ...]

    def by_scheme(self, scheme: SchemeId) -> List[MetricsRow]:
        return [r for r in self.rows if r.scheme is scheme]

    def row(self, tmax: float, scheme: SchemeId) -> MetricsRow:
        for r in self.rows:
            if r.scheme is scheme and math.isclose(r.tmax, tmax):
                return r
        raise KeyError((tmax, scheme))


@dataclass
class ExperimentResult:
    config: RunConfig
    feasible: np.ndarray   # (drops, n_tmax, n_schemes) bool
    energy: np.ndarray     # (drops, n_tmax, n_schemes) float, inf = failed
    audit_failures: List[str]
    runtime_s: float

    @property
    def scheme_ids(self) -> List[SchemeId]:
        return self.config.scheme_ids()


def evaluate_drop(cfg: RunConfig, drop: Drop) -> Tuple[np.ndarray, np.ndarray, List[str]]:
    """All enabled schemes on one drop over the deadline grid."""
    scheme_ids = cfg.scheme_ids()
    n_t = len(cfg.tmax_grid)
    n_s = len(scheme_ids)
    feas = np.zeros((n_t, n_s), dtype=bool)
    energy = np.full((n_t, n_s), np.inf)
    audit: List[str] = []

    params = cfg.radio_params()
    server = cfg.task.server_speed_cps
    ch3 = drop.channels3()
    ch2 = drop.channels2()
    ch1 = drop.channels1()
    tol = cfg.tol_rel

    for k, tmax in enumerate(cfg.tmax_grid):
        task = TaskSpec(drop.data_bits, drop.cycles_per_bit, tmax, server)
        offload_ok = task.compute_delay() < tmax
        for j, scheme in enumerate(scheme_ids):
            if scheme is SchemeId.LOCAL:
                alloc = sch.baseline_local(task, drop.ue_speed)
                scen = None
            elif not offload_ok:
                alloc = Allocation.infeasible(scheme)
                scen = None
            elif scheme is SchemeId.DIRECT:
                scen = Scenario(params, task, ch1)
                alloc = sch.baseline_direct(scen)
            elif scheme is SchemeId.TWO_HOP_HD:
                scen = Scenario(params, task, ch2)
                alloc = sch.baseline_two_hop_hd(scen, tol)
            elif scheme is SchemeId.THREE_HOP_UNOPT:
                scen = Scenario(params, task, ch3)
                alloc = sch.baseline_three_hop_unopt(scen)
            elif scheme is SchemeId.HD_HD:
                scen = Scenario(params, task, ch3)
                alloc = sch.solve_hd_hd(scen, tol)
            elif scheme is SchemeId.HD_FDO:
                scen = Scenario(params, task, ch3)
                alloc = sch.solve_hd_fdo(scen, tol)
            else:
                scen = Scenario(params, task, ch3)
                alloc = sch.solve_hd_fds(scen, tol)

            feas[k, j] = alloc.feasible
            energy[k, j] = alloc.total_energy if alloc.feasible else np.inf
            if cfg.audit and alloc.feasible:
                if scheme is SchemeId.LOCAL:
                    scen = Scenario(params, task, ch1)
                problems = verify_allocation(alloc, scen, ue_speed=drop.ue_speed)
                for msg in problems:
                    audit.append(
                        f"drop {drop.index} tmax {tmax:g} {scheme.value}: {msg}")
    return feas, energy, audit


def _make_drop(cfg: RunConfig, index: int) -> Drop:
    return generate_drop(
        cfg.seed, index, cfg.geometry_model(), cfg.pathloss_model(),
        cfg.task_ranges(), cfg.radio.carrier_freq_hz,
        cfg.si_cancellation_db, cfg.shadowing_sigma_db)


_worker_cfg: Optional[RunConfig] = None


def _init_worker(cfg: RunConfig) -> None:
    global _worker_cfg
    _worker_cfg = cfg


def _run_chunk(bounds: Tuple[int, int]):
    cfg = _worker_cfg
    start, stop = bounds
    n_t = len(cfg.tmax_grid)
    n_s = len(cfg.schemes)
    feas = np.zeros((stop - start, n_t, n_s), dtype=bool)
    energy = np.full((stop - start, n_t, n_s), np.inf)
    audit: List[str] = []
    for i in range(start, stop):
        drop = _make_drop(cfg, i)
        feas[i - start], energy[i - start], msgs = evaluate_drop(cfg, drop)
        audit.extend(msgs)
    return start, feas, energy, audit


def run_experiment(cfg: RunConfig) -> ExperimentResult:
    """Evaluate the whole drop population; deterministic given the config."""
    t0 = time.perf_counter()
    n_d, n_t, n_s = cfg.drops, len(cfg.tmax_grid), len(cfg.schemes)
    feas = np.zeros((n_d, n_t, n_s), dtype=bool)
    energy = np.full((n_d, n_t, n_s), np.inf)
    audit: List[str] = []

    workers = min(cfg.effective_workers(), n_d)
    chunk = max(1, math.ceil(n_d / (workers * 8)))
    bounds = [(i, min(i + chunk, n_d)) for i in range(0, n_d, chunk)]

    if workers <= 1:
        _init_worker(cfg)
        results = map(_run_chunk, bounds)
        for start, f, e, msgs in results:
            feas[start:start + len(f)] = f
            energy[start:start + len(e)] = e
            audit.extend(msgs)
    else:
        with mp.get_context("fork").Pool(workers, _init_worker, (cfg,)) as pool:
            for start, f, e, msgs in pool.imap_unordered(_run_chunk, bounds):
                feas[start:start + len(f)] = f
                energy[start:start + len(e)] = e
                audit.extend(msgs)
    audit.sort()
    return ExperimentResult(cfg, feas, energy, audit, time.perf_counter() - t0)


def common_success_set(feasible: np.ndarray, scheme_ids: Sequence[SchemeId],
                       policy: str = "all") -> np.ndarray:
    """Boolean drop mask of the normalized-energy comparison population.

    ``all``: drops every enabled relaying scheme completed in time (the
    non-relayed single-hop scheme is excluded from the intersection).
    ``direct``: drops the non-relayed scheme completed in time.
    ``feasible`` is (drops, n_schemes) for one deadline.
    """
    if policy == "direct":
        j = scheme_ids.index(SchemeId.DIRECT)
        return feasible[:, j].copy()
    if policy != "all":
        raise ValueError(f"unknown common-set policy {policy!r}")
    relay_cols = [j for j, s in enumerate(scheme_ids) if s in RELAYING_SCHEMES]
    if len(relay_cols) < 2:
        raise ValueError("common success set needs at least two relaying schemes")
    return feasible[:, relay_cols].all(axis=1)


def metrics_from_result(result: ExperimentResult) -> MetricsTable:
    cfg = result.config
    scheme_ids = result.scheme_ids
    rows: List[MetricsRow] = []
    relay_enabled = sum(s in RELAYING_SCHEMES for s in scheme_ids)
    for k, tmax in enumerate(cfg.tmax_grid):
        feas_k = result.feasible[:, k, :]
        if cfg.common_set == "direct" or relay_enabled >= 2:
            common = common_success_set(feas_k, scheme_ids, cfg.common_set)
        else:
            common = np.zeros(cfg.drops, dtype=bool)
        n_common = int(common.sum())
        for j, scheme in enumerate(scheme_ids):
            ok = feas_k[:, j]
            n_ok = int(ok.sum())
            if scheme is SchemeId.LOCAL:
                mean_s = mean_c = math.nan  # no transmit energy by definition
            else:
                mean_s = float(result.energy[ok, k, j].mean()) if n_ok else math.nan
                sel = common & ok
                mean_c = float(result.energy[sel, k, j].mean()) if sel.any() else math.nan
            rows.append(MetricsRow(
                tmax=tmax, scheme=scheme, drop_count=cfg.drops,
                successes=n_ok, success_probability=n_ok / cfg.drops,
                mean_energy_success=mean_s, mean_energy_common=mean_c,
                common_count=n_common))
    return MetricsTable(tuple(rows))


def _fmt(x: float) -> str:
    if isinstance(x, float) and math.isnan(x):
        return ""
    return f"{x:.12g}"


def write_metrics_csv(table: MetricsTable, path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["schema", "tmax_s", "scheme", "drops", "successes",
                    "success_probability", "mean_energy_success_j",
                    "mean_energy_common_j", "common_set_size"])
        for r in table.rows:
            w.writerow([CSV_SCHEMA, _fmt(r.tmax), r.scheme.value, r.drop_count,
                        r.successes, _fmt(r.success_probability),
                        _fmt(r.mean_energy_success),
                        _fmt(r.mean_energy_common), r.common_count])


def write_summary_json(result: ExperimentResult, paths: Dict[str, str],
                       path: str) -> None:
    payload = {
        "schema": SUMMARY_SCHEMA,
        "seed": result.config.seed,
        "drops": result.config.drops,
        "backend": BACKEND,
        "runtime_s": round(result.runtime_s, 3),
        "audit_failures": len(result.audit_failures),
        "audit_sample": result.audit_failures[:10],
        "outputs": paths,
        "config": result.config.to_dict(),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_drops_ndjson(cfg: RunConfig, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for i in range(cfg.drops):
            fh.write(json.dumps(_make_drop(cfg, i).to_record(), sort_keys=True))
            fh.write("\n")

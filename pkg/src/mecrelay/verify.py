"""Verification battery: convexity certification, oracle agreement, and
the shared-band power back-substitution audit.

This is what the ``verify`` CLI subcommand runs and what the acceptance
suite builds on.  Convexity of each case objective is certified
numerically (finite-difference Hessians at random feasible points) instead
of symbolically; solver outputs are compared against the independent grid
oracle; accepted shared-band allocations are substituted back into the
coupled rate equations.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from mecrelay import oracle, schemes as sch
from mecrelay.config import RunConfig
from mecrelay.harness import _make_drop
from mecrelay.model import Allocation, Scenario, SchemeId, TaskSpec
from mecrelay.scenario import Drop

ORACLE_RTOL = 1e-4
HESSIAN_EIG_RATIO = -1e-6
BACKSUB_RTOL = 1e-9


class VerificationFailure(RuntimeError):
    """A battery check failed; carries the offending drop records."""

    def __init__(self, message: str, drops: Sequence[Drop] = ()):  # noqa: D401
        super().__init__(message)
        self.drops = list(drops)

    def dump_drops(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for d in self.drops:
                fh.write(json.dumps(d.to_record(), sort_keys=True) + "\n")


@dataclass
class BatteryReport:
    hessian_worst_ratio: Dict[str, float] = field(default_factory=dict)
    oracle_max_rel_dev: Dict[str, float] = field(default_factory=dict)
    oracle_feasibility_mismatches: int = 0
    backsub_max_residual: float = 0.0
    checked_drops: int = 0
    failures: List[str] = field(default_factory=list)
    offending: List[Drop] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def summary_lines(self) -> List[str]:
        lines = []
        for name, ratio in self.hessian_worst_ratio.items():
            lines.append(f"hessian[{name}]: worst min-eig/trace = {ratio:.3e}"
                         f" (threshold {HESSIAN_EIG_RATIO:.0e})")
        for name, dev in self.oracle_max_rel_dev.items():
            lines.append(f"oracle[{name}]: max |energy dev| = {dev:.3e}"
                         f" (threshold {ORACLE_RTOL:.0e})")
        lines.append(f"oracle feasibility mismatches: {self.oracle_feasibility_mismatches}")
        lines.append(f"shared-band back-substitution: max residual = "
                     f"{self.backsub_max_residual:.3e} (threshold {BACKSUB_RTOL:.0e})")
        lines.append(f"drops checked: {self.checked_drops}")
        lines.append("PASS" if self.passed else "FAIL: " + "; ".join(self.failures))
        return lines


def fds_backsub_residual(alloc: Allocation, scenario: Scenario) -> float:
    """Relative residual of the coupled shared-band rate equations.

    Re-derives each power from the other through the coupled system and
    compares with the allocation's values.
    """
    ch = scenario.channels
    p = scenario.params
    t2 = alloc.time_slots[1]
    b = alloc.bandwidths[1]
    g2, g3 = ch.hop_gains[1], ch.hop_gains[2]
    g_self = ch.self_interference_gain or 0.0
    g_cross = ch.cross_interference_gain or 0.0
    gamma = math.expm1(scenario.task.data_bits / (t2 * b) * math.log(2.0))
    k = b * p.floor_psd
    p2, p3 = alloc.powers[1], alloc.powers[2]
    r2 = ((k + p3 * g_self) * gamma / g2 - p2) / p2
    r3 = ((k + p2 * g_cross) * gamma / g3 - p3) / p3
    return max(abs(r2), abs(r3))


# ---------------------------------------------------------------------------
# case objectives (plain callables over the free variables, for the
# numerical convexity certification)
# ---------------------------------------------------------------------------

def _hop_e(t, b, dbits, g, n0):
    return t * b * n0 * math.expm1(dbits / (t * b) * math.log(2.0)) / g


def hdhd_objective(scenario: Scenario) -> Callable[[np.ndarray], float]:
    """Sum energy of the three sequential hops as a function of (t1,t2,t3)."""
    p = scenario.params
    d = scenario.task.data_bits
    gains = scenario.channels.hop_gains

    def f(x: np.ndarray) -> float:
        return sum(_hop_e(x[i], p.bandwidth_max, d, gains[i], p.floor_psd)
                   for i in range(3))
    return f

def fdo_objective(scenario: Scenario) -> Callable[[np.ndarray], float]:
    """Sum energy of the split-band case as a function of (t1,t2,b2,b3)."""
    p = scenario.params
    d = scenario.task.data_bits
    g1, g2, g3 = scenario.channels.hop_gains

    def f(x: np.ndarray) -> float:
        t1, t2, b2, b3 = x
        return (_hop_e(t1, p.bandwidth_max, d, g1, p.floor_psd)
                + _hop_e(t2, b2, d, g2, p.floor_psd)
                + _hop_e(t2, b3, d, g3, p.floor_psd))
    return f


def fds_objective(scenario: Scenario) -> Callable[[np.ndarray], float]:
    """Sum energy of the shared-band case as a function of (t1,t2)."""
    p = scenario.params
    d = scenario.task.data_bits
    ch = scenario.channels
    g1, g2, g3 = ch.hop_gains
    g_self = ch.self_interference_gain or 0.0
    g_cross = ch.cross_interference_gain or 0.0
    beta = (g_self / g2) * (g_cross / g3)
    bmax = p.bandwidth_max
    n0 = p.floor_psd

    def f(x: np.ndarray) -> float:
        t1, t2 = x
        gamma = math.expm1(d / (t2 * bmax) * math.log(2.0))
        denom = 1.0 - beta * gamma * gamma
        if denom <= 0.0:
            return math.inf
        k = bmax * n0
        p2 = k * gamma / (g2 * denom) * (1.0 + g_self * gamma / g3)
        p3 = k * gamma / (g3 * denom) * (1.0 + g_cross * gamma / g2)
        return _hop_e(t1, bmax, d, g1, n0) + t2 * (p2 + p3)
    return f


def numerical_hessian(f: Callable[[np.ndarray], float], x: np.ndarray,
                      rel_step: float = 1e-4) -> np.ndarray:
    n = len(x)
    h = rel_step * np.maximum(np.abs(x), 1e-12)
    out = np.empty((n, n))
    fx = f(x)
    for i in range(n):
        ei = np.zeros(n); ei[i] = h[i]
        out[i, i] = (f(x + ei) - 2.0 * fx + f(x - ei)) / (h[i] * h[i])
        for j in range(i + 1, n):
            ej = np.zeros(n); ej[j] = h[j]
            out[i, j] = out[j, i] = (
                f(x + ei + ej) - f(x + ei - ej) - f(x - ei + ej) + f(x - ei - ej)
            ) / (4.0 * h[i] * h[j])
    return out


def min_eig_trace_ratio(h: np.ndarray) -> float:
    eig = np.linalg.eigvalsh(h)
    trace = float(np.trace(h))
    if trace <= 0:
        return -math.inf
    return float(eig[0]) / trace


def _random_feasible_point(case: str, scenario: Scenario,
                           rng: np.random.Generator) -> Optional[np.ndarray]:
    """One uniformly drawn point of the case's feasible box, or None."""
    p = scenario.params
    task = scenario.task
    ch = scenario.channels
    budget = task.comm_budget()
    if budget <= 0:
        return None
    obj_map = {"hdhd": hdhd_objective, "fdo": fdo_objective, "fds": fds_objective}
    f = obj_map[case](scenario)

    def hop_power(t, b, g):
        return _hop_e(t, b, task.data_bits, g, p.floor_psd) / t

    for _ in range(50):
        if case == "hdhd":
            x = rng.uniform(0.02, 1.0, size=3) * budget
            powers = [hop_power(x[i], p.bandwidth_max, ch.hop_gains[i])
                      for i in range(3)]
        elif case == "fdo":
            t = rng.uniform(0.02, 1.0, size=2) * budget
            w = rng.uniform(0.15, 0.85)
            x = np.array([t[0], t[1], w * p.bandwidth_max,
                          (1.0 - w) * p.bandwidth_max])
            powers = [hop_power(x[0], p.bandwidth_max, ch.hop_gains[0]),
                      hop_power(x[1], x[2], ch.hop_gains[1]),
                      hop_power(x[1], x[3], ch.hop_gains[2])]
        else:
            x = rng.uniform(0.02, 1.0, size=2) * budget
            if not math.isfinite(f(x)):
                continue
            total = f(x) - _hop_e(x[0], p.bandwidth_max, task.data_bits,
                                  ch.hop_gains[0], p.floor_psd)
            powers = [hop_power(x[0], p.bandwidth_max, ch.hop_gains[0]),
                      total / x[1]]  # sum of the two coupled powers
        if all(pw <= p.power_max for pw in powers) and math.isfinite(f(x)):
            return x
    return None


_CASE_STREAM = {"hdhd": 0, "fdo": 1, "fds": 2}


def certify_convexity(cfg: RunConfig, case: str, points: int,
                      seed: int = 777) -> float:
    """Worst min-eigenvalue/trace ratio of the case Hessian over random
    feasible points on random drops; convex means ratio >= -1e-6."""
    rng = np.random.default_rng([seed, _CASE_STREAM[case]])
    params = cfg.radio_params()
    worst = math.inf
    collected = 0
    idx = 0
    obj_map = {"hdhd": hdhd_objective, "fdo": fdo_objective, "fds": fds_objective}
    while collected < points:
        drop = _make_drop(cfg, 10_000_000 + idx)
        idx += 1
        tmax = rng.uniform(0.3, 1.0)
        task = TaskSpec(drop.data_bits, drop.cycles_per_bit, tmax,
                        cfg.task.server_speed_cps)
        if task.compute_delay() >= tmax:
            continue
        scenario = Scenario(params, task, drop.channels3())
        for _ in range(4):
            if collected >= points:
                break
            x = _random_feasible_point(case, scenario, rng)
            if x is None:
                continue
            h = numerical_hessian(obj_map[case](scenario), x)
            worst = min(worst, min_eig_trace_ratio(h))
            collected += 1
    return worst


# ---------------------------------------------------------------------------
# battery
# ---------------------------------------------------------------------------

_ORACLE_SCHEMES = (SchemeId.DIRECT, SchemeId.TWO_HOP_HD, SchemeId.THREE_HOP_UNOPT,
                   SchemeId.HD_HD, SchemeId.HD_FDO, SchemeId.HD_FDS)


def solve_scheme(cfg: RunConfig, scheme: SchemeId, drop: Drop,
                 tmax: float) -> Tuple[Optional[Scenario], Allocation]:
    """One scheme on one drop at one deadline (shared by battery and CLI)."""
    params = cfg.radio_params()
    task = TaskSpec(drop.data_bits, drop.cycles_per_bit, tmax,
                    cfg.task.server_speed_cps)
    if scheme is SchemeId.LOCAL:
        return None, sch.baseline_local(task, drop.ue_speed)
    if task.compute_delay() >= tmax:
        return None, Allocation.infeasible(scheme)
    if scheme is SchemeId.DIRECT:
        scen = Scenario(params, task, drop.channels1())
        return scen, sch.baseline_direct(scen)
    if scheme is SchemeId.TWO_HOP_HD:
        scen = Scenario(params, task, drop.channels2())
        return scen, sch.baseline_two_hop_hd(scen, cfg.tol_rel)
    scen = Scenario(params, task, drop.channels3())
    if scheme is SchemeId.THREE_HOP_UNOPT:
        return scen, sch.baseline_three_hop_unopt(scen)
    if scheme is SchemeId.HD_HD:
        return scen, sch.solve_hd_hd(scen, cfg.tol_rel)
    if scheme is SchemeId.HD_FDO:
        return scen, sch.solve_hd_fdo(scen, cfg.tol_rel)
    return scen, sch.solve_hd_fds(scen, cfg.tol_rel)


def run_battery(cfg: RunConfig, samples: int, hessian_points: int = 200,
                corrupt_slot_pct: float = 0.0, seed: int = 999,
                schemes: Sequence[SchemeId] = _ORACLE_SCHEMES) -> BatteryReport:
    """Full property battery; ``corrupt_slot_pct`` is a fault-injection
    hook that perturbs one slot of every allocation before checking."""
    report = BatteryReport()
    rng = np.random.default_rng(seed)

    for case in ("hdhd", "fdo", "fds"):
        ratio = certify_convexity(cfg, case, hessian_points)
        report.hessian_worst_ratio[case] = ratio
        if ratio < HESSIAN_EIG_RATIO:
            report.failures.append(f"hessian[{case}] ratio {ratio:.3e}")

    for scheme in schemes:
        worst = 0.0
        for s in range(samples):
            drop = _make_drop(cfg, 20_000_000 + s)
            tmax = float(rng.uniform(0.15, 1.0))
            scen, alloc = solve_scheme(cfg, scheme, drop, tmax)
            report.checked_drops += 1
            if scen is None:
                continue
            if corrupt_slot_pct and alloc.feasible:
                alloc = _corrupt(alloc, corrupt_slot_pct)
            ref = oracle.grid_reference(scheme, scen)
            if ref.feasible != alloc.feasible:
                report.oracle_feasibility_mismatches += 1
                report.failures.append(
                    f"{scheme.value}: feasibility mismatch on drop {drop.index}"
                    f" tmax {tmax:.3f}")
                report.offending.append(drop)
                continue
            if alloc.feasible:
                dev = abs(alloc.total_energy - ref.energy) / ref.energy
                worst = max(worst, dev)
                if dev > ORACLE_RTOL:
                    report.failures.append(
                        f"{scheme.value}: energy deviates {dev:.2e} on drop"
                        f" {drop.index} tmax {tmax:.3f}")
                    report.offending.append(drop)
                if scheme is SchemeId.HD_FDS:
                    res = fds_backsub_residual(alloc, scen)
                    report.backsub_max_residual = max(
                        report.backsub_max_residual, res)
                    if res > BACKSUB_RTOL:
                        report.failures.append(
                            f"hdfds: back-substitution residual {res:.2e} on"
                            f" drop {drop.index}")
                        report.offending.append(drop)
        report.oracle_max_rel_dev[scheme.value] = worst
    return report


def _corrupt(alloc: Allocation, pct: float) -> Allocation:
    """Fault-injection hook: stretch one slot the way a buggy solver would,
    with the energy bookkeeping kept internally consistent."""
    slots = list(alloc.time_slots)
    if not slots:
        return alloc
    slots[0] *= 1.0 + pct / 100.0
    energy = sum(t * p for t, p in zip(slots, alloc.powers))
    return dataclasses.replace(alloc, time_slots=tuple(slots),
                               total_energy=energy)

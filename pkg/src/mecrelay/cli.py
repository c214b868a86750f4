"""Command-line entry points: run, verify, solve-one, bench."""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys
import time
from typing import List, Optional

from mecrelay import harness, oracle, verify
from mecrelay._core import BACKEND, available_backends
from mecrelay.config import ALL_SCHEME_TOKENS, ConfigError, RunConfig
from mecrelay.model import SchemeId
from mecrelay.scenario import Drop


def _load_config(args) -> RunConfig:
    cfg = RunConfig.from_file(args.config) if args.config else RunConfig()
    overrides = {}
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    if getattr(args, "drops", None) is not None:
        overrides["drops"] = args.drops
    if getattr(args, "tmax", None):
        overrides["tmax_grid"] = tuple(float(t) for t in args.tmax.split(","))
    if getattr(args, "schemes", None):
        overrides["schemes"] = tuple(args.schemes.split(","))
    if getattr(args, "out_dir", None):
        overrides["out_dir"] = args.out_dir
    if getattr(args, "workers", None) is not None:
        overrides["workers"] = args.workers
    if overrides:
        cfg = dataclasses.replace(cfg, **overrides)
    return cfg


def cmd_run(args) -> int:
    cfg = _load_config(args)
    os.makedirs(cfg.out_dir, exist_ok=True)
    result = harness.run_experiment(cfg)
    table = harness.metrics_from_result(result)

    csv_path = os.path.join(cfg.out_dir, "metrics.csv")
    summary_path = os.path.join(cfg.out_dir, "summary.json")
    paths = {"metrics_csv": csv_path, "summary_json": summary_path}
    harness.write_metrics_csv(table, csv_path)
    if cfg.dump_drops:
        drops_path = os.path.join(cfg.out_dir, "drops.ndjson")
        harness.write_drops_ndjson(cfg, drops_path)
        paths["drops_ndjson"] = drops_path
    harness.write_summary_json(result, paths, summary_path)

    print(f"{cfg.drops} drops x {len(cfg.tmax_grid)} deadlines x "
          f"{len(cfg.schemes)} schemes in {result.runtime_s:.1f}s "
          f"({BACKEND} kernels)")
    print(f"wrote {csv_path} and {summary_path}")

    if result.audit_failures:
        print(f"AUDIT FAILED: {len(result.audit_failures)} allocation(s) "
              f"violated resource caps; first: {result.audit_failures[0]}",
              file=sys.stderr)
        return 2
    if cfg.oracle_mode:
        rep = verify.run_battery(cfg, samples=cfg.oracle_samples,
                                 hessian_points=0)
        for line in rep.summary_lines():
            print(f"oracle-mode: {line}")
        if not rep.passed:
            return 3
    return 0


def cmd_verify(args) -> int:
    cfg = _load_config(args)
    corrupt = getattr(args, "corrupt_slot_pct", 0.0) or 0.0
    report = verify.run_battery(cfg, samples=args.verify_samples,
                                hessian_points=args.hessian_points,
                                corrupt_slot_pct=corrupt)
    for line in report.summary_lines():
        print(line)
    if not report.passed:
        if report.offending:
            os.makedirs(cfg.out_dir, exist_ok=True)
            dump = os.path.join(cfg.out_dir, "verify_failures.ndjson")
            err = verify.VerificationFailure("battery failed", report.offending)
            err.dump_drops(dump)
            print(f"offending drops dumped to {dump} for replay", file=sys.stderr)
        return 1
    return 0


def _alloc_payload(alloc) -> dict:
    return {
        "scheme": alloc.scheme_id.value,
        "feasible": alloc.feasible,
        "time_slots_s": list(alloc.time_slots),
        "powers_w": list(alloc.powers),
        "bandwidths_hz": list(alloc.bandwidths),
        "total_energy_j": None if math.isinf(alloc.total_energy) else alloc.total_energy,
        "comm_delay_s": None if math.isinf(alloc.comm_delay) else alloc.comm_delay,
    }


def cmd_solve_one(args) -> int:
    cfg = _load_config(args)
    if args.scenario:
        with open(args.scenario, "r", encoding="utf-8") as fh:
            first = fh.readline()
        drop = Drop.from_record(json.loads(first))
    else:
        missing = [n for n in ("gains", "data_mbit") if getattr(args, n) is None]
        if missing:
            print(f"need --scenario or inline flags (missing {missing})",
                  file=sys.stderr)
            return 2
        gains = [float(g) for g in args.gains.split(",")]
        if len(gains) != 5:
            print("--gains wants g1,g2,g3,relay1_bs,direct", file=sys.stderr)
            return 2
        drop = Drop(
            index=0, ue_bs_distance=0.0, relay1=(0.0, 0.0), relay2=(0.0, 0.0),
            data_bits=args.data_mbit * 1e6,
            cycles_per_bit=args.cycles_per_bit,
            ue_speed=args.ue_speed,
            hop_gains=(gains[0], gains[1], gains[2]),
            relay1_bs_gain=gains[3], direct_gain=gains[4],
            self_interference_gain=cfg.scheme_config().self_interference_gain,
        )

    tmax = args.tmax_s
    out = []
    for token in cfg.schemes:
        scheme = SchemeId(token)
        scen, alloc = verify.solve_scheme(cfg, scheme, drop, tmax)
        payload = _alloc_payload(alloc)
        if args.oracle and scen is not None:
            ref = oracle.grid_reference(scheme, scen)
            if ref is not None:
                payload["oracle_energy_j"] = (None if not ref.feasible
                                              else ref.energy)
        out.append(payload)

    if args.json:
        print(json.dumps({"tmax_s": tmax, "drop": drop.to_record(),
                          "allocations": out}, indent=2))
    else:
        print(f"deadline {tmax} s, drop index {drop.index}")
        for p in out:
            if not p["feasible"]:
                print(f"  {p['scheme']:>7}: infeasible")
                continue
            en = p["total_energy_j"]
            slots = ",".join(f"{t:.4g}" for t in p["time_slots_s"])
            pows = ",".join(f"{w:.4g}" for w in p["powers_w"])
            line = (f"  {p['scheme']:>7}: energy {en:.6g} J  slots [{slots}] s"
                    f"  powers [{pows}] W")
            if "oracle_energy_j" in p and p["oracle_energy_j"] is not None:
                line += f"  oracle {p['oracle_energy_j']:.6g} J"
            print(line)
    return 0


def cmd_bench(args) -> int:
    from mecrelay.harness import _make_drop
    cfg = _load_config(args)
    backends = available_backends()
    drops = [_make_drop(cfg, i) for i in range(args.bench_drops)]
    params = cfg.radio_params()
    n0 = params.floor_psd
    rows = []
    for name, mod in backends.items():
        t0 = time.perf_counter()
        sink = 0.0
        for d in drops:
            budget = 0.545
            g1, g2, g3 = d.hop_gains
            sink += mod.solve_hd_chain(budget, d.data_bits, 3, g1, g2, g3,
                                       params.bandwidth_max, n0,
                                       params.power_max, cfg.tol_rel)[7]
            sink += mod.solve_hd_fdo(budget, d.data_bits, g1, g2, g3,
                                     params.bandwidth_max, n0,
                                     params.power_max, cfg.tol_rel)[8]
            sink += mod.solve_hd_fds(budget, d.data_bits, g1, g2, g3,
                                     d.self_interference_gain, d.relay1_bs_gain,
                                     params.bandwidth_max, n0,
                                     params.power_max, cfg.tol_rel)[6]
        dt = time.perf_counter() - t0
        rows.append((name, dt, sink))
    print(f"{args.bench_drops} drops x (3-hop chain + split-band + shared-band):")
    base = None
    for name, dt, _ in rows:
        per = dt / args.bench_drops * 1e3
        speed = "" if base is None else f"  ({base / dt:.1f}x vs python)"
        if name == "python":
            base = dt
        print(f"  {name:>8}: {dt:7.3f} s total, {per:7.3f} ms/drop{speed}")
    finite = {r[2] for r in rows}
    if len(finite) > 1:
        devs = max(finite) - min(finite)
        print(f"  checksum spread across backends: {devs:.3e}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="mecrelay",
        description="Multi-hop relayed MEC offloading: optimal allocations "
                    "and Monte Carlo evaluation")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="YAML config file (defaults built in)")
        sp.add_argument("--seed", type=int, help="RNG stream seed")
        sp.add_argument("--drops", type=int, help="number of Monte Carlo drops")
        sp.add_argument("--tmax", help="comma-separated deadline grid, s")
        sp.add_argument("--schemes",
                        help=f"comma-separated subset of {','.join(ALL_SCHEME_TOKENS)}")
        sp.add_argument("--out-dir", help="output directory")
        sp.add_argument("--workers", type=int, help="worker processes (0 = auto)")

    run_p = sub.add_parser("run", help="run the Monte Carlo experiment")
    common(run_p)
    run_p.set_defaults(func=cmd_run)

    ver_p = sub.add_parser("verify", help="run the verification battery")
    common(ver_p)
    ver_p.add_argument("--verify-samples", type=int, default=100,
                       help="random drops checked against the grid oracle per scheme")
    ver_p.add_argument("--hessian-points", type=int, default=200,
                       help="random feasible points per convexity certification")
    ver_p.add_argument("--corrupt-slot-pct", type=float, default=0.0,
                       help=argparse.SUPPRESS)  # fault-injection test hook
    ver_p.set_defaults(func=cmd_verify)

    one_p = sub.add_parser("solve-one", help="solve a single scenario per scheme")
    common(one_p)
    one_p.add_argument("--scenario", help="drop record file (ndjson, first line used)")
    one_p.add_argument("--gains", help="inline g1,g2,g3,relay1_bs,direct (linear)")
    one_p.add_argument("--data-mbit", type=float, dest="data_mbit",
                       help="task size, Mbit")
    one_p.add_argument("--cycles-per-bit", type=float, default=1750.0)
    one_p.add_argument("--ue-speed", type=float, default=1e9,
                       help="UE compute speed, cycles/s")
    one_p.add_argument("--tmax-s", type=float, default=0.6)
    one_p.add_argument("--json", action="store_true", help="machine-readable output")
    one_p.add_argument("--oracle", action="store_true",
                       help="append grid-oracle energies")
    one_p.set_defaults(func=cmd_solve_one)

    bench_p = sub.add_parser("bench", help="time the kernel backends")
    common(bench_p)
    bench_p.add_argument("--bench-drops", type=int, default=200)
    bench_p.set_defaults(func=cmd_bench)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

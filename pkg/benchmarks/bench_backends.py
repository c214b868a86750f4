#!/usr/bin/env python3
"""Timing comparison of the pure-Python and compiled solver kernels.

Runs every per-drop solve on the same random drop population through both
backends, reports per-solver timings and the speedup, and cross-checks
that the two backends return identical results.

Usage: python benchmarks/bench_backends.py [--drops N] [--repeat R]
"""

import argparse
import math
import time

from mecrelay._core import available_backends
from mecrelay.config import RunConfig
from mecrelay.harness import _make_drop


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--drops", type=int, default=300)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    backends = available_backends()
    if "compiled" not in backends:
        print("note: compiled backend not built; timing pure Python only")

    cfg = RunConfig()
    params = cfg.radio_params()
    n0 = params.floor_psd
    bmax, pmax, tol = params.bandwidth_max, params.power_max, cfg.tol_rel
    drops = [_make_drop(cfg, i) for i in range(args.drops)]
    budget = 0.545  # 0.6 s deadline minus a typical server compute share

    cases = {
        "hd chain (3 hops)": lambda m, d: m.solve_hd_chain(
            budget, d.data_bits, 3, *d.hop_gains, bmax, n0, pmax, tol),
        "hd chain (2 hops)": lambda m, d: m.solve_hd_chain(
            budget, d.data_bits, 2, d.hop_gains[0], d.relay1_bs_gain, 0.0,
            bmax, n0, pmax, tol),
        "split-band fd": lambda m, d: m.solve_hd_fdo(
            budget, d.data_bits, *d.hop_gains, bmax, n0, pmax, tol),
        "shared-band fd": lambda m, d: m.solve_hd_fds(
            budget, d.data_bits, *d.hop_gains, d.self_interference_gain,
            d.relay1_bs_gain, bmax, n0, pmax, tol),
        "equal split": lambda m, d: m.solve_equal_split3(
            budget, d.data_bits, *d.hop_gains, bmax, n0, pmax),
    }

    timings = {}
    results = {}
    for name, mod in backends.items():
        timings[name] = {}
        results[name] = {}
        for case, fn in cases.items():
            best = math.inf
            out = 0.0
            for _ in range(args.repeat):
                t0 = time.perf_counter()
                acc = 0.0
                for d in drops:
                    r = fn(mod, d)
                    if r[0] == 1:
                        acc += r[-1]
                best = min(best, time.perf_counter() - t0)
                out = acc
            timings[name][case] = best
            results[name][case] = out

    width = max(len(c) for c in cases)
    header = f"{'solver':<{width}}  " + "  ".join(f"{n:>12}" for n in backends)
    if len(backends) > 1:
        header += "  speedup"
    print(f"{args.drops} drops, best of {args.repeat} (seconds):")
    print(header)
    for case in cases:
        row = f"{case:<{width}}  " + "  ".join(
            f"{timings[n][case]:12.4f}" for n in backends)
        if len(backends) > 1:
            row += f"  {timings['python'][case] / timings['compiled'][case]:6.1f}x"
        print(row)

    if len(backends) > 1:
        worst = 0.0
        for case in cases:
            a, b = results["python"][case], results["compiled"][case]
            if a or b:
                worst = max(worst, abs(a - b) / max(abs(a), abs(b)))
        print(f"\nenergy checksum agreement across backends: "
              f"max rel deviation {worst:.3e}")
        if worst > 1e-9:
            print("BACKEND MISMATCH above 1e-9; investigate before trusting timings")
            return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

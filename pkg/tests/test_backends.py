"""Pure-Python and compiled kernels must be interchangeable."""

import math
import os
import subprocess
import sys

import numpy as np
import pytest
from scipy.special import lambertw

from mecrelay._core import available_backends
from mecrelay._core.pykernels import _lambert_w0
from tests.conftest import FLOOR_PSD

BMAX = 20e6
PMAX = 0.1


def test_compiled_backend_is_built(compiled_available):
    assert compiled_available, "the _speedups extension should build in CI"


def test_lambert_w_matches_scipy():
    # away from the branch point, where the reference is well conditioned
    ys = np.concatenate([
        -1 / math.e + np.geomspace(1e-6, 0.3, 60),
        np.geomspace(1e-9, 1e6, 60),
    ])
    for y in ys:
        ours = _lambert_w0(float(y))
        ref = float(lambertw(float(y), 0).real)
        assert ours == pytest.approx(ref, rel=1e-12, abs=1e-12)


def test_lambert_w_branch_point_series():
    # near the branch the defining relation is the only stable check
    for eps in np.geomspace(1e-12, 1e-7, 30):
        y = -1 / math.e + float(eps)
        w = _lambert_w0(y)
        assert -1.0 <= w < -0.99
        # the float evaluation of w*e^w itself carries ~1e-17 noise
        assert abs(w * math.exp(w) - y) <= 3e-16


def test_slot_for_slope_inverts_energy_slope(backend):
    rng = np.random.default_rng(21)
    for _ in range(100):
        g = 10 ** rng.uniform(-11, -8.5)
        d = rng.uniform(0.5e6, 2e6)
        lam = 10 ** rng.uniform(-6, 1)
        t = backend.slot_for_slope(lam, BMAX, d, g, FLOOR_PSD)
        if math.isinf(t):
            continue
        slope = backend.hd_energy_slope(t, BMAX, d, g, FLOOR_PSD)
        assert slope == pytest.approx(-lam, rel=1e-10)


def test_min_bandwidth_power_boundary(backend):
    rng = np.random.default_rng(22)
    for _ in range(50):
        g = 10 ** rng.uniform(-10.5, -8.5)
        d = rng.uniform(0.5e6, 2e6)
        t = rng.uniform(0.05, 1.0)
        b = backend.min_bandwidth_hd(t, BMAX, d, g, FLOOR_PSD, PMAX, 1e-12)
        if math.isinf(b):
            assert backend.required_power_hd(t, BMAX, d, g, FLOOR_PSD) > PMAX
            continue
        assert backend.required_power_hd(t, b, d, g, FLOOR_PSD) == pytest.approx(PMAX, rel=1e-9)


@pytest.mark.parametrize("solver,nargs", [
    ("solve_hd_chain", None), ("solve_hd_fdo", None), ("solve_hd_fds", None),
    ("solve_equal_split3", None),
])
def test_backends_agree(solver, nargs, compiled_available):
    if not compiled_available:
        pytest.skip("compiled backend unavailable")
    mods = available_backends()
    rng = np.random.default_rng(23)
    agreements = 0
    for _ in range(150):
        g = 10 ** rng.uniform(-11.5, -8.5, size=4)
        d = rng.uniform(0.5e6, 2e6)
        budget = rng.uniform(0.02, 0.9)
        if solver == "solve_hd_chain":
            args = (budget, d, 3, g[0], g[1], g[2], BMAX, FLOOR_PSD, PMAX, 1e-9)
        elif solver == "solve_hd_fdo":
            args = (budget, d, g[0], g[1], g[2], BMAX, FLOOR_PSD, PMAX, 1e-9)
        elif solver == "solve_hd_fds":
            args = (budget, d, g[0], g[1], g[2], 1e-11, g[3], BMAX, FLOOR_PSD, PMAX, 1e-9)
        else:
            args = (budget, d, g[0], g[1], g[2], BMAX, FLOOR_PSD, PMAX)
        rp = getattr(mods["python"], solver)(*args)
        rc = getattr(mods["compiled"], solver)(*args)
        assert rp[0] == rc[0], f"feasibility diverged on {args}"
        if rp[0] == 1:
            for a, b in zip(rp[1:], rc[1:]):
                assert a == pytest.approx(b, rel=1e-9, abs=1e-30)
            agreements += 1
    assert agreements >= 20  # the draw must actually exercise feasible solves


def test_primitives_agree(compiled_available):
    if not compiled_available:
        pytest.skip("compiled backend unavailable")
    mods = available_backends()
    rng = np.random.default_rng(24)
    for _ in range(200):
        b = rng.uniform(1e5, BMAX)
        p = rng.uniform(0.0, PMAX)
        g = 10 ** rng.uniform(-12, -8)
        t = rng.uniform(1e-3, 1.0)
        d = rng.uniform(1e5, 4e6)
        for fn, args in [
            ("hd_capacity", (b, p, g, FLOOR_PSD)),
            ("required_power_hd", (t, b, d, g, FLOOR_PSD)),
            ("hd_hop_energy", (t, b, d, g, FLOOR_PSD)),
            ("hd_energy_slope", (t, b, d, g, FLOOR_PSD)),
            ("min_slot_hd", (b, d, g, FLOOR_PSD, PMAX)),
            ("fd_shared_powers", (t, b, d, g, g * 0.5, 1e-11, 1e-11, FLOOR_PSD)),
        ]:
            rp = getattr(mods["python"], fn)(*args)
            rc = getattr(mods["compiled"], fn)(*args)
            rp = rp if isinstance(rp, tuple) else (rp,)
            rc = rc if isinstance(rc, tuple) else (rc,)
            for a, bb in zip(rp, rc):
                if isinstance(a, float) and math.isinf(a):
                    assert math.isinf(bb)
                else:
                    assert a == pytest.approx(bb, rel=1e-12, abs=1e-300)


def test_env_var_forces_python_backend():
    env = dict(os.environ, MECRELAY_BACKEND="python")
    out = subprocess.run(
        [sys.executable, "-c", "import mecrelay; print(mecrelay.BACKEND)"],
        capture_output=True, text=True, env=env, check=True)
    assert out.stdout.strip() == "python"

import math

import numpy as np
import pytest

from mecrelay import link
from mecrelay.solver import (AllInfeasible, Bracket, Certificate, NoSignChange,
                             SolveReport, bisect_root, dual_equalize,
                             golden_minimize, grid_solve)


class TestBracket:
    def test_rejects_inverted(self):
        with pytest.raises(ValueError):
            Bracket(1.0, 0.5)

    def test_rejects_loose_tolerance(self):
        with pytest.raises(ValueError):
            Bracket(0.0, 1.0, tol_rel=0.01)


class TestBisectRoot:
    def test_linear(self):
        assert bisect_root(lambda x: x - 1.0, Bracket(0.0, 2.0)) == pytest.approx(1.0, rel=1e-9)

    def test_exponential(self):
        assert bisect_root(lambda x: 2.0 ** x - 8.0, Bracket(0.0, 10.0)) == pytest.approx(3.0, rel=1e-9)

    def test_no_sign_change(self):
        with pytest.raises(NoSignChange):
            bisect_root(lambda x: x + 5.0, Bracket(0.0, 1.0))

    def test_marginal_energy_root_matches_dense_scan(self, radio):
        # slot where the per-hop marginal energy equals a given -lambda
        d, g, lam = 1.3e6, 3e-10, 0.02

        def f(t):
            h = 1e-7 * t
            e = lambda tt: tt * link.required_power_hd(tt, 20e6, d, g, radio)
            return (e(t + h) - e(t - h)) / (2 * h) + lam

        root = bisect_root(f, Bracket(1e-3, 10.0, tol_rel=1e-9))
        ts = np.linspace(1e-3, 10.0, 1_000_000)
        vals = np.abs([f(float(t)) for t in ts[:: len(ts) // 10_000]])
        # refine the scan around the best coarse point
        coarse = ts[:: len(ts) // 10_000][int(np.argmin(vals))]
        fine = np.linspace(coarse * 0.99, coarse * 1.01, 10_000)
        best = fine[int(np.argmin(np.abs([f(float(t)) for t in fine])))]
        assert root == pytest.approx(best, rel=1e-6)


class TestGoldenMinimize:
    def test_smooth_bowl(self):
        rep = golden_minimize(lambda x: (x - 0.3) ** 2, Bracket(0.0, 1.0))
        assert rep.argmin[0] == pytest.approx(0.3, abs=1e-8)
        assert rep.certificate is Certificate.CONVERGED

    def test_nonsmooth_vee(self):
        rep = golden_minimize(lambda x: abs(x - 0.5), Bracket(0.0, 1.0))
        assert rep.argmin[0] == pytest.approx(0.5, abs=1e-8)

    def test_iteration_bound(self):
        for tol in (1e-4, 1e-6, 1e-9):
            rep = golden_minimize(lambda x: (x - 0.37) ** 2, Bracket(0.0, 1.0, tol))
            bound = math.ceil(math.log(1.0 / tol) / math.log(1.618)) + 2
            assert rep.iterations <= bound

    def test_edge_minimum_flagged(self):
        rep = golden_minimize(lambda x: x, Bracket(0.0, 1.0))
        assert rep.certificate is Certificate.HIT_BOUND
        assert rep.argmin[0] == pytest.approx(0.0, abs=1e-8)

    def test_all_infeasible(self):
        with pytest.raises(AllInfeasible):
            golden_minimize(lambda x: math.inf, Bracket(0.0, 1.0))


def _hop_energy_fns(radio, gains, d):
    fns = [lambda t, g=g: t * link.required_power_hd(t, 20e6, d, g, radio)
           for g in gains]
    lows = [link.min_slot_hd(20e6, d, g, radio) for g in gains]
    return fns, lows


class TestDualEqualize:
    def test_two_identical_hops_split_evenly(self, radio):
        fns, lows = _hop_energy_fns(radio, [3e-10, 3e-10], 1e6)
        rep = dual_equalize(fns, lows, budget=0.4)
        assert rep.certificate is Certificate.CONVERGED
        assert rep.argmin[0] == pytest.approx(0.2, rel=1e-6)
        assert rep.argmin[1] == pytest.approx(0.2, rel=1e-6)

    def test_three_identical_hops_split_in_thirds(self, radio):
        fns, lows = _hop_energy_fns(radio, [3e-10] * 3, 1e6)
        rep = dual_equalize(fns, lows, budget=0.6)
        for t in rep.argmin:
            assert t == pytest.approx(0.2, rel=1e-6)

    def test_infeasible_when_bounds_exceed_budget(self, radio):
        fns, lows = _hop_energy_fns(radio, [1e-12] * 3, 2e6)
        rep = dual_equalize(fns, lows, budget=0.01)
        assert rep.certificate is Certificate.INFEASIBLE
        assert math.isinf(rep.value)

    def test_kkt_marginals_equalized(self, radio):
        gains = [2e-10, 8e-10, 1.5e-9]
        fns, lows = _hop_energy_fns(radio, gains, 1.4e6)
        rep = dual_equalize(fns, lows, budget=0.5)
        slopes = []
        for t, f in zip(rep.argmin, fns):
            h = 1e-7 * t
            slopes.append((f(t + h) - f(t - h)) / (2 * h))
        spread = (max(slopes) - min(slopes)) / abs(min(slopes))
        assert spread < 1e-6

    def test_clamped_hop_has_flatter_marginal(self, radio):
        gains = [2e-10, 8e-10]
        fns, lows = _hop_energy_fns(radio, gains, 1.4e6)
        # force a clamp on the second hop by inflating its lower bound
        lows = [lows[0], 0.3]
        rep = dual_equalize(fns, lows, budget=0.45)
        assert rep.argmin[1] == pytest.approx(0.3, rel=1e-9)
        h = 1e-7
        s0 = (fns[0](rep.argmin[0] + h) - fns[0](rep.argmin[0] - h)) / (2 * h)
        s1 = (fns[1](0.3 + h) - fns[1](0.3 - h)) / (2 * h)
        lam = -s0
        assert s1 >= -lam * (1 + 1e-6)

    def test_budget_used_exactly(self, radio):
        fns, lows = _hop_energy_fns(radio, [2e-10, 5e-10, 9e-10], 1.1e6)
        rep = dual_equalize(fns, lows, budget=0.47)
        assert sum(rep.argmin) == pytest.approx(0.47, rel=1e-12)


class TestGridSolve:
    def test_quadratic_bowl(self):
        def f(pts):
            return (pts[:, 0] - 0.31) ** 2 + (pts[:, 1] - 0.67) ** 2

        rep = grid_solve(f, [(0.0, 1.0), (0.0, 1.0)], resolution=256)
        assert rep.value == pytest.approx(0.0, abs=1e-4)
        assert rep.argmin[0] == pytest.approx(0.31, abs=1e-2)

    def test_rejects_low_resolution(self):
        with pytest.raises(ValueError):
            grid_solve(lambda p: p[:, 0], [(0.0, 1.0)], resolution=32)

    def test_all_infeasible(self):
        with pytest.raises(AllInfeasible):
            grid_solve(lambda p: np.full(len(p), np.inf), [(0.0, 1.0)])

    def test_agrees_with_dual_equalize_on_chain(self, radio):
        rng = np.random.default_rng(9)
        for _ in range(5):
            gains = 10 ** rng.uniform(-10.5, -8.5, size=3)
            d = rng.uniform(0.5e6, 2e6)
            budget = rng.uniform(0.2, 0.8)
            fns, lows = _hop_energy_fns(radio, gains, d)
            if sum(lows) > budget:
                continue
            dual = dual_equalize(fns, lows, budget)

            lo1, lo2, lo3 = lows

            def f(pts):
                t1, v = pts[:, 0], pts[:, 1]
                t2 = lo2 + v * (budget - t1 - lo2 - lo3)
                t3 = budget - t1 - t2
                k = 20e6 * radio.floor_psd
                e = lambda t, g: t * k * np.expm1(d / (t * 20e6) * math.log(2)) / g
                return e(t1, gains[0]) + e(t2, gains[1]) + e(t3, gains[2])

            rep = grid_solve(f, [(lo1, budget - lo2 - lo3), (0.0, 1.0)])
            assert dual.value == pytest.approx(rep.value, rel=1e-4)

    def test_feasibility_agreement_on_starved_budget(self, radio):
        gains = [1e-11, 1e-11, 1e-11]
        d = 2e6
        fns, lows = _hop_energy_fns(radio, gains, d)
        budget = sum(lows) * 0.9
        assert dual_equalize(fns, lows, budget).certificate is Certificate.INFEASIBLE
        with pytest.raises(AllInfeasible):
            grid_solve(lambda p: np.full(len(p), np.inf), [(0.0, budget)])

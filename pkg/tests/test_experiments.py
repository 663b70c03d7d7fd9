import numpy as np
import pytest

from anomalylab.blocks import BlockParams
from anomalylab.experiments import (
    BracketError,
    CalibrationError,
    auto_grid,
    drag_bound_fit,
    find_viscosity_for_dissipation,
    intervals_disjoint,
    longtime_window_integrals,
    run_forward_scenario,
    run_longtime_scenario,
    run_reversed_scenario,
    schedule_ordering_ok,
    sweep,
    viscosity_schedule,
)

FAST = dict(steps_per_stage=24, ledger_stride=8)


class TestViscositySchedule:
    def test_paper_values_base5(self):
        assert viscosity_schedule("high", 2, 5) == pytest.approx(2**2.5 / 625, rel=1e-12)
        assert viscosity_schedule("intermediate", 2, 5) == pytest.approx(0.0032, rel=1e-12)
        assert viscosity_schedule("low", 2, 5) == pytest.approx(0.0008, rel=1e-12)

    def test_fixed_k(self):
        assert viscosity_schedule("fixed_k", 3, 2, k=2.0) == pytest.approx(2.0 / 64)
        with pytest.raises(ValueError):
            viscosity_schedule("fixed_k", 3, 2)

    def test_undefined_at_zero(self):
        with pytest.raises(ValueError):
            viscosity_schedule("high", 0, 2)

    def test_ordering(self):
        for m in range(2, 13):
            for b in (2, 5):
                assert schedule_ordering_ok(m, b)

    def test_disjoint_intervals(self):
        # close stages overlap; well-separated subsequences do not
        assert not intervals_disjoint([4, 6, 8], 2)
        assert intervals_disjoint([4, 11, 18], 2)

    def test_auto_grid(self):
        assert auto_grid(4, 2) == 256
        assert auto_grid(8, 2) == 1024


class TestForwardScenario:
    def test_inviscid_conserves(self):
        res = run_forward_scenario(2, 0.0, grid_n=64, solver_kw=FAST)
        assert res.D_at_2 == 0.0
        assert res.E_at_2 == pytest.approx(1.0, abs=1e-12)

    def test_pure_heat_baseline(self):
        # drift-free blocks: D(1) equals the closed form for the initial mode
        nu = 1e-3
        params = BlockParams(amplitude=1e-300)
        res = run_forward_scenario(2, nu, grid_n=64, params=params, solver_kw=FAST)
        expect = 1.0 - np.exp(-8 * np.pi**2 * nu * 2.0 * 1.0)
        assert res.D_at_1 == pytest.approx(expect, abs=1e-10)

    def test_flags_and_split(self):
        nu = viscosity_schedule("high", 2, 2)
        res = run_forward_scenario(2, nu, grid_n=64, solver_kw=FAST)
        assert res.pass_flags["closure"] and res.pass_flags["dissipated_fraction"]
        assert res.low_mode_norm is not None and res.high_mode_norm is not None
        assert res.lambda_cut == pytest.approx(2 ** (-1 / 8) * 4.0)


class TestReversedScenario:
    def test_inviscid_recovery(self):
        res = run_reversed_scenario(3, 0.0, grid_n=128, solver_kw=FAST)
        assert res.recovery == pytest.approx(1.0, abs=1e-8)
        assert res.branch == "inviscid"

    def test_branch_tags(self):
        res = run_reversed_scenario(3, 1.0 / 64.0, grid_n=128, solver_kw=FAST)
        assert res.branch == "unmixing"
        res = run_reversed_scenario(3, viscosity_schedule("high", 3, 2), grid_n=128,
                                    solver_kw=FAST)
        assert res.branch == "total"

    def test_alpha_window_reported(self):
        m, b = 3, 2
        alpha = 0.5
        nu = alpha**4 * 2 ** (-2 * m) * m**2
        res = run_reversed_scenario(m, nu, grid_n=128, solver_kw=FAST)
        lo, hi = res.alpha_window
        assert lo == pytest.approx((1 - alpha) ** 2)
        assert res.alpha_window_ok in (True, False)


class TestFindViscosity:
    def test_boundary_hit(self):
        # a target equal to the measured value at the low endpoint returns it
        m = 3
        lo = viscosity_schedule("intermediate", m, 2)
        probe = run_forward_scenario(m, lo, grid_n=128, solver_kw=FAST).D_at_1
        res = find_viscosity_for_dissipation(m, probe, t_star=1.0, tol=0.02,
                                             grid_n=128, solver_kw=FAST)
        assert res["nu"] == lo and res["iterations"] == 0

    def test_bisection_hits_target(self):
        res = find_viscosity_for_dissipation(3, 0.5, t_star=1.0, tol=0.02,
                                             grid_n=128, solver_kw=FAST)
        assert abs(res["achieved"] - 0.5) <= 0.02
        assert res["iterations"] <= 40

    def test_bad_target_rejected(self):
        with pytest.raises(ValueError):
            find_viscosity_for_dissipation(3, 1.5)

    def test_bracket_error_carries_endpoints(self):
        # an unreachable target exhausts the downward extension
        with pytest.raises(BracketError) as exc:
            find_viscosity_for_dissipation(3, 0.5, t_star=1.0, tol=1e-9,
                                           grid_n=64, max_extensions=0,
                                           bracket=(1e-9, 2e-9), solver_kw=FAST)
        assert exc.value.d_lo is not None and exc.value.d_hi is not None

    def test_horizon_two_low_bracket(self):
        # the t* = 2 subfamily starts from the low bracket and still lands
        res = find_viscosity_for_dissipation(6, 0.25, t_star=2.0, tol=0.02,
                                             grid_n=256, solver_kw=FAST)
        assert 0.23 <= res["achieved"] <= 0.27


class TestSweep:
    def test_empty_grid(self):
        assert sweep([], grid_n=64) == []

    def test_single_cell_matches_direct(self):
        rows = sweep([(2, "high")], grid_n=64)
        direct = run_forward_scenario(2, viscosity_schedule("high", 2, 2), grid_n=64,
                                      kind="high")
        assert rows[0]["D_at_1"] == direct.D_at_1  # bit-identical
        assert rows[0]["kind"] == "high"

    def test_partial_failure_recorded(self):
        rows = sweep([(2, "high"), (9, "high")], grid_n=64)
        assert "error:" in rows[1]["pass_flags"]
        assert rows[0]["pass_flags"].startswith("closure")

    def test_kind_ordering_within_m(self):
        # D(1) ordered with the schedule strength; saturated cells tie at 1
        cells = [(m, k) for m in (4, 5) for k in ("low", "intermediate", "high")]
        rows = sweep(cells, grid_n=256)
        for i in range(0, len(rows), 3):
            d_low, d_int, d_high = (rows[i + j]["D_at_1"] for j in range(3))
            assert d_high >= d_int - 1e-12
            assert d_int >= d_low - 1e-12


class TestLongtime:
    def test_zero_drift_window_trivial(self):
        # drift-free, inviscid: every window integral vanishes
        w = longtime_window_integrals(2, 0.3, nu=0.0, grid_n=64,
                                      params=BlockParams(amplitude=1e-300),
                                      solver_kw=dict(steps_per_stage=16))
        assert w.v_energy == 0.0 and w.v_dissip == 0.0 and w.v_work == pytest.approx(0.0, abs=1e-15)
        assert w.theta_dissip == pytest.approx(0.0, abs=1e-14)
        assert w.theta_work == pytest.approx(0.0, abs=1e-14)

    def test_work_identity_and_periodicity(self):
        # the default high-schedule viscosity at m=3 kills the scalar long
        # before the window opens; use a viscosity that keeps it alive there
        rep = run_longtime_scenario(3, tau=0.3, u_target=1.0, c_target=0.5,
                                    periods=3, grid_n=128, nu=2e-3,
                                    solver_kw=dict(steps_per_stage=32))
        assert rep.work_identity_err <= 1e-8
        assert rep.period_drift <= 1e-6
        assert rep.drag == pytest.approx(0.5, rel=1e-3)
        assert rep.U == pytest.approx(1.0, rel=1e-12)

    def test_requires_three_periods(self):
        with pytest.raises(ValueError):
            run_longtime_scenario(3, periods=2)

    def test_drag_bound_fit(self):
        from anomalylab.experiments import DragReport

        reports = []
        for m, re_, drag in [(4, 100.0, 0.52), (6, 300.0, 0.5), (8, 900.0, 0.49)]:
            reports.append(DragReport(m=m, tau=0.25, a_m=1.0, U=1.0, eps=drag,
                                      Re=re_, drag=drag, nu=1.0 / re_, time_rescale=1.0,
                                      work_rate=drag, work_identity_err=0.0,
                                      period_drift=0.0, drift_energy_share=0.5,
                                      tau_formula=0.25))
        c1, c2, ok = drag_bound_fit(reports)
        assert ok
        for r in reports:
            assert r.drag <= c1 + c2 / r.Re + 1e-9

import math

import numpy as np
import pytest

from anomalylab.blocks import BlockParams
from anomalylab.envelope import smooth_step_scalar
from anomalylab.glue import (
    CutoffPair,
    GlueSchedule,
    TimeWarp,
    TimeWarpDomainError,
    stage_times,
    time_warp_eval,
)


class TestStageTimes:
    def test_values(self):
        assert stage_times(0) == 0.0
        assert stage_times(1) == 0.75
        assert stage_times(3) == 0.9375

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            stage_times(-1)


class TestTimeWarp:
    def test_fixed_points_and_flatness(self):
        warp = TimeWarp(stages=4)
        for n in range(5):
            eta, etap = warp.eval(stage_times(n))
            assert eta == pytest.approx(stage_times(n), abs=1e-14)
            assert etap == 0.0

    def test_midpoint_symmetry(self):
        # S(1/2) = 1/2, so the warp fixes the midpoint of [t_0, t_1]
        warp = TimeWarp(stages=2)
        eta, etap = warp.eval(0.375)
        assert eta == pytest.approx(0.375, abs=1e-13)
        assert etap > 0.0

    def test_derivative_against_finite_differences(self):
        warp = TimeWarp(stages=3)
        h = 1e-6
        for t in [0.5, 0.2, 0.8]:
            fd = (warp.eval(t + h)[0] - warp.eval(t - h)[0]) / (2 * h)
            assert warp.eval(t)[1] == pytest.approx(fd, abs=1e-8)

    def test_monotone_dense_grid(self):
        # nondecreasing up to quadrature rounding, sampled across stage edges
        warp = TimeWarp(stages=6)
        ts = np.linspace(0.0, 1.0, 100_000)
        etas = np.array([warp.eval(t)[0] for t in ts[::50]])
        assert np.all(np.diff(etas) >= -1e-14)
        full = np.array([warp.eval(t)[0] for t in np.linspace(0.74, 0.76, 2000)])
        assert np.all(np.diff(full) >= -1e-14)

    def test_domain_error(self):
        with pytest.raises(TimeWarpDomainError):
            time_warp_eval(TimeWarp(stages=2), 1.5)


class TestGluedDrift:
    def test_hold_zero_after_blowup(self):
        s = GlueSchedule(2, BlockParams(), "hold")
        st = s.glued_drift(1.5)
        assert st.zero and st.rate == 0.0
        assert st.stage == 3

    def test_freeze_sentinel(self):
        s = GlueSchedule(2, BlockParams(), "hold")
        t_freeze = 0.5 * (stage_times(3) + 1.0)
        st = s.glued_drift(t_freeze)
        assert st.zero and st.stage == 3

    def test_reversed_negation(self):
        s = GlueSchedule(3, BlockParams(), "reversed")
        fwd = s.glued_drift(0.75 + 1e-3)
        rev = s.glued_drift(1.25 - 1e-3)
        assert rev.step is fwd.step
        assert rev.rate == pytest.approx(-fwd.rate, rel=1e-9)

    def test_periodized_periodicity(self):
        s = GlueSchedule(2, BlockParams(), "periodized", tau=0.2)
        for t in [0.95, 0.97, 0.99, 1.0 + 0.2]:
            a = s.glued_drift(t)
            b = s.glued_drift(t + 0.2)
            assert b.rate == pytest.approx(a.rate, abs=1e-12 + 1e-9 * abs(a.rate))

    def test_displacement_closed_form_vs_quadrature(self):
        # oracle: adaptive quadrature of the rate against the closed form
        from scipy.integrate import quad

        s = GlueSchedule(1, BlockParams(shears_per_block=4), "hold")
        (a, b) = s.substep_windows(1)[2]
        t0, t1 = a + 0.2 * (b - a), a + 0.9 * (b - a)
        disp = s.displacement_in(1, 2, t0, t1)
        val, _ = quad(lambda t: s.glued_drift(t).rate, t0, t1, epsabs=1e-13, limit=200)
        assert disp == pytest.approx(val, abs=1e-11)

    def test_substep_displacement_totals(self):
        # each full segment displaces by amplitude_rule(n) * 1/2 = A / (2 b^n)
        s = GlueSchedule(1, BlockParams(shears_per_block=4, amplitude=1.0), "hold")
        for n in range(2):
            for j, (a, b) in enumerate(s.substep_windows(n)):
                disp = s.displacement_in(n, j, a, b)
                assert abs(disp) == pytest.approx(1.0 / 2**n / 2.0, rel=1e-12), (n, j)


class TestDriftForce:
    def test_zero_on_hold_tail(self):
        s = GlueSchedule(2, BlockParams(), "hold")
        f = s.drift_force(0.01, 1.7)
        assert f["coefficient"] == 0.0

    def test_finite_difference_oracle(self):
        # g = a'(t) + 4 pi^2 lambda^2 nu a(t) for the single-mode shear
        s = GlueSchedule(2, BlockParams(), "hold")
        nu = 1e-3
        (a, b) = s.substep_windows(1)[1]
        t = a + 0.37 * (b - a)
        h = 1e-7
        rate_p = (s.glued_drift(t + h).rate - s.glued_drift(t - h).rate) / (2 * h)
        f = s.drift_force(nu, t)
        lam = f["wavenumber"]
        expect = rate_p + 4 * np.pi**2 * lam**2 * nu * f["rate"]
        assert f["coefficient"] == pytest.approx(expect, rel=1e-6, abs=1e-8)


class TestCutoffs:
    def test_window_supports(self):
        cut = CutoffPair(0.3)
        tau = 0.3
        assert float(cut.window(1.0)) == 1.0
        assert float(cut.window(1.0 - tau / 4)) == pytest.approx(1.0, abs=1e-12)
        assert float(cut.window(1.0 + tau / 4)) == pytest.approx(1.0, abs=1e-12)
        assert float(cut.window(1.0 - tau / 3)) == 0.0
        assert float(cut.window(1.0 + tau / 3 + 1e-9)) == 0.0
        assert float(cut.drift_gate(1.0 - tau / 2)) == 0.0
        assert float(cut.drift_gate(1.0 - tau / 3)) == pytest.approx(1.0, abs=1e-12)
        assert float(cut.drift_gate(2.0)) == 1.0

    def test_rejects_bad_tau(self):
        with pytest.raises(ValueError):
            CutoffPair(0.0)
        with pytest.raises(ValueError):
            CutoffPair(1.0)
        with pytest.raises(ValueError):
            GlueSchedule(2, BlockParams(), "periodized", tau=1.5)

    def test_window_prime_matches_fd(self):
        cut = CutoffPair(0.25)
        h = 1e-7
        for t in [1.0 - 0.25 / 3.5, 1.0 + 0.25 / 3.5]:
            fd = (float(cut.window(t + h)) - float(cut.window(t - h))) / (2 * h)
            assert float(cut.window_prime(t)) == pytest.approx(fd, rel=1e-5, abs=1e-6)


class TestScheduleSummary:
    def test_json_deterministic(self):
        s = GlueSchedule(3, BlockParams(), "reversed")
        assert s.to_json() == s.to_json()
        assert "reversed" in s.to_json()

    def test_periodize_constructor(self):
        s = GlueSchedule(2, BlockParams(), "hold")
        p = s.periodize(0.25)
        assert p.continuation == "periodized"
        assert p.tau == 0.25
        assert not math.isfinite(p.horizon)

"""Time-glued drift schedules: warped stages, continuations, periodization.

Stage n of the mixing cascade occupies the real-time window
[t_n, t_{n+1}) with t_n = 1 - (n+1)^{-2}.  Within each window a smooth
warp eta reparameterizes block time so that the glued drift is C-infinity
across stage boundaries: eta(t) = t_n + (t_{n+1}-t_n) S(u) with
u = (t-t_n)/(t_{n+1}-t_n), so eta(t_n) = t_n and eta'(t_n) = 0.

Three continuations extend the drift beyond the blow-up time t = 1:

* ``hold``       drift identically zero on [1, 2];
* ``reversed``   drift(t) = -drift(2-t) on (1, 2] (inverse cascade);
* ``periodized`` the drift is windowed near t = 1 by a smooth cutoff and
                 repeated with period tau (long-time experiment).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
import numpy as np

from .blocks import BlockParams, ShearStep, build_block_drift, check_resolution
from .envelope import (
    smooth_step,
    smooth_step_deriv,
    smooth_step_inverse,
    smooth_step_scalar,
    smooth_step_second,
)

_GL32_NODES, _GL32_WEIGHTS = np.polynomial.legendre.leggauss(32)


def stage_times(n: int) -> float:
    """t_n = 1 - (n+1)^{-2}."""
    if n < 0:
        raise ValueError(f"stage index must be >= 0, got {n}")
    return 1.0 - 1.0 / (n + 1) ** 2


def stage_duration(n: int) -> float:
    return stage_times(n + 1) - stage_times(n)


class TimeWarpDomainError(ValueError):
    pass


@dataclass(frozen=True)
class TimeWarp:
    """Piecewise smooth-step reparameterization of [0, 1]."""

    stages: int  # warp defined stage-by-stage for n = 0..stages

    def stage_of(self, t: float) -> int:
        """Index n with t in [t_n, t_{n+1}); the final freeze window maps to stages+1."""
        if t < 0.0 or t > 1.0:
            raise TimeWarpDomainError(f"warp evaluated outside [0,1]: t = {t}")
        if t >= stage_times(self.stages + 1):
            return self.stages + 1
        n = int(1.0 / math.sqrt(1.0 - t)) - 1 if t < 1.0 else self.stages + 1
        n = max(0, n)
        while stage_times(n + 1) <= t:
            n += 1
        while stage_times(n) > t:
            n -= 1
        return n

    def eval(self, t: float) -> tuple[float, float]:
        """(eta(t), eta'(t)).  eta' vanishes at every stage boundary."""
        n = self.stage_of(t)
        if n > self.stages:
            return t, 1.0  # past the last glued stage the warp is trivial
        t0, t1 = stage_times(n), stage_times(n + 1)
        u = (t - t0) / (t1 - t0)
        eta = t0 + (t1 - t0) * smooth_step_scalar(u)
        eta_prime = float(smooth_step_deriv(np.array([u]))[0])
        return eta, eta_prime


@dataclass(frozen=True)
class CutoffPair:
    """Smooth cutoffs of the periodized construction.

    window(t):  1 on [1-tau/4, 1+tau/4], 0 outside (1-tau/3, 1+tau/3);
    drift_gate(t): nondecreasing, 0 left of 1-tau/2, 1 right of 1-tau/3.
    """

    tau: float

    def __post_init__(self):
        if not 0.0 < self.tau < 1.0:
            raise ValueError(f"period tau must lie in (0,1), got {self.tau}")

    def window(self, t):
        t = np.asarray(t, dtype=float)
        tau = self.tau
        rise = smooth_step((t - (1.0 - tau / 3.0)) / (tau / 12.0))
        fall = smooth_step(((1.0 + tau / 3.0) - t) / (tau / 12.0))
        return rise * fall

    def window_prime(self, t):
        t = np.asarray(t, dtype=float)
        tau = self.tau
        a = smooth_step_deriv((t - (1.0 - tau / 3.0)) / (tau / 12.0)) / (tau / 12.0)
        a = a * smooth_step(((1.0 + tau / 3.0) - t) / (tau / 12.0))
        b = smooth_step((t - (1.0 - tau / 3.0)) / (tau / 12.0))
        b = b * smooth_step_deriv(((1.0 + tau / 3.0) - t) / (tau / 12.0)) / (-tau / 12.0)
        return a + b

    def drift_gate(self, t):
        t = np.asarray(t, dtype=float)
        return smooth_step((t - (1.0 - self.tau / 2.0)) / (self.tau / 6.0))


@dataclass(frozen=True)
class DriftState:
    """Drift descriptor at one instant: the active shear and its rate."""

    stage: int                   # m+1 sentinel when frozen / zero drift
    step: ShearStep | None
    block_time: float            # s in [0,1] within the block
    rate: float                  # d(displacement amplitude)/dt at this instant
    sign: float = 1.0            # -1 on the reversed leg
    gate: float = 1.0            # periodized drift gate value

    @property
    def zero(self) -> bool:
        return self.step is None


class GlueSchedule:
    """Glued m-stage drift with one of the three continuations."""

    CONTINUATIONS = ("hold", "reversed", "periodized")

    def __init__(
        self,
        m: int,
        params: BlockParams | None = None,
        continuation: str = "hold",
        tau: float | None = None,
        grid_n: int | None = None,
    ):
        if continuation not in self.CONTINUATIONS:
            raise ValueError(f"unknown continuation {continuation!r}")
        if continuation == "periodized":
            if tau is None:
                raise ValueError("periodized continuation requires tau")
            self.cutoffs = CutoffPair(tau)
        else:
            self.cutoffs = None
        self.m = m
        self.params = params or BlockParams()
        self.continuation = continuation
        self.tau = tau
        if grid_n is not None:
            check_resolution(m, self.params.base, grid_n)
        self.steps: list[list[ShearStep]] = [
            build_block_drift(n, self.params) for n in range(m + 1)
        ]
        k = self.params.shears_per_block
        # block-time substep edges pulled back through the smooth step
        self.u_edges = [0.0] + [smooth_step_inverse(j / k) for j in range(1, k)] + [1.0]
        self.horizon = 2.0 if continuation != "periodized" else math.inf

    # -- window helpers -------------------------------------------------

    def substep_windows(self, n: int) -> list[tuple[float, float]]:
        """Real-time windows of the K substeps of stage n."""
        t0 = stage_times(n)
        dt = stage_duration(n)
        edges = [t0 + dt * u for u in self.u_edges]
        edges[0], edges[-1] = t0, stage_times(n + 1)
        return list(zip(edges[:-1], edges[1:]))

    def freeze_start(self) -> float:
        return stage_times(self.m + 1)

    def base_time(self, t: float) -> float:
        """Representative of t in the base period (periodized only)."""
        if self.continuation != "periodized":
            return t
        tau = self.tau
        return t - tau * math.floor((t - (1.0 - tau / 2.0)) / tau)

    def _forward_locate(self, t: float) -> tuple[int, int, float, float] | None:
        """(stage, substep, u, s) for t in [0, t_{m+1}); None when frozen."""
        if t >= self.freeze_start():
            return None
        n = 0
        while stage_times(n + 1) <= t:
            n += 1
        t0, dt = stage_times(n), stage_duration(n)
        u = (t - t0) / dt
        s = smooth_step_scalar(u)
        k = self.params.shears_per_block
        j = min(int(s * k), k - 1)
        return n, j, u, s

    # -- public drift queries -------------------------------------------

    def glued_drift(self, t: float) -> DriftState:
        """Active shear descriptor at real time t (zero-drift sentinel when frozen)."""
        if t < 0.0 or (self.continuation != "periodized" and t > self.horizon):
            raise ValueError(f"time {t} outside schedule horizon")
        sign, gate = 1.0, 1.0
        if self.continuation == "periodized":
            tb = self.base_time(t)
            gate = float(self.cutoffs.drift_gate(tb))
            t_eval = min(tb, 1.0)
            if tb > 1.0 or gate == 0.0:
                return DriftState(self.m + 1, None, 1.0, 0.0, 1.0, gate)
        elif t > 1.0:
            if self.continuation == "hold":
                return DriftState(self.m + 1, None, 1.0, 0.0)
            sign = -1.0
            t_eval = 2.0 - t
        else:
            t_eval = t
        loc = self._forward_locate(t_eval)
        if loc is None:
            return DriftState(self.m + 1, None, 1.0, 0.0, sign, gate)
        n, j, u, s = loc
        step = self.steps[n][j]
        rate = self._rate(step, n, u, s) * sign * gate
        return DriftState(n, step, s, rate, sign, gate)

    def _rate(self, step: ShearStep, n: int, u: float, s: float) -> float:
        """d/dt of the accumulated displacement amplitude, in real time."""
        k = self.params.shears_per_block
        dt_n = stage_duration(n)
        sigma = step.sigma(s)
        ds_dt = float(smooth_step_deriv(np.array([u]))[0]) / dt_n
        dsig_dt = k * ds_dt
        env = 0.5 * float(smooth_step_deriv(np.array([sigma]))[0])
        return step.amplitude * env * dsig_dt

    def _rate_prime(self, step: ShearStep, n: int, u: float, s: float) -> float:
        """Time derivative of _rate (closed form, for the drift force)."""
        k = self.params.shears_per_block
        dt_n = stage_duration(n)
        sigma = step.sigma(s)
        su = float(smooth_step_deriv(np.array([u]))[0])
        suu = float(smooth_step_second(np.array([u]))[0])
        ss = float(smooth_step_deriv(np.array([sigma]))[0])
        sss = float(smooth_step_second(np.array([sigma]))[0])
        a = step.amplitude * 0.5 * k
        # d/dt [ ss(sigma(t)) * su(u(t)) ] / dt_n
        term1 = sss * (k * su / dt_n) * su / dt_n
        term2 = ss * suu / dt_n / dt_n
        return a * (term1 + term2)

    def displacement_in(self, n: int, j: int, t0: float, t1: float,
                        mirrored: bool = False, gated: bool = False) -> float:
        """Exact displacement of substep j of stage n over real time [t0, t1].

        The caller asserts the interval lies inside the substep's window (the
        solver's step plan guarantees it); s-values are clipped to the
        segment, so boundary rounding cannot select a neighboring substep.
        ``mirrored`` evaluates the time-reversed leg; ``gated`` applies the
        periodized drift gate by quadrature.
        """
        if t1 < t0:
            raise ValueError("reversed interval")
        if mirrored:
            return -self.displacement_in(n, j, 2.0 - t1, 2.0 - t0, gated=gated)
        step = self.steps[n][j]
        if gated:
            return self._displacement_gated(step, n, t0, t1)
        dt_n = stage_duration(n)
        t_base = stage_times(n)
        s0 = min(max(smooth_step_scalar((t0 - t_base) / dt_n), step.s_start), step.s_end)
        s1 = min(max(smooth_step_scalar((t1 - t_base) / dt_n), step.s_start), step.s_end)
        return step.displacement(s0, s1)

    def _displacement_gated(self, step: ShearStep, n: int, t0: float, t1: float) -> float:
        """Gate * rate has no elementary antiderivative: fixed Gauss-Legendre."""
        tb0 = self.base_time(t0)
        tb1 = tb0 + (t1 - t0)
        if tb0 >= 1.0:
            return 0.0
        tb1 = min(tb1, 1.0)
        mid = 0.5 * (tb0 + tb1)
        half = 0.5 * (tb1 - tb0)
        nodes = mid + half * _GL32_NODES
        dt_n = stage_duration(n)
        t_base = stage_times(n)
        vals = []
        for tn in nodes:
            u = min(max((tn - t_base) / dt_n, 0.0), 1.0)
            s = min(max(smooth_step_scalar(u), step.s_start), step.s_end)
            gate = float(self.cutoffs.drift_gate(tn))
            vals.append(self._rate(step, n, u, s) * gate)
        return float(np.dot(vals, _GL32_WEIGHTS) * half)

    def displacement_over(self, t0: float, t1: float) -> tuple[ShearStep | None, float]:
        """(active step, exact displacement amplitude) over [t0, t1].

        Convenience entry point: the substep is located from the interval
        midpoint, so the interval must lie inside a single substep.
        """
        if t1 < t0:
            raise ValueError("reversed interval")
        if t1 == t0:
            st = self.glued_drift(t0)
            return st.step, 0.0
        mid = 0.5 * (t0 + t1)
        if self.continuation == "periodized":
            tb = self.base_time(mid)
            loc = self._forward_locate(tb) if tb < 1.0 else None
            if loc is None:
                return None, 0.0
            n, j, _, _ = loc
            return self.steps[n][j], self.displacement_in(n, j, t0, t1, gated=True)
        if mid > 1.0 and self.continuation == "reversed":
            loc = self._forward_locate(2.0 - mid)
            if loc is None:
                return None, 0.0
            n, j, _, _ = loc
            return self.steps[n][j], self.displacement_in(n, j, t0, t1, mirrored=True)
        if mid >= self.freeze_start():
            return None, 0.0
        loc = self._forward_locate(mid)
        if loc is None:
            return None, 0.0
        n, j, _, _ = loc
        return self.steps[n][j], self.displacement_in(n, j, t0, t1)

    # -- drift force -----------------------------------------------------

    def drift_force(self, nu: float, t: float) -> dict:
        """Closed-form force g = (a'(t) + 4 pi^2 lambda^2 nu a(t)) sin-profile.

        Since the drift is a unidirectional shear, self-advection vanishes and
        the force reduces to this single-mode form.  Returns the descriptor
        {axis, wavenumber, phase, coefficient}; the zero drift gives
        coefficient 0.
        """
        st = self.glued_drift(t)
        if st.zero:
            return {"axis": None, "wavenumber": 0, "phase": 0.0, "coefficient": 0.0, "rate": 0.0}
        step = st.step
        if self.continuation == "periodized":
            tb = self.base_time(t)
            loc = self._forward_locate(min(tb, 1.0 - 1e-15))
            n, j, u, s = loc
            gate = float(self.cutoffs.drift_gate(tb))
            gp = float(
                smooth_step_deriv(np.array([(tb - (1.0 - self.tau / 2.0)) / (self.tau / 6.0)]))[0]
            ) / (self.tau / 6.0)
            a = self._rate(step, n, u, s) * gate
            a_prime = self._rate_prime(step, n, u, s) * gate + self._rate(step, n, u, s) * gp
        elif t > 1.0 and self.continuation == "reversed":
            tm = 2.0 - t
            loc = self._forward_locate(tm)
            n, j, u, s = loc
            a = -self._rate(step, n, u, s)
            a_prime = self._rate_prime(step, n, u, s)
        else:
            loc = self._forward_locate(t)
            n, j, u, s = loc
            a = self._rate(step, n, u, s)
            a_prime = self._rate_prime(step, n, u, s)
        lam = step.wavenumber
        coeff = a_prime + 4.0 * np.pi**2 * lam**2 * nu * a
        return {
            "axis": step.axis,
            "wavenumber": lam,
            "phase": step.phase,
            "coefficient": float(coeff),
            "rate": float(a),
        }

    # -- periodization ----------------------------------------------------

    def periodize(self, tau: float) -> "GlueSchedule":
        """Wrap this schedule's drift with period tau around t = 1."""
        if not 0.0 < tau < 1.0:
            raise ValueError(f"period tau must lie in (0,1), got {tau}")
        return GlueSchedule(self.m, self.params, "periodized", tau=tau)

    # -- serialization ------------------------------------------------------

    def summary(self) -> dict:
        return {
            "m": self.m,
            "base": self.params.base,
            "shears_per_block": self.params.shears_per_block,
            "continuation": self.continuation,
            "tau": self.tau,
            "stage_times": [stage_times(n) for n in range(self.m + 2)],
            "horizon": self.horizon if math.isfinite(self.horizon) else "periodic",
        }

    def to_json(self) -> str:
        return json.dumps(self.summary(), sort_keys=True)


def time_warp_eval(warp: TimeWarp, t: float) -> tuple[float, float]:
    """Module-level convenience wrapper for TimeWarp.eval."""
    return warp.eval(t)

"""Measurement functionals: norms, projections, shell spectra, work, limits.

The 2 pi convention is fixed once, here: wavenumber k counts cycles per
unit torus, ||grad theta||^2 = 4 pi^2 sum |k|^2 |c_k|^2 and
||theta||_{H^-1}^2 = sum_{k!=0} |c_k|^2 / (4 pi^2 |k|^2).  Consequently
||P_{<=L} theta||_{L^2} <= 2 pi L ||P_{<=L} theta||_{H^-1} with equality on
a single mode at |k| = L; low_mode_bound_check folds the 2 pi in so the
inequality is convention-free.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .fields import ScalarField2D, SpectralGrid
from .glue import GlueSchedule
from .solver import RunLedger

_GL64_NODES, _GL64_WEIGHTS = np.polynomial.legendre.leggauss(64)


class MeanError(ValueError):
    """Homogeneous norm of a field with nonzero mean."""


def _energy_table(field: ScalarField2D) -> np.ndarray:
    grid = field.grid
    c = field.spectral()
    return grid.weights * (c.real**2 + c.imag**2)


def l2_norm_sq(field: ScalarField2D) -> float:
    return field.energy()


def grad_sq_norm(field: ScalarField2D) -> float:
    """||grad theta||^2 = 4 pi^2 sum |k|^2 |c_k|^2."""
    grid = field.grid
    return float(4.0 * np.pi**2 * np.sum(_energy_table(field) * grid.k_sq))


def h_minus1_norm(field: ScalarField2D, mean_tol: float = 1e-10) -> float:
    """Homogeneous H^-1 mix norm sqrt(sum_{k!=0} |c_k|^2 / (4 pi^2 |k|^2))."""
    mean = field.mean()
    if abs(mean) > mean_tol:
        raise MeanError(f"H^-1 norm needs a mean-zero field; mean = {mean:.3e}")
    grid = field.grid
    e = _energy_table(field)
    nz = grid.k_sq > 0.0
    return float(np.sqrt(np.sum(e[nz] / (4.0 * np.pi**2 * grid.k_sq[nz]))))


# ---------------------------------------------------------------------------
# shell spectra


@lru_cache(maxsize=32)
def _shell_masks(n: int) -> tuple:
    """Sharp annuli 2^{q-1} < |k| <= 2^q for q = 0..log2(N).

    The last shell reaches N, past the axis Nyquist N/2, so the spectral
    corners |k| in (N/2, N/sqrt(2)] are counted and Parseval over shells is
    exact for every grid field.
    """
    grid = SpectralGrid(n)
    kmag = np.sqrt(grid.k_sq)
    q_max = int(math.log2(n))
    masks = []
    for q in range(q_max + 1):
        lo, hi = 2.0 ** (q - 1), 2.0**q
        masks.append((kmag > lo) & (kmag <= hi))
    return tuple(masks)


def shell_energies(field: ScalarField2D) -> np.ndarray:
    e = _energy_table(field)
    return np.array([float(np.sum(e[m])) for m in _shell_masks(field.n)])


@dataclass
class ShellSpectrum:
    energies: np.ndarray
    q_tilde: int
    c: float
    alpha: float
    r2: float
    fit_ok: bool

    def to_dict(self, t: float | None = None) -> dict:
        d = {
            "q_tilde": self.q_tilde,
            "alpha": self.alpha,
            "c": self.c,
            "r2": self.r2,
            "fit_ok": self.fit_ok,
        }
        if t is not None:
            d["t"] = t
        return d


def fit_localization(energies: np.ndarray, floor: float = 1e-14) -> ShellSpectrum:
    """Dominant shell and the exponential-localization fit.

    q_tilde = argmax (ties toward lower q); least squares of
    log ||Delta_q||_{L2} against |q - q_tilde| over shells above the floor,
    modelling ||Delta_q|| <= c 2^{-alpha |q - q_tilde|}.
    """
    s = np.asarray(energies, dtype=float)
    if np.all(s <= 0.0):
        return ShellSpectrum(s, 0, 0.0, 0.0, 0.0, False)
    q_tilde = int(np.argmax(s > np.max(s) * (1.0 - 1e-12)))
    keep = s > floor
    if np.count_nonzero(keep) < 3:
        return ShellSpectrum(s, q_tilde, 0.0, 0.0, 0.0, False)
    x = np.abs(np.arange(len(s)) - q_tilde)[keep]
    y = np.log2(np.sqrt(s[keep]))
    slope, intercept = np.polyfit(x, y, 1)
    pred = slope * x + intercept
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0.0 else 1.0
    return ShellSpectrum(s, q_tilde, float(2.0**intercept), float(-slope), r2, True)


def shell_spectrum(field: ScalarField2D) -> ShellSpectrum:
    return fit_localization(shell_energies(field))


# ---------------------------------------------------------------------------
# projections


def project_low(field: ScalarField2D, lam: float) -> ScalarField2D:
    """Zero all coefficients with |k| > lam (sharp cutoff, boundary inclusive)."""
    if lam < 0.0:
        raise ValueError("cutoff must be >= 0")
    grid = field.grid
    c = field.spectral().copy()
    c[grid.k_sq > lam * lam] = 0.0
    return ScalarField2D.from_spectral(c)


def project_high(field: ScalarField2D, lam: float) -> ScalarField2D:
    grid = field.grid
    c = field.spectral().copy()
    c[grid.k_sq <= lam * lam] = 0.0
    return ScalarField2D.from_spectral(c)


def low_mode_bound_check(field: ScalarField2D, lam: float) -> tuple[float, float, bool]:
    """(lhs, rhs, pass) for ||P_{<=lam} rho|| <= 2 pi lam ||P_{<=lam} rho||_{H^-1}."""
    low = project_low(field, lam)
    lhs = low.l2_norm()
    rhs = 2.0 * np.pi * lam * h_minus1_norm(low)
    return lhs, rhs, lhs <= rhs * (1.0 + 1e-10)


# ---------------------------------------------------------------------------
# drift work


def drift_energy(schedule: GlueSchedule, t: float) -> float:
    """||v(t)||^2 = rate^2 / 2 for the single active sinusoidal shear."""
    st = schedule.glued_drift(t)
    return 0.0 if st.zero else 0.5 * st.rate**2


def _drift_intervals(schedule: GlueSchedule, t: float):
    """Substep intervals (clipped at t) with their stage index and mirror sign."""
    out = []
    for n in range(schedule.m + 1):
        for (a, b) in schedule.substep_windows(n):
            if a >= t:
                return out
            out.append((a, min(b, t), False))
    if schedule.continuation == "reversed" and t > 1.0:
        fz = schedule.freeze_start()
        for n in range(schedule.m, -1, -1):
            for (a, b) in reversed(schedule.substep_windows(n)):
                ra, rb = 2.0 - b, 2.0 - a
                if ra >= t:
                    return out
                out.append((ra, min(rb, t), True))
    return out


def drift_enstrophy_integral(schedule: GlueSchedule, t: float) -> float:
    """int_0^t ||grad v||^2 = 4 pi^2 lambda^2 int rate^2 / 2, by quadrature."""
    total = 0.0
    for (a, b, mirrored) in _drift_intervals(schedule, t):
        if b <= a:
            continue
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        nodes = mid + half * _GL64_NODES
        vals = []
        for tn in nodes:
            st = schedule.glued_drift(tn)
            if st.zero:
                vals.append(0.0)
            else:
                lam = st.step.wavenumber
                vals.append(4.0 * np.pi**2 * lam**2 * 0.5 * st.rate**2)
        total += float(np.dot(vals, _GL64_WEIGHTS)) * half
    return total


def work_of_drift_force(schedule: GlueSchedule, nu: float, t: float) -> float:
    """Work int_0^t (g, v) of the drift force, in closed form.

    From the shear energy balance: int (g, v) = (||v(t)||^2 - ||v(0)||^2)/2
    + nu int ||grad v||^2.  Ledgers report twice this value (the energy
    equality convention carries a factor 2).
    """
    return 0.5 * (drift_energy(schedule, t) - drift_energy(schedule, 0.0)) + (
        nu * drift_enstrophy_integral(schedule, t)
    )


# ---------------------------------------------------------------------------
# viscosity families


@dataclass
class FamilySummary:
    nus: list
    times: list
    E: np.ndarray            # [i_nu, i_time]
    D: np.ndarray
    W: np.ndarray
    limit_E: np.ndarray      # smallest-viscosity row, the finite-family limit stand-in
    limit_D: np.ndarray
    monotone_E: list         # per time: "increasing" | "decreasing" | "mixed" | "insufficient-data"
    monotone_D: list
    bounds_ok: bool          # 0 <= D <= E(0) + W for every run and time


def _trend(vals: np.ndarray) -> str:
    if len(vals) < 2:
        return "insufficient-data"
    d = np.diff(vals)
    if np.all(d >= -1e-12):
        return "increasing"
    if np.all(d <= 1e-12):
        return "decreasing"
    return "mixed"


def family_summary(runs: list[tuple[float, RunLedger]], times: list[float]) -> FamilySummary:
    """Tabulate E, D, W across a viscosity family at the requested times."""
    if len(runs) < 1:
        raise ValueError("family_summary needs at least one run")
    nus = [nu for nu, _ in runs]
    if any(nus[i] < nus[i + 1] for i in range(len(nus) - 1)):
        raise ValueError("runs must be sorted by descending viscosity")
    lens = {len(led.t) for _, led in runs}
    if len(lens) != 1:
        raise ValueError("mismatched ledgers across the family")
    E = np.empty((len(runs), len(times)))
    D = np.empty_like(E)
    W = np.zeros_like(E)
    bounds_ok = True
    for i, (nu, led) in enumerate(runs):
        for j, t in enumerate(times):
            e, d = led.at(t)
            E[i, j], D[i, j] = e, d
            bounds_ok &= -1e-12 <= d <= led.E[0] + 1e-9
    return FamilySummary(
        nus=nus,
        times=list(times),
        E=E,
        D=D,
        W=W,
        limit_E=E[-1].copy(),
        limit_D=D[-1].copy(),
        monotone_E=[_trend(E[:, j]) for j in range(len(times))],
        monotone_D=[_trend(D[:, j]) for j in range(len(times))],
        bounds_ok=bool(bounds_ok),
    )


def kolmogorov_wavenumber(ledger: RunLedger, nu: float,
                          window: tuple[float, float] | None = None) -> float:
    """kappa_d = (eps / nu^3)^{1/4} with eps the mean dissipation rate
    nu <||grad u||^2> = (D(t1) - D(t0)) / (2 (t1 - t0)) from the ledger."""
    if nu <= 0.0:
        raise ValueError("Kolmogorov wavenumber needs nu > 0")
    t0, t1 = window if window is not None else (ledger.t[0], ledger.t[-1])
    eps = (ledger.at(t1)[1] - ledger.at(t0)[1]) / (2.0 * (t1 - t0))
    return float((max(eps, 0.0) / nu**3) ** 0.25)

"""Unit-time alternating-shear mixing blocks.

Block n consists of K shear steps at wavenumber lambda_n = b^n which
alternate between the horizontal and vertical axis.  Each step carries a
sinusoidal profile and a smooth temporal envelope that vanishes to all
orders at the segment endpoints, so a full segment displaces each line by

    amplitude_rule(n) * 1/2 * sin(2 pi lambda_n x + 2 pi phase).

Shear transport is applied exactly as a per-line spectral phase shift; the
map is unitary on the grid and exactly invertible, which is what makes the
downstream energy ledgers exact.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.fft as sfft

from . import fields
from .envelope import envelope_integral
from .fields import ScalarField2D, SpectralGrid

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0

#: default shear amplitude factor and phase stagger; see BlockParams
DEFAULT_AMPLITUDE = 1.1
DEFAULT_SHEARS_PER_BLOCK = 8
_PHASE_STAGGER = 11


class ResolutionError(ValueError):
    """Block too fine for the intended grid."""


def default_phase_rule(n: int, j: int) -> float:
    """Golden-ratio phase ladder; same-axis pairs are offset by one half.

    The half-turn offset between consecutive same-axis steps cancels the
    first-order backscatter into low modes, which is what keeps the mix-norm
    decaying instead of saturating.
    """
    base = ((n * _PHASE_STAGGER + (j % 2)) * GOLDEN) % 1.0
    return (base + 0.5 * ((j // 2) % 2)) % 1.0


@dataclass(frozen=True)
class BlockParams:
    """Static description of the shear-block family."""

    base: int = 2
    shears_per_block: int = DEFAULT_SHEARS_PER_BLOCK
    amplitude: float = DEFAULT_AMPLITUDE
    amplitude_rule: Callable[[int], float] | None = None
    phase_rule: Callable[[int, int], float] = default_phase_rule

    def __post_init__(self):
        if self.base < 2:
            raise ValueError(f"base must be >= 2, got {self.base}")
        if self.shears_per_block < 2 or self.shears_per_block % 2 != 0:
            raise ValueError(
                f"shears_per_block must be an even integer >= 2, got {self.shears_per_block}"
            )
        if self.amplitude_rule is None:
            a = self.amplitude
            object.__setattr__(self, "amplitude_rule", lambda n: a / self.base**n)
        if self.amplitude_rule(0) <= 0.0:
            raise ValueError("amplitude_rule must be positive")

    def lam(self, n: int) -> int:
        return self.base**n


@dataclass(frozen=True)
class ShearStep:
    """One unidirectional shear segment of a block, in block time.

    ``axis`` is "horizontal" (flow along x1, profile in x2) or "vertical".
    ``s_start``/``s_end`` delimit the segment within the unit block time;
    the displacement is parameterized by the normalized segment coordinate
    sigma = (s - s_start)/(s_end - s_start).
    """

    stage: int
    index: int
    axis: str
    wavenumber: int
    phase: float
    amplitude: float
    s_start: float
    s_end: float

    @property
    def horizontal(self) -> bool:
        return self.axis == "horizontal"

    def sigma(self, s: float) -> float:
        return (s - self.s_start) / (self.s_end - self.s_start)

    def displacement(self, s0: float, s1: float) -> float:
        """Exact displacement amplitude accumulated over block time [s0, s1]."""
        return self.amplitude * envelope_integral(self.sigma(s0), self.sigma(s1))

    def displacement_total(self) -> float:
        return self.amplitude * envelope_integral(0.0, 1.0)


def build_block_drift(n: int, params: BlockParams, grid_n: int | None = None) -> list[ShearStep]:
    """The K shear steps of block n, partitioning unit block time."""
    if n < 0:
        raise ValueError(f"stage index must be >= 0, got {n}")
    if grid_n is not None:
        check_resolution(n, params.base, grid_n)
    k = params.shears_per_block
    lam = params.lam(n)
    amp = params.amplitude_rule(n)
    steps = []
    for j in range(k):
        steps.append(
            ShearStep(
                stage=n,
                index=j,
                axis="horizontal" if j % 2 == 0 else "vertical",
                wavenumber=lam,
                phase=params.phase_rule(n, j),
                amplitude=amp,
                s_start=j / k,
                s_end=(j + 1) / k,
            )
        )
    return steps


def check_resolution(n: int, base: int, grid_n: int, hard_factor: int = 2) -> bool:
    """Hard guard lambda_{n+1} <= N/2; returns False when the softer N/4
    diagnostic-quality margin is missed (caller may warn)."""
    lam_next = base ** (n + 1)
    if lam_next > grid_n // hard_factor:
        raise ResolutionError(
            f"block {n} produces scale lambda_{n+1} = {lam_next} "
            f"unresolvable on an N = {grid_n} grid (limit N/2 = {grid_n // hard_factor})"
        )
    return lam_next <= grid_n // 4


def apply_displacement(
    field: ScalarField2D, horizontal: bool, wavenumber: int, phase: float, disp: float
) -> ScalarField2D:
    """Translate each grid line by disp * sin(2 pi wavenumber x + 2 pi phase).

    Exact per-line spectral phase shift.  The Nyquist bin is left untouched:
    translation of that mode is not representable on the grid, and keeping it
    fixed makes the map exactly unitary and exactly invertible.
    """
    n = field.n
    if disp == 0.0:
        return field
    coords = np.arange(n) / n
    d = disp * np.sin(2.0 * np.pi * wavenumber * coords + 2.0 * np.pi * phase)
    k = np.arange(n // 2 + 1)
    phases = np.exp(-2j * np.pi * np.outer(d, k))
    phases[:, -1] = 1.0
    if horizontal:
        spec = sfft.rfft(field.values, axis=1, workers=fields.FFT_WORKERS)
        spec *= phases
        return ScalarField2D(sfft.irfft(spec, n=n, axis=1, workers=fields.FFT_WORKERS))
    spec = sfft.rfft(field.values, axis=0, workers=fields.FFT_WORKERS)
    spec *= phases.T
    return ScalarField2D(sfft.irfft(spec, n=n, axis=0, workers=fields.FFT_WORKERS))


def apply_shear_exact(
    field: ScalarField2D, step: ShearStep, sub_interval: tuple[float, float]
) -> ScalarField2D:
    """Advance the field through ``step`` over a block-time sub-interval."""
    s0, s1 = sub_interval
    lo = step.s_start - 1e-12
    hi = step.s_end + 1e-12
    if not (lo <= s0 <= s1 <= hi):
        raise ValueError(f"sub-interval [{s0}, {s1}] outside step window [{step.s_start}, {step.s_end}]")
    disp = step.displacement(s0, s1)
    return apply_displacement(field, step.horizontal, step.wavenumber, step.phase, disp)


def apply_block(field: ScalarField2D, n: int, params: BlockParams) -> ScalarField2D:
    """Run a whole block over the field (full unit of block time)."""
    for step in build_block_drift(n, params, grid_n=field.n):
        field = apply_shear_exact(field, step, (step.s_start, step.s_end))
    return field


def grad_linf(field: ScalarField2D) -> float:
    """max |grad theta| via spectral differentiation."""
    g = field.grid
    c = field.spectral()
    dx1 = sfft.irfft2(c * (2j * np.pi * g.k1[None, :]) * field.n**2, s=(field.n, field.n))
    dx2 = sfft.irfft2(c * (2j * np.pi * g.k2[:, None]) * field.n**2, s=(field.n, field.n))
    return float(np.max(np.hypot(dx1, dx2)))


@dataclass
class BlockReport:
    """Measured block estimates against configured caps."""

    n: int
    lambda_n: int
    sup_linf: float
    grad_ratio: float
    mixnorm_ratio: float
    linf_cap: float
    grad_cap: float
    mixnorm_cap: float
    l2_drift: float
    mean_drift: float

    @property
    def passed(self) -> bool:
        return (
            self.sup_linf <= self.linf_cap
            and self.grad_ratio <= self.grad_cap
            and self.mixnorm_ratio <= self.mixnorm_cap
        )

    def to_json(self) -> str:
        return json.dumps(
            {
                "n": self.n,
                "lambda_n": self.lambda_n,
                "sup_linf": self.sup_linf,
                "grad_ratio": self.grad_ratio,
                "mixnorm_ratio": self.mixnorm_ratio,
                "pass": self.passed,
            }
        )


def scale_density(n: int, lam: int) -> ScalarField2D:
    """Canonical mean-zero unit-norm density at scale lam: rho_in(lam x)."""
    x1, x2 = SpectralGrid(n).coords()
    return ScalarField2D(2.0 * np.sin(2.0 * np.pi * lam * x1) * np.sin(2.0 * np.pi * lam * x2))


def verify_block_estimates(
    n: int,
    params: BlockParams,
    grid_n: int,
    linf_cap: float = 10.0,
    grad_cap: float | None = None,
    mixnorm_cap: float = 1.5,
) -> BlockReport:
    """Evolve a scale-lambda_n density through block n and measure the caps.

    grad_ratio = sup_t ||grad rho||_inf / lambda_{n+1};
    mixnorm_ratio = ||rho(1)||_{H^-1} * lambda_{n+1}.

    Exact transport sharpens filaments all the way to the grid scale, so the
    measured gradient saturates near pi N ||rho||_inf regardless of the block
    index; the default gradient cap therefore scales with N / lambda_{n+1}
    (12 N / lambda_{n+1}) rather than being an absolute constant.
    """
    from .diagnostics import h_minus1_norm  # local import to avoid a cycle

    check_resolution(n, params.base, grid_n)
    lam = params.lam(n)
    lam_next = params.lam(n + 1)
    if grad_cap is None:
        grad_cap = 12.0 * grid_n / lam_next
    rho = scale_density(grid_n, lam)
    e0 = rho.energy()
    m0 = rho.mean()
    sup_linf = rho.linf_norm()
    sup_grad = grad_linf(rho)
    for step in build_block_drift(n, params):
        rho = apply_shear_exact(rho, step, (step.s_start, step.s_end))
        sup_linf = max(sup_linf, rho.linf_norm())
        sup_grad = max(sup_grad, grad_linf(rho))
    return BlockReport(
        n=n,
        lambda_n=lam,
        sup_linf=sup_linf,
        grad_ratio=sup_grad / lam_next,
        mixnorm_ratio=h_minus1_norm(rho) * lam_next,
        linf_cap=linf_cap,
        grad_cap=grad_cap,
        mixnorm_cap=mixnorm_cap,
        l2_drift=abs(rho.energy() - e0),
        mean_drift=abs(rho.mean() - m0),
    )


def run_inviscid_cascade(
    n_hi: int, params: BlockParams, grid_n: int
) -> tuple[ScalarField2D, list[float]]:
    """Evolve rho_in through blocks 0..n_hi; returns the field and the
    stage-end H^-1 mix norms (one density across all stages)."""
    from .diagnostics import h_minus1_norm

    check_resolution(n_hi, params.base, grid_n)
    rho = fields.block_initial_density(grid_n)
    mixnorms = []
    for n in range(n_hi + 1):
        rho = apply_block(rho, n, params)
        mixnorms.append(h_minus1_norm(rho))
    return rho, mixnorms


def mixnorm_slope(mixnorms: Sequence[float], base: int, n_lo: int = 0) -> float:
    """Least-squares slope of log mix-norm against log lambda_{n+1}."""
    lam = np.array([float(base) ** (n_lo + i + 1) for i in range(len(mixnorms))])
    return float(np.polyfit(np.log(lam), np.log(np.asarray(mixnorms)), 1)[0])

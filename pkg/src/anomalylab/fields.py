"""Real scalar fields on the N x N periodic unit torus with spectral access.

Conventions used throughout the package:

* wavenumber k counts cycles per unit torus, so the Fourier basis is
  exp(2*pi*i k.x) and the Laplacian multiplier is -4 pi^2 |k|^2;
* Fourier coefficients are rfft2(values)/N^2, and sum_k |c_k|^2 (with the
  half-spectrum weights) equals the mean-square of the grid values.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.fft as sfft

# Worker count handed to scipy.fft; results do not depend on it.
FFT_WORKERS = 1


def set_fft_workers(n: int) -> None:
    global FFT_WORKERS
    FFT_WORKERS = max(1, int(n))


class GridError(ValueError):
    """Unsupported grid size."""


def _check_grid_size(n: int) -> None:
    if n < 8 or (n & (n - 1)) != 0:
        raise GridError(f"grid size must be a power of two >= 8, got {n}")


@lru_cache(maxsize=16)
class SpectralGrid:
    """Cached wavenumber arrays and Parseval weights for one grid size."""

    def __init__(self, n: int):
        _check_grid_size(n)
        self.n = n
        self.k1 = np.arange(n // 2 + 1)            # rfft axis (x1)
        self.k2 = sfft.fftfreq(n, 1.0 / n)         # full axis (x2)
        self.k_sq = self.k2[:, None] ** 2 + self.k1[None, :] ** 2
        w = np.full(n // 2 + 1, 2.0)
        w[0] = 1.0
        w[-1] = 1.0
        self.weights = w[None, :]
        self.k_sq_safe = np.where(self.k_sq == 0.0, 1.0, self.k_sq)

    def coords(self):
        x = np.arange(self.n) / self.n
        return np.meshgrid(x, x, indexing="xy")


@dataclass
class ScalarField2D:
    """Scalar on the uniform grid; values[i2, i1] = theta(x1=i1/N, x2=i2/N)."""

    values: np.ndarray
    _spectral: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2 or self.values.shape[0] != self.values.shape[1]:
            raise GridError(f"expected a square array, got shape {self.values.shape}")
        _check_grid_size(self.values.shape[0])

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def grid(self) -> SpectralGrid:
        return SpectralGrid(self.n)

    def spectral(self) -> np.ndarray:
        """Unit-torus Fourier coefficients, rfft2(values)/N^2 (cached)."""
        if self._spectral is None:
            self._spectral = sfft.rfft2(self.values, workers=FFT_WORKERS) / self.n**2
        return self._spectral

    @classmethod
    def from_spectral(cls, coeffs: np.ndarray) -> "ScalarField2D":
        n = coeffs.shape[0]
        values = sfft.irfft2(coeffs * n**2, s=(n, n), workers=FFT_WORKERS)
        return cls(values, _spectral=coeffs)

    def copy(self) -> "ScalarField2D":
        return ScalarField2D(self.values.copy())

    def mean(self) -> float:
        return float(np.mean(self.values))

    def energy(self) -> float:
        """L^2 norm squared per unit area, ||theta||^2."""
        return float(np.mean(self.values * self.values))

    def l2_norm(self) -> float:
        return float(np.sqrt(self.energy()))

    def linf_norm(self) -> float:
        return float(np.max(np.abs(self.values)))


def block_initial_density(n: int) -> ScalarField2D:
    """rho_in(x) = 2 sin(2 pi x1) sin(2 pi x2): mean zero, unit L^2 norm."""
    _check_grid_size(n)
    x1, x2 = SpectralGrid(n).coords()
    return ScalarField2D(2.0 * np.sin(2.0 * np.pi * x1) * np.sin(2.0 * np.pi * x2))

"""Smooth step and temporal envelope shared by the shear blocks and the time warp.

Everything is built from one bump B(s) = exp(-1/(s(1-s))) on (0,1).  The
normalized bump integral

    S(s) = int_0^s B / int_0^1 B

is a C-infinity nondecreasing step with S(0)=0, S(1)=1, flat to all orders
at both endpoints, and symmetric: S(s) + S(1-s) = 1.  The shear envelope is
S'(sigma)/2, so the envelope integral over a full segment is exactly 1/2.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(96)


def bump(s):
    """B(s) = exp(-1/(s(1-s))) on (0,1), zero outside."""
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    inside = (s > 0.0) & (s < 1.0)
    si = s[inside]
    out[inside] = np.exp(-1.0 / (si * (1.0 - si)))
    return out


def _bump_integral(x):
    """int_0^x B, vectorized Gauss-Legendre (abs error < 1e-13 on [0,1])."""
    x = np.asarray(x, dtype=float)
    flat = x.ravel()
    t = 0.5 * (_GL_NODES[None, :] + 1.0) * flat[:, None]
    vals = (bump(t) @ _GL_WEIGHTS) * 0.5 * flat
    return vals.reshape(x.shape)


# Normalization int_0^1 B via the same rule as _bump_integral, so that
# S(1) evaluates to exactly 1.0 (the two computations share every rounding).
BUMP_NORM = float(_bump_integral(np.array([1.0]))[0])


def smooth_step(x):
    """S(x), clipped to [0,1] outside the transition interval."""
    x = np.asarray(x, dtype=float)
    return _bump_integral(np.clip(x, 0.0, 1.0)) / BUMP_NORM


def smooth_step_scalar(x: float) -> float:
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    return float(_bump_integral(np.array([x]))[0] / BUMP_NORM)


def smooth_step_deriv(x):
    """S'(x) = B(x) / int_0^1 B."""
    return bump(x) / BUMP_NORM


def smooth_step_second(x):
    """S''(x) = B(x) (1-2x) / (x^2 (1-x)^2 int_0^1 B)."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    inside = (x > 0.0) & (x < 1.0)
    xi = x[inside]
    b = bump(xi)
    vals = np.zeros_like(b)
    nz = b > 0.0  # underflowed bump would otherwise give 0 * inf = nan
    vals[nz] = b[nz] * (1.0 - 2.0 * xi[nz]) / (xi[nz] * (1.0 - xi[nz])) ** 2 / BUMP_NORM
    out[inside] = vals
    return out


@lru_cache(maxsize=4096)
def smooth_step_inverse(y: float) -> float:
    """x with S(x) = y, for y in [0,1]."""
    if y <= 0.0:
        return 0.0
    if y >= 1.0:
        return 1.0
    return brentq(lambda x: smooth_step_scalar(x) - y, 0.0, 1.0, xtol=1e-15, rtol=8.9e-16)


def envelope(sigma):
    """Shear temporal envelope S'(sigma)/2; integrates to 1/2 over [0,1]."""
    return 0.5 * smooth_step_deriv(sigma)


def envelope_integral(sigma0: float, sigma1: float) -> float:
    """Exact integral of the envelope over [sigma0, sigma1]."""
    return 0.5 * (smooth_step_scalar(sigma1) - smooth_step_scalar(sigma0))

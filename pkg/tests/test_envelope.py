import numpy as np
import pytest
from scipy.integrate import quad

from anomalylab.envelope import (
    BUMP_NORM,
    bump,
    envelope,
    envelope_integral,
    smooth_step,
    smooth_step_deriv,
    smooth_step_inverse,
    smooth_step_scalar,
    smooth_step_second,
)


def test_step_endpoints():
    assert smooth_step_scalar(0.0) == 0.0
    assert smooth_step_scalar(1.0) == 1.0
    assert smooth_step_scalar(-0.5) == 0.0
    assert smooth_step_scalar(1.5) == 1.0


def test_step_symmetry():
    for x in [0.1, 0.25, 0.4, 0.5]:
        assert smooth_step_scalar(x) + smooth_step_scalar(1.0 - x) == pytest.approx(1.0, abs=1e-13)


def test_step_against_adaptive_quadrature():
    # independent oracle: scipy adaptive quadrature of the bump
    norm, _ = quad(lambda s: np.exp(-1.0 / (s * (1.0 - s))), 0.0, 1.0, epsabs=1e-15)
    assert BUMP_NORM == pytest.approx(norm, rel=1e-12)
    for x in [0.15, 0.333, 0.5, 0.77, 0.95]:
        ref, _ = quad(lambda s: np.exp(-1.0 / (s * (1.0 - s))), 0.0, x, epsabs=1e-16)
        assert smooth_step_scalar(x) == pytest.approx(ref / norm, abs=1e-12)


def test_step_derivative_consistency():
    # central differences against the closed forms; the second difference
    # needs a larger step to stay above the rounding floor eps/h^2
    for x in [0.2, 0.5, 0.8]:
        h = 1e-6
        fd1 = (smooth_step_scalar(x + h) - smooth_step_scalar(x - h)) / (2 * h)
        assert float(smooth_step_deriv(np.array([x]))[0]) == pytest.approx(fd1, abs=1e-8)
        h = 1e-4
        fd2 = (smooth_step_scalar(x + h) - 2 * smooth_step_scalar(x) + smooth_step_scalar(x - h)) / h**2
        assert float(smooth_step_second(np.array([x]))[0]) == pytest.approx(fd2, rel=1e-4, abs=1e-5)


def test_step_monotone_and_flat():
    x = np.linspace(0, 1, 2001)
    s = smooth_step(x)
    # monotone up to quadrature rounding
    assert np.all(np.diff(s) >= -1e-14)
    # all-orders flatness shows up as very small values near the endpoints;
    # the upper end is only flat to quadrature rounding of the two integrals
    assert smooth_step_scalar(0.01) < 1e-40
    assert abs(1.0 - smooth_step_scalar(0.99)) < 1e-13


def test_inverse_round_trip():
    for y in [0.0, 0.125, 0.25, 0.5, 0.875, 1.0]:
        x = smooth_step_inverse(y)
        assert smooth_step_scalar(x) == pytest.approx(y, abs=1e-13)


def test_envelope_normalization():
    # the envelope integrates to exactly one half over the full segment
    assert envelope_integral(0.0, 1.0) == pytest.approx(0.5, abs=1e-14)
    x = np.linspace(0, 1, 4001)
    vals = envelope(x)
    assert np.trapezoid(vals, x) == pytest.approx(0.5, abs=1e-6)

import numpy as np
import pytest

from anomalylab.fields import GridError, ScalarField2D, SpectralGrid, block_initial_density


def test_initial_density_norms():
    f = block_initial_density(64)
    # 4 * 1/2 * 1/2 = 1 exactly
    assert f.energy() == pytest.approx(1.0, abs=1e-13)
    assert abs(f.mean()) < 1e-14


def test_initial_density_rejects_bad_grids():
    with pytest.raises(GridError):
        block_initial_density(4)
    with pytest.raises(GridError):
        block_initial_density(100)


def test_spectral_round_trip():
    rng = np.random.default_rng(7)
    f = ScalarField2D(rng.standard_normal((32, 32)))
    g = ScalarField2D.from_spectral(f.spectral())
    assert np.max(np.abs(g.values - f.values)) < 1e-12 * np.max(np.abs(f.values))


def test_conjugate_symmetry_real_values():
    rng = np.random.default_rng(8)
    f = ScalarField2D(rng.standard_normal((16, 16)))
    c = f.spectral()
    # rfft2 stores the half spectrum; realness means the full axis is conjugate
    full = np.fft.fft2(f.values) / 16**2
    assert np.max(np.abs(full[:, :9] - c)) < 1e-13


def test_parseval_energy():
    rng = np.random.default_rng(9)
    f = ScalarField2D(rng.standard_normal((64, 64)))
    grid = f.grid
    c = f.spectral()
    spec_energy = float(np.sum(grid.weights * np.abs(c) ** 2))
    assert spec_energy == pytest.approx(f.energy(), rel=1e-12)


def test_grid_cache_identity():
    assert SpectralGrid(64) is SpectralGrid(64)

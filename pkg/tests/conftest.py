import numpy as np
import pytest

from whitham_lab import make_builtin
from whitham_lab.spectral import Field


@pytest.fixture(scope="session")
def whitham():
    return make_builtin("whitham")


@pytest.fixture(scope="session")
def bessel():
    return make_builtin("bessel")


@pytest.fixture(scope="session")
def fkdv1():
    return make_builtin("fkdv", 1.0)


@pytest.fixture(scope="session")
def smooth1():
    return make_builtin("smooth_fkdv", 1.0)


@pytest.fixture
def band_field():
    """Factory for real zero-mean fields with smoothly decaying random spectra."""

    def make(grid, seed, band=None, amplitude=0.3):
        band = grid.dealias_band if band is None else band
        rng = np.random.default_rng(seed)
        c = np.zeros(grid.n_points, dtype=complex)
        for k in range(1, band + 1):
            z = (rng.standard_normal() + 1j * rng.standard_normal()) / (1.0 + k) ** 2
            c[k] = z
            c[-k] = np.conj(z)
        f = Field(grid, c)
        peak = float(np.max(np.abs(f.values())))
        return (amplitude / peak) * f

    return make

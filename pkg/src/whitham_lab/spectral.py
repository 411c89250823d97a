"""Periodic grids, real zero-mean fields, and exact spectral primitives.

Fields live on [0, 2 pi L) and are stored as Fourier-series coefficients
c_k in FFT order, u(x) = sum_k c_k exp(i k x / L), so c = fft(u)/n and
u = n ifft(c).  Three conventions hold everywhere:

* fields are real (conjugate-symmetric coefficients) and zero-mean
  (c_0 = 0; any removed mean is recorded, never lost);
* odd-order derivatives zero the unpaired Nyquist mode;
* products are never aliased: either the 2/3-rule cutoff makes the
  same-grid product exact, or ``multiply`` zero-pads to double resolution.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

__all__ = [
    "Grid",
    "Field",
    "GridMismatchError",
    "BandLimitError",
    "synthesize",
    "field_from_modes",
    "derivative",
    "apply_L",
    "sobolev_norm",
    "inner",
    "dealias",
    "multiply",
    "reflect",
    "tail_fraction",
    "band_limit_of",
    "require_band_limited",
]


class GridMismatchError(ValueError):
    """Operands live on different grids."""


class BandLimitError(ValueError):
    """A field carries energy beyond the band an operation requires."""


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid with n_points samples on [0, 2 pi scale)."""

    n_points: int
    scale: float = 1.0

    def __post_init__(self):
        n = self.n_points
        if n < 16 or n & (n - 1) != 0:
            raise ValueError(f"n_points must be a power of two >= 16, got {n}")
        if not self.scale > 0:
            raise ValueError(f"scale must be positive, got {self.scale}")

    @cached_property
    def x(self) -> np.ndarray:
        return 2.0 * np.pi * self.scale * np.arange(self.n_points) / self.n_points

    @cached_property
    def k_index(self) -> np.ndarray:
        return np.fft.fftfreq(self.n_points, 1.0 / self.n_points).astype(int)

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        return self.k_index / self.scale

    @property
    def length(self) -> float:
        return 2.0 * np.pi * self.scale

    @property
    def nyquist(self) -> int:
        return self.n_points // 2

    @property
    def dealias_band(self) -> int:
        return self.n_points // 3


def _hermitianize(c: np.ndarray) -> np.ndarray:
    # (c_k + conj(c_{-k})) / 2 in FFT order; index -k is (n - k) mod n.
    sym = 0.5 * (c + np.conj(np.roll(c[::-1], 1)))
    n = c.size
    sym[n // 2] = sym[n // 2].real
    return sym


@dataclass(frozen=True)
class Field:
    """Real zero-mean periodic field, stored spectrally.

    removed_mean accumulates whatever constant component construction or
    products stripped off, so nothing is silently discarded.
    """

    grid: Grid
    coeffs: np.ndarray
    removed_mean: float = 0.0

    @classmethod
    def from_coeffs(
        cls, grid: Grid, coeffs: np.ndarray, removed_mean: float = 0.0, tol: float = 1e-12
    ) -> "Field":
        c = np.asarray(coeffs, dtype=complex)
        if c.shape != (grid.n_points,):
            raise ValueError(f"expected {grid.n_points} coefficients, got shape {c.shape}")
        scale = max(float(np.max(np.abs(c))), np.finfo(float).tiny)
        sym = _hermitianize(c.copy())
        if float(np.max(np.abs(sym - c))) > tol * scale:
            raise ValueError("coefficients are not conjugate-symmetric: field would be complex")
        mean = float(sym[0].real)
        sym[0] = 0.0
        return cls(grid, sym, removed_mean + mean)

    def values(self) -> np.ndarray:
        return (self.grid.n_points * np.fft.ifft(self.coeffs)).real

    def copy_with(self, coeffs: np.ndarray, removed_mean: float | None = None) -> "Field":
        return Field(self.grid, coeffs, self.removed_mean if removed_mean is None else removed_mean)

    def __add__(self, other: "Field") -> "Field":
        _same_grid(self, other)
        return Field(self.grid, self.coeffs + other.coeffs, self.removed_mean + other.removed_mean)

    def __sub__(self, other: "Field") -> "Field":
        _same_grid(self, other)
        return Field(self.grid, self.coeffs - other.coeffs, self.removed_mean - other.removed_mean)

    def __mul__(self, scalar: float) -> "Field":
        s = float(scalar)
        return Field(self.grid, s * self.coeffs, s * self.removed_mean)

    __rmul__ = __mul__

    def __neg__(self) -> "Field":
        return Field(self.grid, -self.coeffs, -self.removed_mean)


def _same_grid(f: Field, g: Field) -> None:
    if f.grid != g.grid:
        raise GridMismatchError(f"fields live on different grids: {f.grid} vs {g.grid}")


def synthesize(grid: Grid, point_values: np.ndarray) -> Field:
    """Field from real samples on grid.x; the mean is removed and recorded."""
    v = np.asarray(point_values, dtype=float)
    if v.shape != (grid.n_points,):
        raise ValueError(f"expected {grid.n_points} samples, got shape {v.shape}")
    c = np.fft.fft(v) / grid.n_points
    return Field.from_coeffs(grid, c, tol=np.inf)


def field_from_modes(grid: Grid, modes: dict) -> Field:
    """Field with prescribed coefficients on positive modes; conjugate
    partners are filled in automatically.  Keys are integer wavenumber
    indexes k with 1 <= k <= nyquist; Nyquist amplitudes must be real."""
    c = np.zeros(grid.n_points, dtype=complex)
    for k, amp in modes.items():
        k = int(k)
        if not 1 <= k <= grid.nyquist:
            raise ValueError(f"mode index {k} outside 1..{grid.nyquist}")
        if k == grid.nyquist:
            if complex(amp).imag != 0:
                raise ValueError("Nyquist amplitude must be real")
            c[k] = complex(amp).real
        else:
            c[k] = amp
            c[-k] = np.conj(amp)
    return Field(grid, c)


_I_POW = (1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j)


def derivative(f: Field, order: int = 1) -> Field:
    """Spectral d^order/dx^order; odd orders zero the Nyquist mode."""
    if order < 0:
        raise ValueError("order must be nonnegative")
    if order == 0:
        return f
    xi = f.grid.wavenumbers
    mult = _I_POW[order % 4] * xi ** order
    c = f.coeffs * mult
    if order % 2 == 1:
        c[f.grid.nyquist] = 0.0
    return Field(f.grid, c, 0.0)


def apply_L(sym, f: Field) -> Field:
    """Fourier multiplier p(xi) applied to f.

    The xi = 0 entry is forced to 0: fields are zero-mean, and symbols like
    |xi|^alpha with alpha < 0 have no finite p(0) to multiply by.
    """
    xi = f.grid.wavenumbers
    mult = np.asarray(sym.eval_p(np.abs(xi)), dtype=float)
    mult[0] = 0.0
    return Field(f.grid, f.coeffs * mult, 0.0)


def sobolev_norm(f: Field, s: float) -> float:
    """H^s norm sqrt(2 pi L sum (1 + xi^2)^s |c_k|^2)."""
    if s < -2:
        raise ValueError(f"Sobolev index below -2 is unsupported, got {s}")
    xi = f.grid.wavenumbers
    w = (1.0 + xi * xi) ** s
    return float(np.sqrt(f.grid.length * np.sum(w * np.abs(f.coeffs) ** 2)))


def inner(f: Field, g: Field) -> float:
    """L^2 inner product 2 pi L sum c_f conj(c_g) (real for real fields)."""
    _same_grid(f, g)
    return float(f.grid.length * np.sum(f.coeffs * np.conj(g.coeffs)).real)


def dealias(f: Field) -> Field:
    """2/3-rule cutoff: zero every mode with |k| > n/3."""
    c = f.coeffs.copy()
    c[np.abs(f.grid.k_index) > f.grid.dealias_band] = 0.0
    return f.copy_with(c)


def band_limit_of(f: Field, rel_tol: float = 0.0) -> int:
    """Largest |k| carrying coefficient mass above rel_tol * max|c|."""
    mag = np.abs(f.coeffs)
    live = mag > rel_tol * max(float(np.max(mag)), np.finfo(float).tiny)
    if not np.any(live):
        return 0
    return int(np.max(np.abs(f.grid.k_index[live])))


def require_band_limited(f: Field, kmax: int, what: str) -> None:
    # Coefficients at relative roundoff level are treated as zero; only
    # genuine content beyond the band breaks truncation consistency.
    b = band_limit_of(f, rel_tol=1e-12)
    if b > kmax:
        raise BandLimitError(f"{what} requires band limit <= {kmax}, field reaches |k| = {b}")


def multiply(f: Field, g: Field) -> Field:
    """Alias-free pointwise product via zero-padded transforms.

    The product is computed on a doubled grid, so no mode wraps around;
    coefficients beyond the original band are discarded (projection, not
    aliasing).  The product's mean goes into removed_mean.
    """
    _same_grid(f, g)
    n = f.grid.n_points
    ext_f = np.zeros(2 * n, dtype=complex)
    ext_g = np.zeros(2 * n, dtype=complex)
    half = n // 2
    ext_f[:half], ext_f[-half:] = f.coeffs[:half], f.coeffs[half:]
    ext_g[:half], ext_g[-half:] = g.coeffs[:half], g.coeffs[half:]
    vf = (2 * n * np.fft.ifft(ext_f)).real
    vg = (2 * n * np.fft.ifft(ext_g)).real
    cw = np.fft.fft(vf * vg) / (2 * n)
    out = np.empty(n, dtype=complex)
    out[:half], out[half:] = cw[:half], cw[-half:]
    return Field.from_coeffs(f.grid, out, tol=np.inf)


def reflect(f: Field) -> Field:
    """Spatial reflection x -> -x; for real fields c_k -> conj(c_k)."""
    return f.copy_with(np.conj(f.coeffs))


def tail_fraction(f: Field, active_band: int | None = None) -> float:
    """Fraction of coefficient energy in the top third of the active band.

    active_band defaults to the full Nyquist range; solvers that dealias
    pass n/3 so the monitor watches the band that actually evolves.
    """
    band = f.grid.nyquist if active_band is None else int(active_band)
    absk = np.abs(f.grid.k_index)
    e = np.abs(f.coeffs) ** 2
    total = float(np.sum(e[absk <= band]))
    if total == 0.0:
        return 0.0
    return float(np.sum(e[(absk > 2 * band / 3) & (absk <= band)]) / total)

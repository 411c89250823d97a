"""Dense pseudoproduct kernel for the normal-form bilinear maps B and Q.

On the discrete torus the maps are full convolutions weighted by the
non-separable multipliers m and n,

    F(B(f, g))(xi_k) = sum_j m(xi_{k-j}, xi_j) fhat_{k-j} ghat_j,
    Q = d/dx^{-1} B  (computed directly from n = -i / (2 phi)),

so each output costs O(n) and a full apply O(n^2).  The reciprocal phase
table 1/(2 phi) is precomputed once per (symbol, grid) pair; rows with a
vanishing phase off the canonical zero set are rejected rather than
patched.  Accumulation runs in a fixed ascending-j order with Neumaier
compensation, so results are reproducible to the bit and independent of
the k-blocking chosen for locality.
"""

from __future__ import annotations

import logging
import time
from functools import lru_cache

import numpy as np

from .dispersion import SymbolSpec, omega
from .spectral import (
    Field,
    Grid,
    GridMismatchError,
    apply_L,
    dealias,
    derivative,
    inner,
    multiply,
    require_band_limited,
)

__all__ = [
    "bilinear_B",
    "pseudo_Q",
    "check_bilinear_identity",
    "pairing_residual",
    "set_block_size",
    "get_block_size",
]

logger = logging.getLogger(__name__)

# k-blocking knob: None = one block, "auto" = one-shot micro-benchmark,
# int = fixed block length.  Output bits do not depend on the choice.
_BLOCK_SIZE: object = None
_AUTO_CHOICE: dict = {}


def set_block_size(value) -> None:
    if value is not None and value != "auto" and (not isinstance(value, int) or value < 16):
        raise ValueError("block size must be None, 'auto', or an int >= 16")
    global _BLOCK_SIZE
    _BLOCK_SIZE = value


def get_block_size():
    return _BLOCK_SIZE


@lru_cache(maxsize=4)
def _phase_table(sym: SymbolSpec, grid: Grid) -> tuple:
    """Reciprocal phase table RT[j, k] = 1/(2 phi(xi_{k-j}, xi_j)) in
    centered index order, zero on the convention set {k-j, j, k} ∋ 0."""
    n = grid.n_points
    half = n // 2
    kint = np.arange(-half, half)
    # omega at integer differences: only 2n-1 distinct arguments.
    wdiff = omega(sym, np.arange(-(n - 1), n) / grid.scale)
    wk = omega(sym, kint / grid.scale)
    table = np.empty((n, n), dtype=float)
    for j0 in range(0, n, 512):
        j1 = min(j0 + 512, n)
        jc = kint[j0:j1, None]
        didx = (kint[None, :] - jc) + (n - 1)
        phi2 = 2.0 * (wdiff[didx] + wk[j0:j1, None] - wk[None, :])
        mask = (didx == n - 1) | (jc == 0) | (kint[None, :] == 0)
        block = np.zeros_like(phi2)
        # a vanishing phi off the mask shows up as inf and is rejected below
        with np.errstate(divide="ignore"):
            np.divide(1.0, phi2, out=block, where=~mask)
        if not np.all(np.isfinite(block)):
            raise ValueError(
                f"phase function of {sym.name} vanishes off the canonical zero set; "
                "the normal-form multiplier is not defined on this grid"
            )
        table[j0:j1] = block
    xi_centered = kint / grid.scale
    return table, xi_centered


def _auto_block(n: int, table: np.ndarray, xi: np.ndarray) -> int:
    if n in _AUTO_CHOICE:
        return _AUTO_CHOICE[n]
    rng = np.random.default_rng(0)
    fc = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    best, best_t = n, np.inf
    for cand in sorted({256, 1024, n} & set(range(16, n + 1)) | {n}):
        t0 = time.perf_counter()
        _convolve(table, fc, fc, n, cand)
        dt = time.perf_counter() - t0
        if dt < best_t:
            best, best_t = cand, dt
    _AUTO_CHOICE[n] = best
    logger.info("pseudoproduct kernel n=%d: auto-selected block size %d", n, best)
    return best


def _convolve(table: np.ndarray, fc: np.ndarray, gc: np.ndarray, n: int, block: int) -> np.ndarray:
    half = n // 2
    s_re = np.zeros(n)
    s_im = np.zeros(n)
    e_re = np.zeros(n)
    e_im = np.zeros(n)
    for k0 in range(0, n, block):
        k1 = min(k0 + block, n)
        for jc in range(n):
            gj = gc[jc]
            if gj == 0.0:
                continue
            lo = max(k0, jc - half)
            hi = min(k1, jc + half)
            if lo >= hi:
                continue
            x = (table[jc, lo:hi] * fc[lo - jc + half : hi - jc + half]) * gj
            for s, e, xs in ((s_re, e_re, x.real), (s_im, e_im, x.imag)):
                seg = s[lo:hi]
                t = seg + xs
                e[lo:hi] += np.where(np.abs(seg) >= np.abs(xs), (seg - t) + xs, (xs - t) + seg)
                s[lo:hi] = t
    return (s_re + e_re) + 1j * (s_im + e_im)


def _kernel_apply(sym: SymbolSpec, f: Field, g: Field, antiderivative: bool) -> Field:
    if f.grid != g.grid:
        raise GridMismatchError("pseudoproduct operands live on different grids")
    grid = f.grid
    n = grid.n_points
    table, xi_c = _phase_table(sym, grid)
    block = _BLOCK_SIZE
    if block == "auto":
        block = _auto_block(n, table, xi_c)
    if block is None:
        block = n
    fc = np.fft.fftshift(f.coeffs)
    gc = np.fft.fftshift(g.coeffs)
    s = _convolve(table, fc, gc, n, int(block))
    out_c = (-1j * s) if antiderivative else (xi_c * s)
    out = Field.from_coeffs(grid, np.fft.ifftshift(out_c), tol=np.inf)
    return dealias(out)


def bilinear_B(sym: SymbolSpec, f: Field, g: Field) -> Field:
    """Normal-form pseudoproduct B(f, g); symmetric, output dealiased.

    Nyquist content in either input has no conjugate partner in the sum,
    so keep inputs band-limited (any dealiased field qualifies).
    """
    return _kernel_apply(sym, f, g, antiderivative=False)


def pseudo_Q(sym: SymbolSpec, f: Field, g: Field) -> Field:
    """Antiderivative pseudoproduct Q(f, g) = dx^{-1} B(f, g), evaluated
    directly through the multiplier n = -i/(2 phi); output dealiased."""
    return _kernel_apply(sym, f, g, antiderivative=True)


def _advection(u: Field) -> Field:
    """u u_x, alias-free, truncated to the dealiased band.

    Using the same 2/3 cutoff as the kernel outputs keeps every identity
    below exact at the discrete level: one consistent truncation.
    """
    return dealias(multiply(u, derivative(u, 1)))


def check_bilinear_identity(sym: SymbolSpec, u: Field) -> float:
    """Residual of  -u u_x - L dx B(u,u) + B(L dx u, u) + B(u, L dx u) = 0.

    Returns the L^2 residual relative to the largest participating term.
    The input must be band-limited to n/3 so that every term sees the
    same truncation; the cancellation is then exact up to roundoff.
    """
    require_band_limited(u, u.grid.dealias_band, "bilinear identity check")
    w = _advection(u)
    lux = apply_L(sym, derivative(u, 1))
    t1 = -1.0 * w
    t2 = -1.0 * apply_L(sym, derivative(bilinear_B(sym, u, u), 1))
    t3 = bilinear_B(sym, lux, u)
    t4 = bilinear_B(sym, u, lux)
    residual = t1 + t2 + t3 + t4
    norms = [np.linalg.norm(t.coeffs) for t in (t1, t2, t3, t4)]
    scale = max(max(norms), np.finfo(float).tiny)
    return float(np.linalg.norm(residual.coeffs) / scale)


def pairing_residual(sym: SymbolSpec, u: Field, k: int) -> float:
    """Residual of the antiderivative pairing cancellation

        (Q(u, dx^{k+1} u), dx^k(-u u_x)) + (Q(u, dx^k(u u_x)), dx^{k+1} u) = 0,

    relative to the size of the two pairings.  Band-limited input required
    for the same reason as the bilinear identity."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    require_band_limited(u, u.grid.dealias_band, "pairing cancellation check")
    w = _advection(u)
    f0 = inner(pseudo_Q(sym, u, derivative(u, k + 1)), derivative(-1.0 * w, k))
    g0 = inner(pseudo_Q(sym, u, derivative(w, k)), derivative(u, k + 1))
    scale = max(abs(f0), abs(g0), np.finfo(float).tiny)
    return abs(f0 + g0) / scale

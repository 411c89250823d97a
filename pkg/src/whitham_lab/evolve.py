"""Integrating-factor RK4 time stepping with breakdown monitoring.

The linear part L dx is propagated exactly by the unitary multiplier
exp(i p(xi) xi dt); the advective nonlinearity -u u_x is advanced by
classical RK4 on the transformed variable (Lawson / integrating-factor
RK4).  With the nonlinearity switched off a step is a pure phase rotation,
so linear propagation is exact to roundoff for any number of steps.

The monitor stops a run when the solution leaves the regime the scheme
resolves: gradient blowup (sup |u_x| beyond a factor of its initial
value), spectral tail filling up (under-resolution), or non-finite values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .dispersion import SymbolSpec, omega
from .energy import EnergyReport, total_modified_energy
from .spectral import Field, Grid, dealias as dealias_field, derivative, sobolev_norm, tail_fraction

__all__ = ["SolverConfig", "Checkpoint", "Breakdown", "Trajectory", "step", "evolve"]


@dataclass(frozen=True)
class SolverConfig:
    """Time-stepping parameters and breakdown thresholds.

    nonlinear = False freezes the advective term (test hook: the flow is
    then the exact linear group).  The advective CFL guard
    dt <= 0.5 / (max|u0| xi_max) is enforced at evolve() entry.
    """

    dt: float
    t_end: float
    checkpoint_every: int = 10
    dealias: bool = True
    breakdown_gradient_factor: float = 10.0
    tail_fraction_limit: float = 1e-6
    nonlinear: bool = True

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.t_end < 0:
            raise ValueError(f"t_end must be nonnegative, got {self.t_end}")
        if self.checkpoint_every < 1:
            raise ValueError(f"checkpoint_every must be >= 1, got {self.checkpoint_every}")
        if self.breakdown_gradient_factor <= 1:
            raise ValueError("breakdown_gradient_factor must exceed 1")
        if not 0 < self.tail_fraction_limit < 1:
            raise ValueError("tail_fraction_limit must lie in (0, 1)")


@dataclass(frozen=True)
class Checkpoint:
    time: float
    sup_gradient: float
    l2_norm: float
    tail_fraction: float
    energy: EnergyReport
    state: Field


@dataclass(frozen=True)
class Breakdown:
    time: float
    reason: str  # one of {"gradient", "tail", "nonfinite"}


@dataclass(frozen=True)
class Trajectory:
    checkpoints: list
    final_state: Field
    breakdown: Breakdown | None

    @property
    def times(self) -> np.ndarray:
        return np.array([c.time for c in self.checkpoints])


@lru_cache(maxsize=8)
def _phases(sym: SymbolSpec, grid: Grid, dt: float) -> tuple:
    lam = 1j * omega(sym, grid.wavenumbers)
    half = np.exp(lam * (dt / 2.0))
    return half, half * half


def _nonlinear_rhs(c: np.ndarray, grid: Grid, dealias: bool) -> np.ndarray:
    # -(1/2) dx (u^2), pseudo-spectral; for band-limited states the 2/3
    # cutoff makes the same-grid square an exact (unaliased) product.
    v = (grid.n_points * np.fft.ifft(c)).real
    cw = np.fft.fft(v * v) / grid.n_points
    if dealias:
        cw[np.abs(grid.k_index) > grid.dealias_band] = 0.0
    out = (-0.5j) * grid.wavenumbers * cw
    out[grid.nyquist] = 0.0
    return out


def step(sym: SymbolSpec, u: Field, dt: float, dealias: bool = True, nonlinear: bool = True) -> Field:
    """One integrating-factor RK4 step of size dt."""
    grid = u.grid
    e_half, e_full = _phases(sym, grid, dt)
    c = u.coeffs
    if not nonlinear:
        cn = e_full * c
    else:
        k1 = dt * _nonlinear_rhs(c, grid, dealias)
        k2 = dt * _nonlinear_rhs(e_half * (c + 0.5 * k1), grid, dealias)
        k3 = dt * _nonlinear_rhs(e_half * c + 0.5 * k2, grid, dealias)
        k4 = dt * _nonlinear_rhs(e_full * c + e_half * k3, grid, dealias)
        cn = e_full * c + (e_full * k1 + 2.0 * e_half * (k2 + k3) + k4) / 6.0
    return Field.from_coeffs(grid, cn, removed_mean=u.removed_mean, tol=np.inf)


def _checkpoint(sym, u, t, n_max, band) -> Checkpoint:
    return Checkpoint(
        time=t,
        sup_gradient=float(np.max(np.abs(derivative(u, 1).values()))),
        l2_norm=sobolev_norm(u, 0.0),
        tail_fraction=tail_fraction(u, band),
        energy=total_modified_energy(sym, u, n_max, time=t),
        state=u,
    )


def evolve(sym: SymbolSpec, u0: Field, config: SolverConfig, n_max: int) -> Trajectory:
    """March u0 to t_end (or breakdown), checkpointing energies on the way.

    With dealiasing on, the initial state is truncated to the active band
    first; the state then stays band-limited for the whole run.  Returns
    the trajectory with breakdown = None on a clean finish.
    """
    grid = u0.grid
    u = dealias_field(u0) if config.dealias else u0
    band = grid.dealias_band if config.dealias else grid.nyquist

    sup0 = float(np.max(np.abs(u.values())))
    xi_max = grid.nyquist / grid.scale
    if sup0 > 0 and config.dt > 0.5 / (sup0 * xi_max):
        raise ValueError(
            f"dt = {config.dt} violates the advective guard dt <= "
            f"{0.5 / (sup0 * xi_max):.6g} = 0.5 / (max|u0| xi_max)"
        )

    grad0 = float(np.max(np.abs(derivative(u, 1).values())))
    checkpoints = [_checkpoint(sym, u, 0.0, n_max, band)]
    breakdown = None

    # Full steps use one constant dt (one cached phase pair); a shorter
    # trailing step lands exactly on t_end when it is not a multiple of dt.
    n_full = int(math.floor(config.t_end / config.dt + 1e-12))
    plan = [(i * config.dt, config.dt) for i in range(1, n_full + 1)]
    if plan and abs(plan[-1][0] - config.t_end) <= 1e-12 * max(config.t_end, 1.0):
        plan[-1] = (config.t_end, config.dt)
    elif config.t_end > 0:
        plan.append((config.t_end, config.t_end - n_full * config.dt))

    for i, (t, dt_i) in enumerate(plan, start=1):
        u = step(sym, u, dt_i, dealias=config.dealias, nonlinear=config.nonlinear)

        if not np.all(np.isfinite(u.coeffs)):
            breakdown = Breakdown(t, "nonfinite")
        else:
            grad = float(np.max(np.abs(derivative(u, 1).values())))
            tail = tail_fraction(u, band)
            if grad0 > 0 and grad > config.breakdown_gradient_factor * grad0:
                breakdown = Breakdown(t, "gradient")
            elif tail > config.tail_fraction_limit:
                breakdown = Breakdown(t, "tail")

        if breakdown is not None:
            if np.all(np.isfinite(u.coeffs)):
                checkpoints.append(_checkpoint(sym, u, t, n_max, band))
            break
        if i % config.checkpoint_every == 0 or i == len(plan):
            checkpoints.append(_checkpoint(sym, u, t, n_max, band))

    return Trajectory(checkpoints=checkpoints, final_state=u, breakdown=breakdown)

"""Periodic pseudo-spectral simulator and analysis toolkit for
Whitham-type equations u_t + u u_x - L u_x = 0 with an even dispersion
multiplier L, built around the modified-energy normal form."""

from .dispersion import (
    AssumptionReport,
    BoundGrid,
    BoundReport,
    SymbolSpec,
    SymmetryReport,
    builtin_names,
    commutator_N,
    commutator_U,
    commutator_scan,
    custom_symbol,
    m_mult,
    make_builtin,
    n_mult,
    omega,
    phi,
    sample_commutator_region,
    verify_assumptions,
    verify_m_bound,
    verify_phi_bound,
    verify_multiplier_identities,
    verify_phi_symmetries,
)
from .spectral import (
    Field,
    Grid,
    GridMismatchError,
    BandLimitError,
    dealias,
    derivative,
    apply_L,
    field_from_modes,
    inner,
    multiply,
    reflect,
    sobolev_norm,
    synthesize,
)
from .pseudoproduct import bilinear_B, pseudo_Q, check_bilinear_identity
from .energy import EnergyReport, modified_energy, quartic_rhs, total_modified_energy
from .evolve import SolverConfig, Trajectory, Checkpoint, evolve, step

__version__ = "0.1.0"

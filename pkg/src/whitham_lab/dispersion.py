"""Dispersion symbols and the trilinear phase machinery built on them.

A symbol is an even, real multiplier p(xi) acting on periodic fields.  The
resonance structure of the quadratic nonlinearity is governed by

    phi(a, b) = p(a) a + p(b) b - p(a+b) (a+b),

whose zero set is exactly {a = 0} u {b = 0} u {a + b = 0}.  The normal-form
multipliers

    m(a, b) = (a + b) / (2 phi(a, b)),      n(a, b) = -i / (2 phi(a, b))

are defined to be 0 on that zero set by convention.  This module evaluates
all of these, verifies their algebraic identities on random samples, and
estimates the sharp constants in the |phi| and |m| envelope bounds used by
the energy estimates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

from .expressions import parse_jet

__all__ = [
    "SymbolSpec",
    "BoundReport",
    "BoundGrid",
    "SymmetryReport",
    "CheckResult",
    "AssumptionReport",
    "make_builtin",
    "custom_symbol",
    "builtin_names",
    "omega",
    "phi",
    "m_mult",
    "n_mult",
    "verify_phi_symmetries",
    "verify_phi_bound",
    "verify_m_bound",
    "phi_ratio_table",
    "m_ratio_table",
    "verify_assumptions",
    "commutator_N",
    "commutator_U",
    "sample_commutator_region",
    "commutator_scan",
]

_TINY = np.finfo(float).tiny


@dataclass(frozen=True)
class SymbolSpec:
    """An even dispersion symbol with exact derivative evaluators.

    alpha is the far-field growth exponent (|p^(i)(xi)| ~ |xi|^(alpha - i)),
    j_star the order of the local expansion p(xi) = p(0) + xi^(2 j_star)
    p_tilde(xi), and p_tilde_at_zero its leading coefficient.  Symbols that
    admit no such expansion (pure-power |xi|^alpha) carry
    satisfies_a3 = False and p_tilde_at_zero = nan.
    """

    name: str
    alpha: float
    j_star: int
    p_tilde_at_zero: float
    # The callables take part in equality and hashing (by identity), so two
    # symbols with coincidentally equal metadata but different formulas never
    # share a cached kernel table.
    eval_p: Callable[[np.ndarray], np.ndarray]
    eval_dp: Callable[[np.ndarray], np.ndarray]
    eval_d2p: Callable[[np.ndarray], np.ndarray]
    satisfies_a3: bool = True

    def __post_init__(self):
        if not -1.0 <= self.alpha <= 1.0 or self.alpha == 0.0:
            raise ValueError(f"alpha must lie in [-1, 1] without 0, got {self.alpha}")
        if self.j_star < 1:
            raise ValueError(f"j_star must be a positive integer, got {self.j_star}")
        if self.satisfies_a3 and not (
            math.isfinite(self.p_tilde_at_zero) and self.p_tilde_at_zero != 0.0
        ):
            raise ValueError("p_tilde_at_zero must be finite and nonzero")


def _jet_symbol(expr: str) -> tuple:
    jet = parse_jet(expr, "xi")
    return (
        lambda x: jet(x)[0],
        lambda x: jet(x)[1],
        lambda x: jet(x)[2],
    )


def _make_whitham() -> SymbolSpec:
    p, dp, d2p = _jet_symbol("sqrt(tanhc(xi))")
    return SymbolSpec("whitham", -0.5, 1, -1.0 / 6.0, p, dp, d2p)


def _make_capillary(beta: float) -> SymbolSpec:
    if beta <= 0:
        raise ValueError(f"capillary_whitham requires beta > 0, got {beta}")
    if beta == 1.0 / 3.0:
        # Leading local coefficient (beta - 1/3)/2 vanishes; the j_star = 1
        # metadata would be a lie.
        raise ValueError("capillary_whitham is degenerate at beta = 1/3")
    p, dp, d2p = _jet_symbol(f"sqrt((1 + {beta!r}*xi*xi) * tanhc(xi))")
    return SymbolSpec(f"capillary_whitham({beta:g})", 0.5, 1, (beta - 1.0 / 3.0) / 2.0, p, dp, d2p)


def _make_bessel() -> SymbolSpec:
    p, dp, d2p = _jet_symbol("(1 + xi**4) ** (-0.125)")
    return SymbolSpec("bessel", -0.5, 2, -0.125, p, dp, d2p)


def _make_smooth_fkdv(alpha: float) -> SymbolSpec:
    if not -1.0 <= alpha <= 1.0 or alpha == 0.0:
        raise ValueError(f"smooth_fkdv requires alpha in [-1, 1] \\ {{0}}, got {alpha}")
    p, dp, d2p = _jet_symbol(f"(1 + xi*xi) ** ({alpha / 2.0!r})")
    return SymbolSpec(f"smooth_fkdv({alpha:g})", alpha, 1, alpha / 2.0, p, dp, d2p)


def _make_fkdv(alpha: float) -> SymbolSpec:
    if not -1.0 <= alpha <= 1.0 or alpha == 0.0:
        raise ValueError(f"fkdv requires alpha in [-1, 1] \\ {{0}}, got {alpha}")
    p, dp, d2p = _jet_symbol(f"abs(xi) ** ({alpha!r})")
    return SymbolSpec(f"fkdv({alpha:g})", alpha, 1, float("nan"), p, dp, d2p, satisfies_a3=False)


_BUILTINS: dict[str, tuple] = {
    "whitham": (_make_whitham, 0),
    "capillary_whitham": (_make_capillary, 1),
    "bessel": (_make_bessel, 0),
    "smooth_fkdv": (_make_smooth_fkdv, 1),
    "fkdv": (_make_fkdv, 1),
}


def builtin_names() -> list:
    return sorted(_BUILTINS)


def make_builtin(name: str, *params: float) -> SymbolSpec:
    """Construct a builtin symbol by name with its positional parameters.

    whitham and bessel take none; capillary_whitham takes beta;
    smooth_fkdv and fkdv take alpha.
    """
    try:
        factory, arity = _BUILTINS[name]
    except KeyError:
        raise ValueError(f"unknown builtin symbol {name!r}; choose from {builtin_names()}") from None
    if len(params) != arity:
        raise ValueError(f"{name} takes {arity} parameter(s), got {len(params)}")
    return factory(*[float(p) for p in params])


def custom_symbol(
    expr: str,
    alpha: float,
    j_star: int,
    name: str = "custom",
    p_tilde_at_zero: float | None = None,
    satisfies_a3: bool = True,
) -> SymbolSpec:
    """Build a symbol from an expression in ``xi``.

    When p_tilde_at_zero is not supplied and the local expansion is claimed,
    its leading coefficient is estimated from (p(t) - p(0)) / t^(2 j_star)
    with one Richardson step; the step is sized so the numerator keeps about
    half the mantissa.
    """
    p, dp, d2p = _jet_symbol(expr)
    if p_tilde_at_zero is None:
        if satisfies_a3:
            t = 1e-8 ** (1.0 / (2 * j_star))
            p0 = float(p(0.0))
            est = lambda s: (float(p(s)) - p0) / s ** (2 * j_star)
            p_tilde_at_zero = 2.0 * est(t / 2.0) - est(t)
        else:
            p_tilde_at_zero = float("nan")
    return SymbolSpec(name, alpha, j_star, p_tilde_at_zero, p, dp, d2p, satisfies_a3=satisfies_a3)


# ---------------------------------------------------------------------------
# phase function and multipliers


def omega(sym: SymbolSpec, xi) -> np.ndarray:
    """Dispersion relation p(xi) xi, with the removable value 0 at xi = 0.

    The explicit patch matters for homogeneous symbols with alpha < 0,
    where p(0) is infinite but p(xi) xi -> 0.
    """
    x = np.asarray(xi, dtype=float)
    zero = x == 0.0
    xs = np.where(zero, 1.0, x)
    with np.errstate(invalid="ignore", divide="ignore"):
        val = sym.eval_p(xs) * xs
    return np.where(zero, 0.0, val)


def phi(sym: SymbolSpec, a, b) -> np.ndarray:
    """Resonance function p(a) a + p(b) b - p(a+b) (a+b)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return omega(sym, a) + omega(sym, b) - omega(sym, a + b)


def _zero_set_mask(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return (a == 0.0) | (b == 0.0) | (a + b == 0.0)


def m_mult(sym: SymbolSpec, a, b) -> np.ndarray:
    """Energy multiplier (a+b) / (2 phi(a,b)); 0 on the zero set."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    mask = _zero_set_mask(a, b)
    den = 2.0 * phi(sym, a, b)
    den = np.where(mask, 1.0, den)
    return np.where(mask, 0.0, (a + b) / den)


def n_mult(sym: SymbolSpec, a, b) -> np.ndarray:
    """Antiderivative multiplier -i / (2 phi(a,b)); 0 on the zero set."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    mask = _zero_set_mask(a, b)
    den = 2.0 * phi(sym, a, b)
    den = np.where(mask, 1.0, den)
    return np.where(mask, 0.0 + 0.0j, -1.0j / den)


# ---------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class BoundReport:
    """Sampled envelope-bound constants c_min <= |quantity|/model <= c_max."""

    model_name: str
    c_min: float
    c_max: float
    sample_count: int
    worst_point: tuple


@dataclass(frozen=True)
class SymmetryReport:
    passed: bool
    max_residual: float
    sample_count: int
    seed: int


@dataclass(frozen=True)
class CheckResult:
    passed: bool
    value: float
    detail: str


@dataclass(frozen=True)
class AssumptionReport:
    symbol: str
    passed: bool
    checks: dict


# ---------------------------------------------------------------------------
# sampled identity checks


def _sample_offsets(rng: np.random.Generator, n: int, lo: float, hi: float) -> np.ndarray:
    mag = np.exp(rng.uniform(np.log(lo), np.log(hi), size=n))
    sign = rng.choice([-1.0, 1.0], size=n)
    return mag * sign


def _separated_pairs(rng: np.random.Generator, n: int) -> tuple:
    """Random (a, b) pairs kept a relative distance 1e-3 off the zero set.

    Near {a=0, b=0, a+b=0} the identities still hold exactly in real
    arithmetic but float evaluation of phi cancels, so sampled relative
    residuals there measure conditioning, not correctness.
    """
    a = np.empty(0)
    b = np.empty(0)
    while a.size < n:
        ca = _sample_offsets(rng, 2 * n, 1e-3, 1e3)
        cb = _sample_offsets(rng, 2 * n, 1e-3, 1e3)
        r = np.hypot(ca, cb)
        keep = (np.abs(ca) > 1e-3 * r) & (np.abs(cb) > 1e-3 * r) & (np.abs(ca + cb) > 1e-3 * r)
        a = np.concatenate([a, ca[keep]])
        b = np.concatenate([b, cb[keep]])
    return a[:n], b[:n]


def verify_phi_symmetries(sym: SymbolSpec, samples: int = 10_000, seed: int = 0) -> SymmetryReport:
    """Check phi(a,b) = phi(b,a) = -phi(-a,-b) = phi(-(a+b), b) on random pairs.

    Residuals are measured relative to the largest of the three omega terms
    entering phi, which is the scale float evaluation actually works at.
    Fails when the worst residual exceeds 1e-12.
    """
    rng = np.random.default_rng(seed)
    a, b = _separated_pairs(rng, samples)
    scale = np.maximum.reduce(
        [np.abs(omega(sym, a)), np.abs(omega(sym, b)), np.abs(omega(sym, a + b))]
    )
    scale = np.maximum(scale, _TINY)
    base = phi(sym, a, b)
    res = np.maximum.reduce(
        [
            np.abs(base - phi(sym, b, a)),
            np.abs(base + phi(sym, -a, -b)),
            np.abs(base - phi(sym, -(a + b), b)),
        ]
    )
    worst = float(np.max(res / scale))
    return SymmetryReport(worst <= 1e-12, worst, samples, seed)


def verify_multiplier_identities(
    sym: SymbolSpec, samples: int = 10_000, seed: int = 0
) -> SymmetryReport:
    """Check the pairing identity m(xi-eta,eta)*eta + m(eta-xi,xi)*xi = 0,
    the conjugation identity n(xi-eta,eta) = conj(n(eta-xi,xi)), and the
    exact product m(a,b)*phi(a,b) = (a+b)/2 on random sample pairs.

    The first two amount to phi changing sign under (a,b) -> (-a, a+b), so
    their float residual is bounded by phi's conditioning: near the origin
    phi ~ r^(2j*+1) while its omega terms are ~ r, and no double-precision
    evaluation can resolve the sum below eps * (term scale).  Residuals are
    therefore normalized by max(term magnitudes) * cond(phi); the product
    identity is a single well-conditioned division and is checked at its
    own face-value scale.
    """
    rng = np.random.default_rng(seed)
    a, b = _separated_pairs(rng, samples)
    xi, eta = a + b, b
    cond = np.maximum.reduce(
        [np.abs(omega(sym, a)), np.abs(omega(sym, b)), np.abs(omega(sym, xi))]
    ) / np.maximum(np.abs(phi(sym, a, b)), _TINY)
    cond = np.maximum(cond, 1.0)

    t1 = m_mult(sym, xi - eta, eta) * eta
    t2 = m_mult(sym, eta - xi, xi) * xi
    scale = np.maximum(np.maximum(np.abs(t1), np.abs(t2)), _TINY)
    r_pair = np.abs(t1 + t2) / (scale * cond)

    n1 = n_mult(sym, xi - eta, eta)
    n2 = np.conj(n_mult(sym, eta - xi, xi))
    r_conj = np.abs(n1 - n2) / (np.maximum(np.abs(n1), _TINY) * cond)

    r_prod = np.abs(m_mult(sym, a, b) * phi(sym, a, b) - 0.5 * xi) / np.abs(0.5 * xi)

    worst = float(np.max(np.maximum.reduce([r_pair, r_conj, r_prod])))
    return SymmetryReport(worst <= 1e-12, worst, samples, seed)


# ---------------------------------------------------------------------------
# envelope bounds


# relative distances of the dedicated resonance-line probes; fixed offsets
# keep the closest approach to a + b = 0 independent of grid density, the
# same role min_abs plays for the axes
_LINE_OFFSETS = (1e-2, 1e-3, 1e-4)


@dataclass(frozen=True)
class BoundGrid:
    """Log-spaced (a, b) sample grid over all four sign quadrants, plus
    probe families hugging the resonance line a + b = 0 at fixed relative
    offsets so refinement does not keep finding more extreme ratios."""

    min_abs: float = 1e-3
    max_abs: float = 1e3
    points_per_side: int = 256

    def __post_init__(self):
        if not 0 < self.min_abs < self.max_abs:
            raise ValueError("need 0 < min_abs < max_abs")
        if self.points_per_side < 4:
            raise ValueError("points_per_side must be at least 4")

    def pairs(self) -> tuple:
        mag = np.geomspace(self.min_abs, self.max_abs, self.points_per_side)
        out_a = []
        out_b = []
        for sa in (1.0, -1.0):
            for sb in (1.0, -1.0):
                A, B = np.meshgrid(sa * mag, sb * mag, indexing="ij")
                out_a.append(A.ravel())
                out_b.append(B.ravel())
        # line probes stay in the r >= 1 regime: deeper in, phi at offset
        # tau*|a| falls below the cancellation floor of its O(|a|) summands
        # (for j* = 2 already at |a| ~ min_abs) and evaluates as pure noise
        probe = mag[mag >= 1.0]
        for tau in _LINE_OFFSETS:
            for sa in (1.0, -1.0):
                out_a.append(sa * probe)
                out_b.append(-sa * probe * (1.0 - tau))
        a = np.concatenate(out_a)
        b = np.concatenate(out_b)
        keep = ~_zero_set_mask(a, b)
        return a[keep], b[keep]

    def doubled(self) -> "BoundGrid":
        return BoundGrid(self.min_abs, self.max_abs, 2 * self.points_per_side)


GridLike = Union[BoundGrid, np.ndarray, Sequence]


def _resolve_pairs(grid: GridLike) -> tuple:
    if isinstance(grid, BoundGrid):
        return grid.pairs()
    pts = np.asarray(grid, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("explicit grid must be an array of (a, b) pairs")
    a, b = pts[:, 0], pts[:, 1]
    if np.any(_zero_set_mask(a, b)):
        raise ValueError("grid touches the zero set {a=0, b=0, a+b=0}")
    return a, b


def _far_factor(sym: SymbolSpec, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # symmetric in the trio (a, b, a+b); for alpha < 0 the smallest variable
    # dominates the sum (the p(0) - p(inf) gap), for alpha > 0 the largest
    return (
        (1.0 + np.abs(a)) ** sym.alpha
        + (1.0 + np.abs(b)) ** sym.alpha
        + (1.0 + np.abs(a + b)) ** sym.alpha
    )


def _phi_model(sym: SymbolSpec, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    r = np.hypot(a, b)
    factor = np.minimum(r ** (2 * sym.j_star), _far_factor(sym, a, b))
    return np.abs(a * b * (a + b)) / r**2 * factor


def phi_ratio_table(sym: SymbolSpec, grid: GridLike) -> tuple:
    """Pointwise |phi| / model on the grid; returns (a, b, ratio) arrays."""
    if not sym.satisfies_a3:
        raise ValueError(f"{sym.name} does not claim the local expansion the phi model needs")
    a, b = _resolve_pairs(grid)
    ratio = np.abs(phi(sym, a, b)) / _phi_model(sym, a, b)
    return a, b, ratio


def _bound_report(model: str, a, b, ratio, worst_at_max: bool) -> BoundReport:
    if not np.all(np.isfinite(ratio)):
        bad = int(np.argmax(~np.isfinite(ratio)))
        raise ValueError(f"non-finite ratio for {model} at (a, b) = ({a[bad]}, {b[bad]})")
    idx = int(np.argmax(ratio)) if worst_at_max else int(np.argmin(ratio))
    return BoundReport(
        model_name=model,
        c_min=float(np.min(ratio)),
        c_max=float(np.max(ratio)),
        sample_count=int(ratio.size),
        worst_point=(float(a[idx]), float(b[idx])),
    )


def verify_phi_bound(sym: SymbolSpec, grid: GridLike = BoundGrid()) -> BoundReport:
    """Sampled constants for the two-sided model

        |phi(a,b)| ~ |ab(a+b)|/r^2 min(r^(2 j*), far_factor),

    where far_factor is the symmetric sum (1+|a|)^alpha + (1+|b|)^alpha
    + (1+|a+b|)^alpha.  Both constants matter; worst_point records the
    location of c_min, the coercivity direction.
    """
    a, b, ratio = phi_ratio_table(sym, grid)
    return _bound_report("phi_bound", a, b, ratio, worst_at_max=False)


def _m_model(sym: SymbolSpec, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # two-sided model: (r^(2 - 2 j*) + r^2 / far_factor) / |ab|
    r_sq = a * a + b * b
    low = r_sq ** (1 - sym.j_star)
    high = r_sq / _far_factor(sym, a, b)
    return (low + high) / np.abs(a * b)


def m_ratio_table(sym: SymbolSpec, grid: GridLike) -> tuple:
    """Pointwise |m| / model on the grid; returns (a, b, ratio) arrays."""
    if not sym.satisfies_a3:
        raise ValueError(f"{sym.name} does not claim the local expansion the m model needs")
    a, b = _resolve_pairs(grid)
    ratio = np.abs(m_mult(sym, a, b)) / _m_model(sym, a, b)
    return a, b, ratio


def verify_m_bound(sym: SymbolSpec, grid: GridLike = BoundGrid()) -> BoundReport:
    """Sampled constants for the two-sided model

        |m(a,b)| ~ (1/|ab|) (r^(2-2j*) + r^2 / far_factor),

    with r^2 = a^2 + b^2 and the same symmetric far_factor as the phi
    model.  The first term carries the low-frequency singularity
    (constant near the a + b = 0 line, so the ratio stays bounded away from
    zero there even for j* > 1); the second carries the high-frequency
    growth.  worst_point records the location of c_max, the binding
    direction of the upper estimate.
    """
    a, b, ratio = m_ratio_table(sym, grid)
    return _bound_report("m_bound", a, b, ratio, worst_at_max=True)


# ---------------------------------------------------------------------------
# sampled structural assumptions


def verify_assumptions(sym: SymbolSpec, samples: int = 2000, seed: int = 0) -> AssumptionReport:
    """Sampled checks of evenness, strict monotonicity, far-field decay
    envelopes for p, p', p'', and the claimed local expansion.

    The far-field check accepts when |p^(i)(xi)| / |xi|^(alpha - i) stays
    within a factor 10 of itself over [10, 1e4]; all builtins sit near
    drift 1, while an alpha wrong by 1/2 drifts by ~10^1.5.
    """
    rng = np.random.default_rng(seed)
    checks: dict[str, CheckResult] = {}

    x = np.exp(rng.uniform(np.log(1e-3), np.log(1e3), size=samples))
    pe = np.abs(sym.eval_p(x) - sym.eval_p(-x)) / np.maximum(np.abs(sym.eval_p(x)), _TINY)
    worst = float(np.max(pe))
    checks["evenness"] = CheckResult(worst <= 1e-12, worst, "max relative |p(xi)-p(-xi)|")

    grid = np.geomspace(1e-4, 1e4, 600)
    pv = sym.eval_p(grid)
    steps = np.diff(pv)
    direction = np.sign(pv[-1] - pv[0])
    # strict across decades, weak between neighbors: near p(0) the true
    # increment of a smooth symbol falls below one ulp and plateaus
    stride = 75
    mono = bool(
        direction != 0
        and np.all(direction * steps >= 0)
        and np.all(direction * (pv[stride:] - pv[:-stride]) > 0)
    )
    checks["monotonicity"] = CheckResult(
        mono, float(direction), "sign of p steps on [1e-4, 1e4]; strict across decades"
    )

    finite = bool(
        np.all(np.isfinite(pv))
        and np.all(np.isfinite(sym.eval_dp(grid)))
        and np.all(np.isfinite(sym.eval_d2p(grid)))
    )
    checks["smoothness"] = CheckResult(finite, 1.0 if finite else 0.0, "p, p', p'' finite on the grid")

    far = np.geomspace(10.0, 1e4, 200)
    for i, ev in enumerate([sym.eval_p, sym.eval_dp, sym.eval_d2p]):
        vals = np.abs(ev(far))
        if i > 0 and np.all(vals == 0.0):
            # exact power symbols at the alpha = 1 endpoint have p'' = 0;
            # the upper envelope holds with constant 0, nothing to rate
            checks[f"far_field_d{i}"] = CheckResult(
                True, 0.0, f"|p^({i})| vanishes identically on [10, 1e4]"
            )
            continue
        ratio = vals / far ** (sym.alpha - i)
        ok = bool(np.all(np.isfinite(ratio)) and np.all(ratio > 0))
        drift = float(np.max(ratio) / np.min(ratio)) if ok else float("inf")
        checks[f"far_field_d{i}"] = CheckResult(
            ok and drift <= 10.0, drift, f"drift of |p^({i})| / xi^(alpha-{i}) over [10, 1e4]"
        )

    if sym.satisfies_a3:
        # keep p(x) - p(0) ~ p_tilde x^(2j*) a few decades above roundoff:
        # for j* = 2 the numerator falls below eps already at x ~ 3e-4
        lo = min((1e-12 / abs(sym.p_tilde_at_zero)) ** (1.0 / (2 * sym.j_star)), 5e-2)
        loc = np.geomspace(max(lo, 1e-4), 1e-1, 60)
        p0 = float(sym.eval_p(np.zeros(1))[0])
        est = (sym.eval_p(loc) - p0) / loc ** (2 * sym.j_star)
        dev = float(np.max(np.abs(est / sym.p_tilde_at_zero - 1.0)))
        checks["local_expansion"] = CheckResult(
            dev <= 0.5, dev, "max relative deviation of the leading local coefficient"
        )
    else:
        checks["local_expansion"] = CheckResult(
            True, float("nan"), "not claimed (satisfies_a3 is false)"
        )

    return AssumptionReport(sym.name, all(c.passed for c in checks.values()), checks)


# ---------------------------------------------------------------------------
# commutator diagnostics


def commutator_N(sym: SymbolSpec, xi, eta, sigma) -> np.ndarray:
    """Kernel difference m(xi-eta, eta)/xi - m(xi-eta, sigma)/(xi-eta+sigma)."""
    xi = np.asarray(xi, dtype=float)
    eta = np.asarray(eta, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    return m_mult(sym, xi - eta, eta) / xi - m_mult(sym, xi - eta, sigma) / (xi - eta + sigma)


def commutator_U(sym: SymbolSpec, xi, eta, sigma) -> np.ndarray:
    """Phase difference [omega(sigma) - omega(xi-eta+sigma)] - [omega(eta) - omega(xi)]."""
    xi = np.asarray(xi, dtype=float)
    eta = np.asarray(eta, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    return (omega(sym, sigma) - omega(sym, xi - eta + sigma)) - (omega(sym, eta) - omega(sym, xi))


def _validate_region(xi: np.ndarray, eta: np.ndarray, sigma: np.ndarray) -> None:
    ok = (xi >= 1) & (eta >= 1) & (sigma >= 1) & (np.abs(xi - eta) + np.abs(eta - sigma) <= xi / 10.0)
    if not np.all(ok):
        bad = int(np.argmax(~ok))
        raise ValueError(
            "sample outside the commutator region xi,eta,sigma >= 1, "
            f"|xi-eta| + |eta-sigma| <= xi/10: ({xi[bad]}, {eta[bad]}, {sigma[bad]})"
        )


def sample_commutator_region(
    samples: int, seed: int = 0, xi_lo: float = 1.2, xi_hi: float = 1e3
) -> tuple:
    """Random (xi, eta, sigma) with eta, sigma within 3% of xi, so the
    region constraint |xi-eta| + |eta-sigma| <= xi/10 holds by construction."""
    rng = np.random.default_rng(seed)
    xi = np.exp(rng.uniform(np.log(xi_lo), np.log(xi_hi), size=samples))
    eta = xi * (1.0 + 0.03 * rng.uniform(-1.0, 1.0, size=samples))
    sigma = xi * (1.0 + 0.03 * rng.uniform(-1.0, 1.0, size=samples))
    return xi, eta, sigma


def commutator_scan(sym: SymbolSpec, triples: tuple) -> tuple:
    """Sampled sups for the two commutator bounds on the given region triples.

    Returns (BoundReport for |N| xi |xi-eta| / |sigma-eta|,
             BoundReport for |U| / (|xi-eta| |sigma-eta| eta^(alpha-1))).
    Triples with sigma = eta (or xi = eta for the U ratio) contribute
    nothing: both sides of those bounds vanish identically there.
    """
    xi, eta, sigma = (np.asarray(t, dtype=float) for t in triples)
    _validate_region(xi, eta, sigma)

    sep = sigma != eta
    ratio_n = np.zeros_like(xi)
    Nv = np.abs(commutator_N(sym, xi, eta, sigma))
    ratio_n[sep] = (Nv * xi * np.abs(xi - eta))[sep] / np.abs(sigma - eta)[sep]

    sep_u = sep & (xi != eta)
    ratio_u = np.zeros_like(xi)
    Uv = np.abs(commutator_U(sym, xi, eta, sigma))
    ratio_u[sep_u] = Uv[sep_u] / (
        np.abs(xi - eta) * np.abs(sigma - eta) * eta ** (sym.alpha - 1.0)
    )[sep_u]

    def report(model: str, ratio: np.ndarray) -> BoundReport:
        if not np.all(np.isfinite(ratio)):
            raise ValueError(f"non-finite {model} ratio encountered")
        idx = int(np.argmax(ratio))
        live = ratio[ratio > 0]
        c_min = float(np.min(live)) if live.size else 0.0
        return BoundReport(model, c_min, float(np.max(ratio)), int(ratio.size),
                           (float(xi[idx]), float(eta[idx]), float(sigma[idx])))

    return report("commutator_n_bound", ratio_n), report("commutator_u_bound", ratio_u)

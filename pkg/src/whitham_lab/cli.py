"""Command-line driver for symbol verification, simulation, and scans.

One JSON document configures everything; any leaf can be overridden on the
command line with a flag named after its path (--solver.dt 5e-4).  Each
experiment writes fixed-name CSV/JSON artifacts into output_dir, every CSV
with a .meta.json sidecar holding the resolved config.  Identical config
and seed give byte-identical outputs.

Exit codes: 0 success, 2 bad configuration, 3 numerical failure,
4 a pass/fail check failed.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields as dataclass_fields
from pathlib import Path

import numpy as np

from . import io
from .dispersion import (
    BoundGrid,
    SymbolSpec,
    commutator_scan,
    custom_symbol,
    m_ratio_table,
    make_builtin,
    phi_ratio_table,
    sample_commutator_region,
    verify_assumptions,
    verify_m_bound,
    verify_multiplier_identities,
    verify_phi_bound,
    verify_phi_symmetries,
)
from .energy import min_k, quartic_rhs, total_modified_energy
from .evolve import SolverConfig, evolve
from .expressions import ExpressionError, parse_expression
from .pseudoproduct import check_bilinear_identity, pairing_residual
from .spectral import Field, Grid, dealias, synthesize

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_CHECK = 4

EXPERIMENTS = (
    "verify-symbol",
    "identity-check",
    "simulate",
    "energy-scan",
    "quartic-scan",
    "lifespan-scan",
    "commutator-scan",
)

# heatmap tables are plotting fodder, not bound checks; a coarse grid keeps
# the CSV small while the BoundReport itself uses the dense default
_HEATMAP_GRID = BoundGrid(points_per_side=128)


class ConfigError(ValueError):
    """Configuration rejected before any computation starts."""


class CheckFailure(RuntimeError):
    """A pass/fail verification check failed; message names the check."""


class NumericalFailure(RuntimeError):
    """Computation produced non-finite or unusable numbers."""


# ---------------------------------------------------------------------------
# configuration

_DEFAULTS = {
    "symbol": {"name": "whitham"},
    "grid": {"n_points": 256, "scale": 1.0},
    "solver": {
        "dt": 1e-3,
        "t_end": 1.0,
        "checkpoint_every": 10,
        "dealias": True,
        "breakdown_gradient_factor": 10.0,
        "tail_fraction_limit": 1e-6,
    },
    "amplitudes": [0.1],
    "profile": "cos(x)",
    "n_max": 3,
    "seed": 0,
    "samples": None,
    "output_dir": "outputs",
}

_SYMBOL_PARAMS = {
    "whitham": (),
    "bessel": (),
    "capillary_whitham": ("beta",),
    "smooth_fkdv": ("alpha",),
    "fkdv": ("alpha",),
}


def symbol_from_dict(desc: dict) -> SymbolSpec:
    if not isinstance(desc, dict) or "name" not in desc:
        raise ConfigError("symbol must be an object with a 'name' key")
    name = desc["name"]
    if name == "custom":
        required = {"p", "alpha", "j_star"}
        missing = required - desc.keys()
        if missing:
            raise ConfigError(f"custom symbol needs keys {sorted(missing)}")
        allowed = required | {"name", "p_tilde_at_zero", "satisfies_a3"}
        extra = desc.keys() - allowed
        if extra:
            raise ConfigError(f"unknown custom symbol keys {sorted(extra)}")
        try:
            return custom_symbol(
                desc["p"],
                alpha=float(desc["alpha"]),
                j_star=int(desc["j_star"]),
                p_tilde_at_zero=desc.get("p_tilde_at_zero"),
                satisfies_a3=bool(desc.get("satisfies_a3", True)),
            )
        except (ExpressionError, ValueError) as err:
            raise ConfigError(f"bad custom symbol: {err}") from None
    if name not in _SYMBOL_PARAMS:
        raise ConfigError(
            f"unknown symbol {name!r}; builtins: {sorted(_SYMBOL_PARAMS)} or 'custom'"
        )
    param_keys = _SYMBOL_PARAMS[name]
    extra = desc.keys() - {"name", *param_keys}
    if extra:
        raise ConfigError(f"symbol {name} does not take keys {sorted(extra)}")
    missing = set(param_keys) - desc.keys()
    if missing:
        raise ConfigError(f"symbol {name} needs keys {sorted(missing)}")
    try:
        return make_builtin(name, *[desc[k] for k in param_keys])
    except ValueError as err:
        raise ConfigError(str(err)) from None


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment description plus the objects built from it."""

    experiment: str
    sym: SymbolSpec
    grid: Grid
    solver: SolverConfig
    amplitudes: tuple
    profile: str
    n_max: int
    seed: int
    samples: int | None
    output_dir: Path
    resolved: dict


def _merge(base: dict, override: dict) -> dict:
    out = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = value
    return out


def _set_path(tree: dict, dotted: str, value) -> None:
    parts = dotted.split(".")
    node = tree
    for part in parts[:-1]:
        if not isinstance(node.get(part), dict):
            node[part] = {}
        node = node[part]
    node[parts[-1]] = value


def _parse_override(raw: str):
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw


def load_config_tree(config_path: str | None, overrides: list) -> dict:
    tree = json.loads(json.dumps(_DEFAULTS))
    if config_path is not None:
        try:
            loaded = json.loads(Path(config_path).read_text())
        except OSError as err:
            raise ConfigError(f"cannot read config file: {err}") from None
        except json.JSONDecodeError as err:
            raise ConfigError(f"config file is not valid JSON: {err}") from None
        if not isinstance(loaded, dict):
            raise ConfigError("config file must hold a JSON object")
        tree = _merge(tree, loaded)
    for dotted, raw in overrides:
        _set_path(tree, dotted, _parse_override(raw))
    return tree


def build_config(experiment: str, tree: dict) -> ExperimentConfig:
    if experiment not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {experiment!r}; choose from {EXPERIMENTS}")
    tree = dict(tree)
    tree.pop("experiment", None)
    unknown = tree.keys() - _DEFAULTS.keys()
    if unknown:
        raise ConfigError(f"unknown config keys {sorted(unknown)}")

    sym = symbol_from_dict(tree["symbol"])

    grid_desc = tree["grid"]
    if not isinstance(grid_desc, dict):
        raise ConfigError("grid must be an object with n_points and scale")
    extra = grid_desc.keys() - {"n_points", "scale"}
    if extra:
        raise ConfigError(f"unknown grid keys {sorted(extra)}")
    missing = {"n_points", "scale"} - grid_desc.keys()
    if missing:
        raise ConfigError(f"grid needs keys {sorted(missing)}")
    try:
        grid = Grid(int(grid_desc["n_points"]), float(grid_desc["scale"]))
    except (TypeError, ValueError) as err:
        raise ConfigError(str(err)) from None

    solver_desc = tree["solver"]
    if not isinstance(solver_desc, dict):
        raise ConfigError("solver must be an object")
    allowed = {f.name for f in dataclass_fields(SolverConfig)}
    extra = solver_desc.keys() - allowed
    if extra:
        raise ConfigError(f"unknown solver keys {sorted(extra)}")
    try:
        solver = SolverConfig(**solver_desc)
    except (TypeError, ValueError) as err:
        raise ConfigError(f"bad solver config: {err}") from None

    try:
        amplitudes = tuple(float(a) for a in tree["amplitudes"])
    except (TypeError, ValueError):
        raise ConfigError(f"amplitudes must be a list of numbers, got {tree['amplitudes']!r}") from None
    if not amplitudes:
        raise ConfigError("amplitudes must be non-empty")
    if any(a <= 0 for a in amplitudes):
        raise ConfigError("amplitudes must be strictly positive")
    if any(b >= a for a, b in zip(amplitudes, amplitudes[1:])):
        raise ConfigError("amplitudes must be strictly decreasing")

    profile = tree["profile"]
    if not isinstance(profile, str):
        raise ConfigError(f"profile must be an expression string, got {profile!r}")
    try:
        parse_expression(profile, var="x")
    except ExpressionError as err:
        raise ConfigError(f"bad profile expression: {err}") from None

    try:
        n_max = int(tree["n_max"])
        seed = int(tree["seed"])
        samples = tree["samples"]
        if samples is not None:
            samples = int(samples)
    except (TypeError, ValueError) as err:
        raise ConfigError(f"n_max, seed, and samples must be integers: {err}") from None
    lo = max(3, min_k(sym))
    if n_max < lo:
        raise ConfigError(f"n_max must be >= max(3, 2 j_star - 1) = {lo}, got {n_max}")
    if seed < 0:
        raise ConfigError("seed must be non-negative")
    if samples is not None and samples < 1:
        raise ConfigError("samples must be >= 1")

    resolved = json.loads(json.dumps(tree))
    resolved["experiment"] = experiment
    return ExperimentConfig(
        experiment=experiment,
        sym=sym,
        grid=grid,
        solver=solver,
        amplitudes=amplitudes,
        profile=profile,
        n_max=n_max,
        seed=seed,
        samples=samples,
        output_dir=Path(tree["output_dir"]),
        resolved=resolved,
    )


# ---------------------------------------------------------------------------
# shared pieces


def _require_finite(label: str, *values: float) -> None:
    if not all(math.isfinite(v) for v in values):
        raise NumericalFailure(f"{label} produced non-finite values")


def _initial_field(cfg: ExperimentConfig, eps: float) -> Field:
    values = eps * parse_expression(cfg.profile, var="x")(cfg.grid.x)
    u = synthesize(cfg.grid, np.broadcast_to(values, cfg.grid.x.shape))
    return dealias(u) if cfg.solver.dealias else u


def _random_band_field(cfg: ExperimentConfig, rng: np.random.Generator) -> Field:
    """Random band-limited field with smoothly decaying spectrum."""
    n = cfg.grid.n_points
    band = cfg.grid.dealias_band
    c = np.zeros(n, dtype=complex)
    k = cfg.grid.k_index
    active = (np.abs(k) >= 1) & (np.abs(k) <= band)
    re, im = rng.standard_normal(n), rng.standard_normal(n)
    c[active] = (re[active] + 1j * im[active]) / (1.0 + np.abs(k[active])) ** 2
    c *= cfg.amplitudes[0]
    return Field.from_coeffs(cfg.grid, c, tol=np.inf)


def _fit_loglog(x: np.ndarray, y: np.ndarray, label: str) -> tuple:
    if np.any(y <= 0):
        raise NumericalFailure(f"{label}: non-positive values cannot be fit on log axes")
    slope, intercept = np.polyfit(np.log(x), np.log(y), 1)
    _require_finite(label, slope, intercept)
    return float(slope), float(intercept)


def _scan(cfg: ExperimentConfig, worker) -> list:
    # rows come back ordered by amplitude no matter which worker finishes first
    with ThreadPoolExecutor(max_workers=min(4, len(cfg.amplitudes))) as pool:
        return list(pool.map(worker, cfg.amplitudes))


def _write_csv(cfg: ExperimentConfig, name: str, header, rows) -> Path:
    path = io.write_table(cfg.output_dir / name, header, rows)
    io.write_sidecar(path, cfg.resolved)
    return path


# ---------------------------------------------------------------------------
# experiments


def _run_verify_symbol(cfg: ExperimentConfig) -> None:
    sym = cfg.sym
    assumption_samples = cfg.samples if cfg.samples is not None else 2000
    identity_samples = cfg.samples if cfg.samples is not None else 10_000
    assumptions = verify_assumptions(sym, samples=assumption_samples, seed=cfg.seed)
    phi_sym = verify_phi_symmetries(sym, identity_samples, cfg.seed)
    multipliers = verify_multiplier_identities(sym, identity_samples, cfg.seed)

    report = {
        "symbol": sym.name,
        "satisfies_a3": sym.satisfies_a3,
        "assumptions": io.assumption_report_dict(assumptions),
        "phi_symmetries": io.symmetry_report_dict(phi_sym),
        "multiplier_identities": io.symmetry_report_dict(multipliers),
        "passed": assumptions.passed and phi_sym.passed and multipliers.passed,
    }
    io.write_json(cfg.output_dir / "report.json", report)

    if sym.satisfies_a3:
        bounds = [verify_phi_bound(sym), verify_m_bound(sym)]
        path = io.write_bound_reports_csv(cfg.output_dir / "bounds.csv", bounds)
        io.write_sidecar(path, cfg.resolved)
        for name, table in (
            ("phi_ratio.csv", phi_ratio_table(sym, _HEATMAP_GRID)),
            ("m_ratio.csv", m_ratio_table(sym, _HEATMAP_GRID)),
        ):
            path = io.write_ratio_table_csv(cfg.output_dir / name, *table)
            io.write_sidecar(path, cfg.resolved)
    else:
        logger.info("%s does not claim the local expansion; bound scan skipped", sym.name)

    if not report["passed"]:
        failing = [
            name
            for name, rep in (
                ("assumptions", assumptions),
                ("phi_symmetries", phi_sym),
                ("multiplier_identities", multipliers),
            )
            if not rep.passed
        ]
        if not assumptions.passed:
            failed_checks = [n for n, c in assumptions.checks.items() if not c.passed]
            failing += [f"assumptions.{n}" for n in failed_checks]
        raise CheckFailure(f"verify-symbol failed: {', '.join(failing)}")


_IDENTITY_TOL = 1e-10


def _run_identity_check(cfg: ExperimentConfig) -> None:
    count = cfg.samples if cfg.samples is not None else 20
    rng = np.random.default_rng(cfg.seed)
    rows = []
    worst = ("", 0.0)
    for i in range(count):
        u = _random_band_field(cfg, rng)
        r_bil = check_bilinear_identity(cfg.sym, u)
        r_pair = pairing_residual(cfg.sym, u, cfg.n_max)
        _require_finite(f"identity-check sample {i}", r_bil, r_pair)
        rows.append([i, r_bil, r_pair])
        for name, r in (("bilinear", r_bil), ("pairing", r_pair)):
            if r > worst[1]:
                worst = (f"{name} residual at sample {i}", r)
    _write_csv(
        cfg, "residuals.csv", ["sample_index", "bilinear_residual", "cancellation_residual"], rows
    )
    if worst[1] > _IDENTITY_TOL:
        raise CheckFailure(
            f"identity-check failed: {worst[0]} = {worst[1]:.3e} > {_IDENTITY_TOL:.0e}"
        )


def _run_simulate(cfg: ExperimentConfig) -> None:
    u0 = _initial_field(cfg, cfg.amplitudes[0])
    traj = evolve(cfg.sym, u0, cfg.solver, cfg.n_max)
    path = io.write_trajectory_csv(cfg.output_dir / "trajectory.csv", traj)
    io.write_sidecar(path, cfg.resolved)
    io.write_breakdown_json(cfg.output_dir / "breakdown.json", traj)
    path = io.write_field_csv(cfg.output_dir / "final_field.csv", traj.final_state)
    io.write_sidecar(path, cfg.resolved)
    io.write_spectrum_json(cfg.output_dir / "final_spectrum.json", traj.final_state)
    if traj.breakdown is not None and traj.breakdown.reason == "nonfinite":
        raise NumericalFailure(
            f"state became non-finite at t = {traj.breakdown.time:.6g}; reduce dt"
        )


def _run_energy_scan(cfg: ExperimentConfig) -> None:
    def point(eps: float) -> list:
        u = _initial_field(cfg, eps)
        rep = total_modified_energy(cfg.sym, u, cfg.n_max)
        deviation = abs(rep.ratio - 1.0)
        _require_finite(f"energy-scan eps={eps}", deviation)
        if deviation == 0.0:
            raise NumericalFailure(
                f"energy-scan eps={eps}: |ratio - 1| is exactly zero because the "
                "cubic correction is orthogonal to the data; single-mode profiles "
                "do this, try e.g. --profile 'cos(x)+0.5*cos(2*x)'"
            )
        return [eps, deviation]

    rows = _scan(cfg, point)
    eps = np.array([r[0] for r in rows])
    dev = np.array([r[1] for r in rows])
    slope, intercept = _fit_loglog(eps, dev, "energy-scan fit")
    _write_csv(
        cfg,
        "energy_scan.csv",
        ["eps", "deviation", "fitted_slope", "fitted_intercept"],
        [r + [slope, intercept] for r in rows],
    )


def _run_quartic_scan(cfg: ExperimentConfig) -> None:
    k = cfg.n_max

    def point(eps: float) -> list:
        u0 = _initial_field(cfg, eps)
        traj = evolve(cfg.sym, u0, cfg.solver, cfg.n_max)
        if len(traj.checkpoints) < 3:
            raise NumericalFailure(
                f"quartic-scan eps={eps}: need >= 3 checkpoints for the "
                f"finite-difference cross-check, got {len(traj.checkpoints)}"
            )
        cps = traj.checkpoints
        rhs = np.array([quartic_rhs(cfg.sym, cp.state, k) for cp in cps])
        energy = np.array([cp.energy.modified[k] for cp in cps])
        times = traj.times
        fd = (energy[2:] - energy[:-2]) / (times[2:] - times[:-2])
        rhs_max = float(np.max(np.abs(rhs[1:-1])))
        fd_max = float(np.max(np.abs(fd)))
        scale = max(rhs_max, np.finfo(float).tiny)
        mismatch = float(np.max(np.abs(fd - rhs[1:-1])) / scale)
        _require_finite(f"quartic-scan eps={eps}", rhs_max, fd_max, mismatch)
        return [eps, rhs_max, fd_max, mismatch]

    rows = _scan(cfg, point)
    eps = np.array([r[0] for r in rows])
    rhs_max = np.array([r[1] for r in rows])
    exponent, intercept = _fit_loglog(eps, rhs_max, "quartic-scan fit")
    _write_csv(
        cfg,
        "quartic_scan.csv",
        ["eps", "rhs_max", "fd_max", "rel_mismatch", "fitted_exponent", "fitted_intercept"],
        [r + [exponent, intercept] for r in rows],
    )


def _run_lifespan_scan(cfg: ExperimentConfig) -> None:
    def point(eps: float) -> list:
        u0 = _initial_field(cfg, eps)
        traj = evolve(cfg.sym, u0, cfg.solver, cfg.n_max)
        if traj.breakdown is None:
            return [eps, cfg.solver.t_end, True, ""]
        if traj.breakdown.reason == "nonfinite":
            raise NumericalFailure(
                f"lifespan-scan eps={eps}: non-finite state at t = "
                f"{traj.breakdown.time:.6g}; reduce dt"
            )
        return [eps, traj.breakdown.time, False, traj.breakdown.reason]

    rows = _scan(cfg, point)
    kept = [(r[0], r[1]) for r in rows if not r[2]]
    if len(kept) >= 2:
        eps = np.array([p[0] for p in kept])
        t = np.array([p[1] for p in kept])
        exponent, intercept = _fit_loglog(eps, t, "lifespan-scan fit")
    else:
        # censored runs carry no breaking time; with fewer than two real
        # breakdowns there is nothing to fit and the columns stay empty
        exponent = intercept = None
    _write_csv(
        cfg,
        "lifespan_scan.csv",
        ["eps", "lifespan", "censored", "reason", "fitted_exponent", "fitted_intercept"],
        [r + [exponent, intercept] for r in rows],
    )


def _run_commutator_scan(cfg: ExperimentConfig) -> None:
    count = cfg.samples if cfg.samples is not None else 10_000
    triples = sample_commutator_region(count, seed=cfg.seed)
    reports = commutator_scan(cfg.sym, triples)
    path = io.write_commutator_reports_csv(cfg.output_dir / "commutator_scan.csv", reports)
    io.write_sidecar(path, cfg.resolved)
    _require_finite("commutator-scan", *[r.c_max for r in reports])


_RUNNERS = {
    "verify-symbol": _run_verify_symbol,
    "identity-check": _run_identity_check,
    "simulate": _run_simulate,
    "energy-scan": _run_energy_scan,
    "quartic-scan": _run_quartic_scan,
    "lifespan-scan": _run_lifespan_scan,
    "commutator-scan": _run_commutator_scan,
}


def run(cfg: ExperimentConfig) -> None:
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    _RUNNERS[cfg.experiment](cfg)


# ---------------------------------------------------------------------------
# entry point


def _collect_overrides(extras: list) -> list:
    pairs = []
    i = 0
    while i < len(extras):
        token = extras[i]
        if not token.startswith("--"):
            raise ConfigError(f"unexpected argument {token!r}")
        key = token[2:]
        if "=" in key:
            key, raw = key.split("=", 1)
            i += 1
        else:
            if i + 1 >= len(extras):
                raise ConfigError(f"flag --{key} needs a value")
            raw = extras[i + 1]
            i += 2
        if not key or not all(part.isidentifier() for part in key.split(".")):
            raise ConfigError(f"bad override flag --{key}")
        pairs.append((key, raw))
    return pairs


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="whitham-lab",
        description="Verification and simulation experiments for Whitham-type equations.",
    )
    parser.add_argument("experiment", choices=EXPERIMENTS)
    parser.add_argument("--config", help="JSON config file; defaults apply when omitted")
    parser.add_argument("-v", "--verbose", action="store_true")
    args, extras = parser.parse_known_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)

    try:
        overrides = _collect_overrides(extras)
        tree = load_config_tree(args.config, overrides)
        cfg = build_config(args.experiment, tree)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        run(cfg)
    except CheckFailure as err:
        print(f"check failed: {err}", file=sys.stderr)
        return EXIT_CHECK
    except NumericalFailure as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, FloatingPointError) as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

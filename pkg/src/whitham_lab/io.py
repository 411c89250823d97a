"""Serialization of fields, reports, and trajectories to CSV and JSON.

Every CSV gets a header row and floats printed with 17 significant digits
so values round-trip exactly.  JSON files carry round-trip repr floats.
Writers are deterministic: identical inputs give byte-identical files,
which downstream figure tooling relies on.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .dispersion import BoundReport, SymmetryReport, AssumptionReport
from .energy import EnergyReport
from .evolve import Trajectory
from .spectral import Field

ARTIFACT_VERSION = "0.1.0"


def format_float(x: float) -> str:
    return f"{float(x):.17g}"


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return format_float(value)
    return str(value)


def write_table(path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    """Write one CSV file; floats go through format_float, None becomes ''."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
    return path


def read_table(path) -> tuple:
    """Read a CSV written by write_table; returns (header, rows of strings)."""
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        return header, [row for row in reader]


def _jsonable(value):
    # failing checks legitimately carry inf/nan values; strict JSON cannot,
    # so they are recorded as strings instead of crashing the report
    if isinstance(value, float) and not math.isfinite(value):
        return repr(value)
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def write_json(path, payload) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_jsonable(payload), indent=2, allow_nan=False) + "\n")
    return path


def sidecar_path(artifact_path) -> Path:
    p = Path(artifact_path)
    return p.with_name(p.stem + ".meta.json")


def write_sidecar(artifact_path, resolved_config: Mapping) -> Path:
    """Companion JSON recording how an artifact was produced."""
    return write_json(
        sidecar_path(artifact_path),
        {"artifact_version": ARTIFACT_VERSION, "config": dict(resolved_config)},
    )


# ---------------------------------------------------------------------------
# fields


def write_field_csv(path, field: Field) -> Path:
    x = field.grid.x
    u = field.values()
    return write_table(path, ["x", "u"], zip(x.tolist(), u.tolist()))


def write_spectrum_json(path, field: Field) -> Path:
    """Spectrum dump: one (k, re, im) triple per retained mode."""
    modes = [
        [int(k), float(c.real), float(c.imag)]
        for k, c in zip(field.grid.k_index.tolist(), field.coeffs.tolist())
    ]
    payload = {
        "n_points": field.grid.n_points,
        "scale": field.grid.scale,
        "removed_mean": field.removed_mean,
        "modes": modes,
    }
    return write_json(path, payload)


# ---------------------------------------------------------------------------
# reports

BOUND_HEADER = ["model_name", "c_min", "c_max", "sample_count", "worst_a", "worst_b"]
COMMUTATOR_HEADER = [
    "model_name", "c_min", "c_max", "sample_count", "worst_xi", "worst_eta", "worst_sigma",
]


def write_bound_reports_csv(path, reports: Sequence[BoundReport]) -> Path:
    rows = [
        [r.model_name, r.c_min, r.c_max, r.sample_count, r.worst_point[0], r.worst_point[1]]
        for r in reports
    ]
    return write_table(path, BOUND_HEADER, rows)


def write_commutator_reports_csv(path, reports: Sequence[BoundReport]) -> Path:
    rows = [[r.model_name, r.c_min, r.c_max, r.sample_count, *r.worst_point] for r in reports]
    return write_table(path, COMMUTATOR_HEADER, rows)


def write_ratio_table_csv(path, a, b, ratio) -> Path:
    return write_table(path, ["a", "b", "ratio"], zip(a.tolist(), b.tolist(), ratio.tolist()))


def symmetry_report_dict(rep: SymmetryReport) -> dict:
    return {
        "passed": rep.passed,
        "max_residual": rep.max_residual,
        "sample_count": rep.sample_count,
        "seed": rep.seed,
    }


def assumption_report_dict(rep: AssumptionReport) -> dict:
    return {
        "symbol": rep.symbol,
        "passed": rep.passed,
        "checks": {
            name: {"passed": c.passed, "value": c.value, "detail": c.detail}
            for name, c in rep.checks.items()
        },
    }


# ---------------------------------------------------------------------------
# energies and trajectories


def _energy_columns(report: EnergyReport) -> list:
    return sorted(report.modified)


def energy_header(report: EnergyReport) -> list:
    return (
        ["t"]
        + [f"E_{k}" for k in _energy_columns(report)]
        + ["total_modified", "h_n_sq", "ratio"]
    )


def energy_row(report: EnergyReport) -> list:
    return (
        [report.time]
        + [report.modified[k] for k in _energy_columns(report)]
        + [report.total_modified, report.h_n_sq, report.ratio]
    )


def write_energy_csv(path, reports: Sequence[EnergyReport]) -> Path:
    return write_table(path, energy_header(reports[0]), [energy_row(r) for r in reports])


def write_trajectory_csv(path, traj: Trajectory) -> Path:
    first = traj.checkpoints[0].energy
    header = (
        ["t", "sup_grad", "l2", "tail_fraction"]
        + [f"E_{k}" for k in _energy_columns(first)]
        + ["total_modified", "h_n_sq", "ratio"]
    )
    rows = []
    for cp in traj.checkpoints:
        rows.append(
            [cp.time, cp.sup_gradient, cp.l2_norm, cp.tail_fraction]
            + energy_row(cp.energy)[1:]
        )
    return write_table(path, header, rows)


def write_breakdown_json(path, traj: Trajectory) -> Path:
    if traj.breakdown is None:
        payload = {"time": None, "reason": None}
    else:
        payload = {"time": traj.breakdown.time, "reason": traj.breakdown.reason}
    return write_json(path, payload)

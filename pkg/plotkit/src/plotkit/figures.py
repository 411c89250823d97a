"""Figure renderers for whitham-lab CSV artifacts.

Every renderer draws numbers verbatim from the input file: scatter points
are CSV columns, fit lines come from the pre-fitted slope/intercept cells,
and nothing is refit or rescaled here.  Rendering is deterministic: fixed
fonts, fixed hash salt, no timestamps in the output.
"""

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

KINDS = (
    "symbol-bound-heatmap",
    "energy-ratio-loglog",
    "quartic-scaling-loglog",
    "lifespan-loglog",
    "trajectory-panel",
)

# schema contract per kind; the trajectory header varies with the number of
# energy columns and is matched structurally
_EXACT_HEADERS = {
    "symbol-bound-heatmap": ["a", "b", "ratio"],
    "energy-ratio-loglog": ["eps", "deviation", "fitted_slope", "fitted_intercept"],
    "quartic-scaling-loglog": [
        "eps", "rhs_max", "fd_max", "rel_mismatch", "fitted_exponent", "fitted_intercept",
    ],
    "lifespan-loglog": [
        "eps", "lifespan", "censored", "reason", "fitted_exponent", "fitted_intercept",
    ],
}
_TRAJECTORY_PREFIX = ["t", "sup_grad", "l2", "tail_fraction"]
_TRAJECTORY_SUFFIX = ["total_modified", "h_n_sq", "ratio"]

# all deterministic-output knobs in one place; applied around every render
_RC = {
    "svg.hashsalt": "plotkit",
    "svg.fonttype": "none",
    "font.family": "DejaVu Sans",
    "figure.dpi": 100,
    "savefig.dpi": 100,
    "axes.unicode_minus": False,
}


class PlotError(ValueError):
    """Input file missing, schema mismatch, or unusable cells."""


@dataclass(frozen=True)
class FigureSpec:
    input_csv: Path
    kind: str
    output: Path
    title: str = ""
    xlabel: str = ""
    ylabel: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise PlotError(f"unknown figure kind {self.kind!r}; expected one of {KINDS}")
        object.__setattr__(self, "input_csv", Path(self.input_csv))
        object.__setattr__(self, "output", Path(self.output))
        if self.output.suffix.lower() not in (".svg", ".png"):
            raise PlotError(f"output must end in .svg or .png, got {self.output.name!r}")

    @classmethod
    def from_dict(cls, data: dict) -> "FigureSpec":
        if not isinstance(data, dict):
            raise PlotError("figure spec must be a JSON object")
        extra = data.keys() - {"input_csv", "kind", "output", "title", "xlabel", "ylabel"}
        if extra:
            raise PlotError(f"unknown figure spec keys {sorted(extra)}")
        missing = {"input_csv", "kind", "output"} - data.keys()
        if missing:
            raise PlotError(f"figure spec needs keys {sorted(missing)}")
        return cls(**data)


def read_csv(path) -> tuple:
    path = Path(path)
    if not path.is_file():
        raise PlotError(f"input file {path} does not exist")
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise PlotError(f"{path} is empty") from None
        rows = [row for row in reader]
    return header, rows


def header_kind(header) -> str | None:
    """The figure kind a CSV header belongs to, or None if unrecognized."""
    for kind, expected in _EXACT_HEADERS.items():
        if header == expected:
            return kind
    n = len(_TRAJECTORY_PREFIX) + len(_TRAJECTORY_SUFFIX)
    if (
        len(header) > n
        and header[: len(_TRAJECTORY_PREFIX)] == _TRAJECTORY_PREFIX
        and header[-len(_TRAJECTORY_SUFFIX):] == _TRAJECTORY_SUFFIX
        and all(c.startswith("E_") for c in header[len(_TRAJECTORY_PREFIX): -len(_TRAJECTORY_SUFFIX)])
    ):
        return "trajectory-panel"
    return None


def _check_schema(spec: FigureSpec, header, rows) -> None:
    kind = header_kind(header)
    if kind != spec.kind:
        raise PlotError(
            f"{spec.input_csv} header {header[:6]} does not match kind {spec.kind!r}"
            + (f" (it looks like {kind!r})" if kind else "")
        )
    if not rows:
        raise PlotError(f"{spec.input_csv} has no data rows")


def _floats(rows, header, name) -> list:
    idx = header.index(name)
    return [float(r[idx]) for r in rows]


def _fit_cells(rows, header, slope_col, path, required) -> tuple:
    """(slope, intercept) from the shared fit columns, or None if absent."""
    svals = {r[header.index(slope_col)] for r in rows}
    ivals = {r[header.index("fitted_intercept")] for r in rows}
    if svals == {""} and ivals == {""}:
        if required:
            raise PlotError(f"{path}: fit columns are empty; nothing to draw the line from")
        return None
    if len(svals) != 1 or len(ivals) != 1:
        raise PlotError(f"{path}: fit columns must hold one shared value per file")
    return float(svals.pop()), float(ivals.pop())


def _fit_line_points(x_lo: float, x_hi: float, slope: float, intercept: float) -> tuple:
    """Endpoints of y = exp(intercept) * x**slope, the upstream fit
    convention (natural-log least squares)."""
    ys = tuple(math.exp(intercept) * x**slope for x in (x_lo, x_hi))
    return (x_lo, x_hi), ys


def _draw_fit_line(ax, xs, slope, intercept, label):
    lx, ly = _fit_line_points(min(xs), max(xs), slope, intercept)
    (line,) = ax.plot(lx, ly, color="tab:red", linewidth=1.2, label=label)
    line.set_gid("fit-line")


def _scatter_loglog(ax, xs, ys, label, marker="o", filled=True):
    ax.plot(
        xs,
        ys,
        linestyle="none",
        marker=marker,
        markersize=5,
        markerfacecolor="tab:blue" if filled else "none",
        markeredgecolor="tab:blue",
        label=label,
    )
    ax.set_xscale("log")
    ax.set_yscale("log")


def _render_energy(spec, header, rows, ax):
    eps = _floats(rows, header, "eps")
    dev = _floats(rows, header, "deviation")
    _scatter_loglog(ax, eps, dev, "measured |ratio - 1|")
    slope, intercept = _fit_cells(rows, header, "fitted_slope", spec.input_csv, required=True)
    _draw_fit_line(ax, eps, slope, intercept, f"fitted slope {slope:.3g}")
    ax.set_xlabel(spec.xlabel or "eps")
    ax.set_ylabel(spec.ylabel or "|ratio - 1|")
    ax.legend()


def _render_quartic(spec, header, rows, ax):
    eps = _floats(rows, header, "eps")
    rhs = _floats(rows, header, "rhs_max")
    fd = _floats(rows, header, "fd_max")
    _scatter_loglog(ax, eps, rhs, "sup |quartic rhs|")
    _scatter_loglog(ax, eps, fd, "sup |FD dE/dt|", marker="s", filled=False)
    exponent, intercept = _fit_cells(
        rows, header, "fitted_exponent", spec.input_csv, required=True
    )
    _draw_fit_line(ax, eps, exponent, intercept, f"fitted exponent {exponent:.3g}")
    ax.set_xlabel(spec.xlabel or "eps")
    ax.set_ylabel(spec.ylabel or "sup |dE/dt|")
    ax.legend()


def _render_lifespan(spec, header, rows, ax):
    eps = _floats(rows, header, "eps")
    t = _floats(rows, header, "lifespan")
    cen_idx = header.index("censored")
    censored = [r[cen_idx] == "1" for r in rows]
    broke = [(e, v) for e, v, c in zip(eps, t, censored) if not c]
    capped = [(e, v) for e, v, c in zip(eps, t, censored) if c]
    if broke:
        _scatter_loglog(ax, [p[0] for p in broke], [p[1] for p in broke], "breakdown")
    if capped:
        xs = [p[0] for p in capped]
        ys = [p[1] for p in capped]
        ax.plot(xs, ys, linestyle="none", marker="^", markersize=6,
                markerfacecolor="none", markeredgecolor="tab:gray",
                label="censored (reached t_end)")
        ax.set_xscale("log")
        ax.set_yscale("log")
    fit = _fit_cells(rows, header, "fitted_exponent", spec.input_csv, required=False)
    if fit is not None:
        _draw_fit_line(ax, eps, fit[0], fit[1], f"fitted exponent {fit[0]:.3g}")
    ax.set_xlabel(spec.xlabel or "eps")
    ax.set_ylabel(spec.ylabel or "breakdown time")
    ax.legend()


def _render_heatmap(spec, header, rows, fig, ax):
    a = _floats(rows, header, "a")
    b = _floats(rows, header, "b")
    ratio = _floats(rows, header, "ratio")
    linthresh = min(abs(v) for v in a + b if v != 0.0)
    # tens of thousands of points; rasterize the cloud so SVGs stay small
    # while axes and labels remain vector
    sc = ax.scatter(a, b, c=ratio, s=4, cmap="viridis", linewidths=0, rasterized=True)
    ax.set_xscale("symlog", linthresh=linthresh)
    ax.set_yscale("symlog", linthresh=linthresh)
    fig.colorbar(sc, ax=ax, label="ratio")
    ax.set_xlabel(spec.xlabel or "a")
    ax.set_ylabel(spec.ylabel or "b")


def _render_trajectory(spec, header, rows, fig):
    t = _floats(rows, header, "t")
    channels = [
        ("sup_grad", "sup |du/dx|"),
        ("l2", "L2 norm"),
        ("ratio", "energy ratio"),
    ]
    axes = fig.subplots(3, 1, sharex=True)
    marker = "o" if len(rows) == 1 else None
    for ax, (col, label) in zip(axes, channels):
        ax.plot(t, _floats(rows, header, col), marker=marker, color="tab:blue")
        ax.set_ylabel(label)
    axes[-1].set_xlabel(spec.xlabel or "t")


def render(spec: FigureSpec) -> Path:
    """Render one figure from a CSV artifact; returns the output path."""
    header, rows = read_csv(spec.input_csv)
    _check_schema(spec, header, rows)
    with matplotlib.rc_context(_RC):
        if spec.kind == "trajectory-panel":
            fig = plt.figure(figsize=(6.4, 6.4))
            _render_trajectory(spec, header, rows, fig)
        else:
            fig = plt.figure(figsize=(6.4, 4.8))
            ax = fig.add_subplot()
            if spec.kind == "symbol-bound-heatmap":
                _render_heatmap(spec, header, rows, fig, ax)
            elif spec.kind == "energy-ratio-loglog":
                _render_energy(spec, header, rows, ax)
            elif spec.kind == "quartic-scaling-loglog":
                _render_quartic(spec, header, rows, ax)
            else:
                _render_lifespan(spec, header, rows, ax)
        if spec.title:
            fig.suptitle(spec.title)
        spec.output.parent.mkdir(parents=True, exist_ok=True)
        try:
            if spec.output.suffix.lower() == ".svg":
                fig.savefig(spec.output, format="svg", metadata={"Date": None})
            else:
                fig.savefig(spec.output, format="png")
        finally:
            plt.close(fig)
    return spec.output


def render_all(directory) -> list:
    """Render every recognized CSV under directory (recursively) to an SVG
    next to it; returns (csv_path, kind, output_path) triples in sorted
    order.  Unrecognized CSVs are skipped."""
    directory = Path(directory)
    if not directory.is_dir():
        raise PlotError(f"{directory} is not a directory")
    done = []
    for path in sorted(directory.rglob("*.csv")):
        header, rows = read_csv(path)
        kind = header_kind(header)
        if kind is None or not rows:
            continue
        out = render(FigureSpec(input_csv=path, kind=kind, output=path.with_suffix(".svg")))
        done.append((path, kind, out))
    return done

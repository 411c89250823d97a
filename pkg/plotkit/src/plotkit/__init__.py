from .figures import KINDS, FigureSpec, PlotError, header_kind, read_csv, render, render_all

__all__ = [
    "KINDS",
    "FigureSpec",
    "PlotError",
    "header_kind",
    "read_csv",
    "render",
    "render_all",
]

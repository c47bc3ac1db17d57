"""Figure renderers for beliefnet campaign CSVs."""

__version__ = "0.1.0"

from .render import (
    FigureSpec,
    SchemaError,
    read_table,
    render,
    render_fig2,
    render_fig4_cross,
    render_fig4_phase,
)

__all__ = [
    "FigureSpec",
    "SchemaError",
    "read_table",
    "render",
    "render_fig2",
    "render_fig4_cross",
    "render_fig4_phase",
]

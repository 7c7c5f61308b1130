"""Figure rendering for the Cafe Wall tilt experiment CSV outputs."""

__version__ = "0.1.0"

from cafewall_figures.render import (
    FigureSpec,
    render_boxplot,
    render_distribution,
    render_errorbar,
    render,
)

__all__ = ["FigureSpec", "render_boxplot", "render_distribution",
           "render_errorbar", "render"]

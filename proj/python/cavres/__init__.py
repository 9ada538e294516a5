"""Billiard cavity resistance toolkit."""

from ._core import (
    Cavity,
    InvalidShapeError,
    ParseError,
    TraceError,
    __version__,
    body_resistance,
    census,
    constants,
    deviation_grid,
    double_parabola,
    flat,
    integrand_grid,
    optimize_quadratic,
    perimeter_ratio,
    polyline_cavity,
    quadratic_cavity,
    rect_notch,
    resistance,
    resistance_mc,
    shape,
    trace,
    triangle_notch,
)

__all__ = [
    "Cavity",
    "InvalidShapeError",
    "ParseError",
    "TraceError",
    "__version__",
    "body_resistance",
    "census",
    "constants",
    "deviation_grid",
    "double_parabola",
    "flat",
    "integrand_grid",
    "optimize_quadratic",
    "perimeter_ratio",
    "polyline_cavity",
    "quadratic_cavity",
    "rect_notch",
    "resistance",
    "resistance_mc",
    "shape",
    "trace",
    "triangle_notch",
]

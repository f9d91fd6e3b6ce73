"""Companion plotting package for the relay simulator's CSV sweeps."""

__version__ = "0.1.0"

from .render import (
    EXPECTED_HEADER,
    CurvePoint,
    EmptyInput,
    PlotSpec,
    SchemaError,
    fit_slope_per_3db,
    load_curves,
    render,
)

__all__ = [
    "EXPECTED_HEADER",
    "CurvePoint",
    "EmptyInput",
    "PlotSpec",
    "SchemaError",
    "fit_slope_per_3db",
    "load_curves",
    "render",
]

"""Inverse curvature flow in the 2-D space forms of curvature -1, 0 and +1."""

import json

from ._icflow import (
    RadialCurve,
    SpaceForm,
    area,
    corollary_margin,
    curvature,
    fourier_curve,
    from_csv,
    gp_certificate,
    hk_gap,
    length,
    minkowski_residual,
    nonconvex_margin,
    random_curve,
    rhs,
    weighted_margin,
)
from ._icflow import report_json as _report_json
from ._icflow import run_command as _run_command
from ._icflow import run_flow_json as _run_flow_json

__all__ = [
    "RadialCurve",
    "SpaceForm",
    "area",
    "corollary_margin",
    "curvature",
    "fourier_curve",
    "from_csv",
    "gp_certificate",
    "hk_gap",
    "length",
    "minkowski_residual",
    "nonconvex_margin",
    "random_curve",
    "report",
    "rhs",
    "run_command",
    "run_flow",
    "weighted_margin",
]


def report(curve):
    """GeometryReport of a curve as a dict."""
    return json.loads(_report_json(curve))


def run_flow(curve, law="constrained", t_end=100.0, eps_stationary=1e-9):
    """Runs the flow and returns the JSON summary as a dict."""
    return json.loads(_run_flow_json(curve, law, t_end, eps_stationary))


def run_command(name, out, **settings):
    """Runs a CLI subcommand; returns (exit_code, log, errors)."""
    return _run_command(name, {k: str(v) for k, v in settings.items()}, str(out))

"""Diagonal homotopy cascade for intersecting two irreducible components."""

from .cascade import (
    Containment,
    Split,
    StageRecord,
    WitnessSuperset,
    classify,
    collapse,
    containment_precheck,
    endpoint_match_distance,
    level_slice,
    run_cascade,
    run_cascade_extrinsic,
)
from .extrinsic import ExtrinsicCascadeHomotopy, ExtrinsicStartHomotopy
from .intrinsic import CascadeHomotopy, StartHomotopy
from .planes import CascadePlane, cascade_plane, level_plane, start_plane, tau_of_t, transform
from .problem import DiagonalProblem, RandomData, Y_h, initialize, stacked_system

__all__ = [
    "Containment",
    "Split",
    "StageRecord",
    "WitnessSuperset",
    "classify",
    "collapse",
    "containment_precheck",
    "endpoint_match_distance",
    "level_slice",
    "run_cascade",
    "run_cascade_extrinsic",
    "ExtrinsicCascadeHomotopy",
    "ExtrinsicStartHomotopy",
    "CascadeHomotopy",
    "StartHomotopy",
    "CascadePlane",
    "cascade_plane",
    "level_plane",
    "start_plane",
    "tau_of_t",
    "transform",
    "DiagonalProblem",
    "RandomData",
    "Y_h",
    "initialize",
    "stacked_system",
]

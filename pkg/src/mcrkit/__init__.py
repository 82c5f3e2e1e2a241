"""Maximum cover under rotation.

Rotate a simple polygon (or a closed triangle mesh) about a centre so that it
contains as many of a given set of points as possible.  The centre may be
fixed, slide along a segment or chain (2D), or be fixed in 3D.
"""
from .config import Tolerances
from .fixed import (
    AngularIntervalSet,
    CoverageSolution,
    point_rotation_intervals,
    solve_fixed_baseline,
    solve_fixed_output_sensitive,
    sweep_max_coverage,
)
from .geometry import SimplePolygon, TriMeshPolyhedron
from .mcr3d import Solution3D, rotation_from_direction, solve_3d_fixed_mcr
from .oracle import count_at_rotation, oracle_3d, oracle_fixed, oracle_segment
from .reduction import reduce_scp_to_mcr, scp_brute_force
from .segment import SegmentSolution, solve_chain_mcr, solve_segment_mcr

__version__ = "0.1.0"

__all__ = [
    "AngularIntervalSet",
    "CoverageSolution",
    "SegmentSolution",
    "SimplePolygon",
    "Solution3D",
    "Tolerances",
    "TriMeshPolyhedron",
    "count_at_rotation",
    "oracle_3d",
    "oracle_fixed",
    "oracle_segment",
    "point_rotation_intervals",
    "reduce_scp_to_mcr",
    "rotation_from_direction",
    "scp_brute_force",
    "solve_3d_fixed_mcr",
    "solve_chain_mcr",
    "solve_fixed_baseline",
    "solve_fixed_output_sensitive",
    "solve_segment_mcr",
    "sweep_max_coverage",
]

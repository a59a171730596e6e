"""Exact wall-and-chamber computations for GIT quotients of pointed rational normal curves."""

from .lincore import (
    CapExceeded,
    GammaOneError,
    Linearization,
    OnWallError,
    is_generic,
    phi,
    sigma,
)
from .walls import Wall, enumerate_walls, same_chamber, segment_scan, signature
from .trees import DualTree, FCurvePartition, all_trees, edge_subsets, fcurve_sigma_sum, specializations
from .curves import CurveType, degree_assignment, is_git_stable, resolve, wall_stability, z_assignment, z_contract
from .assignments import ExtremalAssignment, check_extremal, git_assignment, realizability_search
from .wallcross import classify_crossing, classify_exterior, gluing_data, projection_bijective
from .models import boggi_params, chamber_point_in_region, hassett_embedding_degree, identify, model_key

__all__ = [name for name in dir() if not name.startswith("_")]

"""Geodesics of finite metric and metric measure spaces.

Gromov-Hausdorff distances and straight-line geodesics, discrete optimal
transport, the Gromov-Wasserstein distance through metric couplings, and
Hausdorff displacement interpolation on sampled geodesic spaces.
"""

__version__ = "0.1.0"

from .spaces import (
    FiniteMetricSpace,
    MetricMeasureSpace,
    PseudoMetricSpace,
    hausdorff_distance,
    thicken,
    validate_metric,
)
from .gh import Correspondence, certify_gh_geodesic, distortion, gh_exact, straight_line_gh_geodesic
from .transport import wasserstein_inf, wasserstein_p
from .gw import certify_gw_geodesic, gw_alternating_min, validate_metric_coupling
from .interpolation import lipschitz_reach, thickening_geodesic

__all__ = [
    "FiniteMetricSpace", "MetricMeasureSpace", "PseudoMetricSpace", "hausdorff_distance", "thicken",
    "validate_metric", "Correspondence", "certify_gh_geodesic", "distortion", "gh_exact",
    "straight_line_gh_geodesic", "wasserstein_inf", "wasserstein_p", "certify_gw_geodesic",
    "gw_alternating_min", "validate_metric_coupling", "lipschitz_reach", "thickening_geodesic",
]

"""Generalized Expected-Shortfall norms, their duals, polyhedral projection
and rolling-window anomaly detection."""

from gesnorm.distortion import (
    DistortionFunction,
    DistortionKind,
    dual_distortion,
    make_distortion,
    parse_distortion,
)
from gesnorm.dual import OwlWeights, ges_dual_norm, ges_owl_weights, owl_dual, owl_norm
from gesnorm.norms import (
    alpha_profile,
    nonscaled_ges_norm,
    scaled_ges_norm,
    scaled_ges_norm_oracle,
    unit_disk_boundary,
)

__version__ = "0.1.0"

__all__ = [
    "DistortionFunction",
    "DistortionKind",
    "OwlWeights",
    "alpha_profile",
    "dual_distortion",
    "ges_dual_norm",
    "ges_owl_weights",
    "make_distortion",
    "nonscaled_ges_norm",
    "owl_dual",
    "owl_norm",
    "parse_distortion",
    "scaled_ges_norm",
    "scaled_ges_norm_oracle",
    "unit_disk_boundary",
]

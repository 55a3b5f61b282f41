"""Anisotropic geometry toolkit: Minkowski norms, Wulff shapes, anisotropic
curvatures, asymptotic volume ratios and numerical checks of Willmore-type
inequalities for surfaces in R^3."""

from .minkowski import (
    MinkowskiNorm,
    capillary,
    capillary_vector,
    ellipsoidal,
    euclidean,
    omega_range,
    reversal,
    tilt,
)
from .regions import CircularCone, FullSpace, HalfSpace, PolyhedralCone, Wedge, avr
from .surfaces import perturbed_wulff, sphere_cap, wulff_patch
from .verifier import Scenario, VerificationReport, verify

__version__ = "0.1.0"

__all__ = [
    "MinkowskiNorm", "capillary", "capillary_vector", "ellipsoidal", "euclidean",
    "omega_range", "reversal", "tilt", "CircularCone", "FullSpace", "HalfSpace",
    "PolyhedralCone", "Wedge", "avr", "perturbed_wulff", "sphere_cap", "wulff_patch",
    "Scenario", "VerificationReport", "verify",
]

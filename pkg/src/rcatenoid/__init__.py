"""Rotational r-minimal hypersurfaces (r-catenoids) in hyperbolic space times a line.

The profile curve ``t -> f(t)`` of the catenoid with neck radius ``a`` is
computed two independent ways, by adaptive quadrature of the height
integral and by integrating the profile ODE, and the pieces built on it
cover the half-height ``L(a)``, the envelope of the family, two-sphere
boundary value counts, curvature diagnostics and file export.
"""

__version__ = "0.1.0"

from .errors import DomainError, IntegrationError, QuadratureError
from .family import FamilyParams, ProfilePoint, Regime, make_family
from .heights import (QuadratureSettings, half_height, half_height_derivative, height_limit,
                      lambda_a, lambda_aa, lambda_height)
from .profile import OdeSettings, cross_validate, integrate_profile
from .analysis import count_bvp_solutions, envelope_min, phi, profile_intersections
from .curvature import mean_curvatures, principal_curvatures, verify_hj_signs

__all__ = [
    "DomainError", "IntegrationError", "QuadratureError", "FamilyParams", "ProfilePoint", "Regime",
    "make_family", "QuadratureSettings", "half_height", "half_height_derivative", "height_limit",
    "lambda_a", "lambda_aa", "lambda_height", "OdeSettings", "cross_validate", "integrate_profile",
    "count_bvp_solutions", "envelope_min", "phi", "profile_intersections", "mean_curvatures",
    "principal_curvatures", "verify_hj_signs", "__version__",
]

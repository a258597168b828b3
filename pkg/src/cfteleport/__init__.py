"""Continuous-variable teleportation in the characteristic-function picture.

All covariances use the convention where the vacuum has ``<q^2> = <p^2> = 1/2``.
"""

__version__ = "0.1.0"

from .exceptions import *  # noqa: F401,F403
from .gaussian_core import (  # noqa: F401
    OneModeCovariance,
    StandardFormI,
    TwoModeCovariance,
    classicality_check,
    symplectic_eigenvalues,
    to_standard_form_I,
    validate_two_mode,
)
from .channel import (  # noqa: F401
    MeasurementGeometry,
    added_noise,
    gaussian_output,
    induced_covariance,
    resource_cf_factor,
    unbalanced_to_balanced,
)
from .optimizer import optimize, optimize_general, optimize_symmetric, separability  # noqa: F401
from .cf_engine import CFGrid, build_cf, fidelity_overlap, mean_photon, teleport_cf, wigner_transform  # noqa: F401
from .montecarlo import run_ensemble  # noqa: F401

"""Box-count statistics of hyperuniform point processes.

Simulation and analytics for the covariance structure of counts in large
shifted boxes: exact finite-size identities, the limiting covariance
kernels they converge to, seeded samplers for the constructive lattice
processes, and Monte Carlo estimators that check the limits at desk scale.
"""

__version__ = "0.1.0"

from .geometry import Shift, overlap_volume, shared_face_measure
from .beta_models import (
    BetaModel,
    TailFunction,
    ModelError,
    make_model,
    pyramidal_model,
    mixture_model,
    power_law_mixture_model,
    sine2_model,
    perturbation_tail_model,
    zero_model,
    user_model,
    tail_F,
    cumulative_G,
    hyperuniformity_check,
)
from .theory import (
    RV2DParams,
    TheoryError,
    cov_integrable,
    cov_rv_1d,
    cov_rv_2d,
    cov_finite_1d,
    cov_finite_2d,
    var_finite_1d,
    var_finite_2d,
    var_slope_integrable,
    fit_rv2d_params,
)

__all__ = [name for name in dir() if not name.startswith("_")]

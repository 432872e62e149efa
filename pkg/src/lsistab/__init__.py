"""Numerical checks for stability of the Gaussian logarithmic Sobolev inequality."""

from .errors import LsiError, NumericalError, ParameterError
from .fields import (constant, exp_tilt, gamma_mixture, gamma_tilt, gaussian_trial,
                     hermite_perturb, shift_tilt)
from .functionals import (check_al_sj, check_alw, check_moment_bound, deficit_c, deficit_gamma,
                          deficit_star)
from .measures import MeasureKind, build_rule, integrate
from .project import project_to_extremals, stability_ratio
from .reduce import reduce_to_normalized, verify_reduction_identities
from .scalar import ScalarField
from .sharpness import empirical_kappa, ratio_scan, trial_closed_forms
from .transport1d import blowup_scan, brenier_map_1d, transport_defect, wasserstein_1d

__version__ = "0.1.0"

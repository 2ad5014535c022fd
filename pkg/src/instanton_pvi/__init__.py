"""Reduced SU(2)-invariant instantons on S^4 and Painleve VI.

Modules: ``asd`` (the ODE system, closed forms, integrator front end),
``painleve`` (the map to Painleve VI and back), ``shooting`` (the singular
boundary-value problem at t = 1), ``critical`` (exponent fits and
verdicts), ``cli``.
"""
from ._backend import BACKENDS, active_backend, set_backend
from .asd import (Branch, InstantonState, ThetaData, Trajectory, asd_vector_field,
                  closed_form_solution, conserved_quantity, integrate_asd, metric_coefficients,
                  residue_weights)
from .critical import (CriticalFit, algebraicity_verdict, fit_exponent, limit_check,
                       rationality_test)
from .errors import *  # noqa: F401,F403
from .painleve import (PviParameters, PviSample, cross_ratio, map_point, map_to_pvi,
                       okamoto_transform, pvi_parameters, pvi_residual, squares_from_solution)
from .shooting import (HolonomyData, ShootingConfig, ShootingResult, holonomy_data, shoot,
                       solve_for_target)

__version__ = "0.1.0"

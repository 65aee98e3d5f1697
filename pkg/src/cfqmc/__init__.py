"""Quasi-Monte Carlo integration with control functionals.

Low-discrepancy point sets, star discrepancy and variation (the two factors
of the Koksma-Hlawka bound), surrogate-based control functionals, and a
harness comparing MC, QMC, RQMC and RQMC+CF convergence rates.
"""

from .bench import StudyConfig, convergence_study, emit_report, fit_rate, parse_config, serialize_config
from .control_functional import (
    GridSurrogate,
    KernelSurrogate,
    TransformedIntegrand,
    cf_transform,
    fit_grid_surrogate,
    fit_kernel_surrogate,
    residual_variation,
)
from .discrepancy import hk_variation_1d, kh_bound, star_discrepancy, star_discrepancy_1d, star_discrepancy_exact
from .estimate import Estimate, replicate_rmse_curve, run_estimator
from .functions import TestFunction, builtin
from .lds import PointSet, SequenceSpec, generate, radical_inverse, random_shift

__version__ = "0.1.0"

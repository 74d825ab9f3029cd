"""Numerical laboratory for interpolation spaces built from pseudolattices.

Finite-dimensional complex Banach couples, sequence norms (``l^p``, ``c0``,
FC, UC), the J-functional interpolation norms computed as infima over
finitely supported representations, the annulus complex method on Laurent
polynomials, and the coefficient operators used in the density argument.
"""

__version__ = "0.1.0"

from .couple import Couple, CustomGauge, WeightedLp, j_functional, k_functional, norm, sum_norm
from .errors import (CapacityError, ConfigError, InputError, InterpLabError,
                     NumericalInstabilityError, PreconditionError, SolverError)
from .jcalculus import (JSpaceSpec, PhiLattice, VariantNorm, equivalence_ratio, j_norm,
                        j_norm_variant_2, j_norm_variant_e, jphi_norm, representation_norm)
from .laurent import (AnnulusSpec, LaurentPoly, annulus_norm, boundary_norm, evaluate,
                      fc_equals_annulus, fejer_sum, fourier_coeff, laurent_compat_bound)
from .pseudolattice import PseudolatticeSpec, fc_norm, lp_norm, pl_norm, uc_norm
from .repsolver import (SolveReport, SolverConfig, WindowProblem, null_distance, stafney_sweep,
                        windowed_norm)
from .seqops import diff_op, divide_at_zero, multiply_by_linear, null_corrector, rk_bound_check, \
    shift, unshift
from .sequences import FinSeq

__all__ = [
    "AnnulusSpec", "CapacityError", "ConfigError", "Couple", "CustomGauge", "FinSeq",
    "InputError", "InterpLabError", "JSpaceSpec", "LaurentPoly", "NumericalInstabilityError",
    "PhiLattice", "PreconditionError", "PseudolatticeSpec", "SolveReport", "SolverConfig",
    "SolverError", "VariantNorm", "WeightedLp", "WindowProblem", "annulus_norm",
    "boundary_norm", "diff_op", "divide_at_zero", "equivalence_ratio", "evaluate",
    "fc_equals_annulus", "fc_norm", "fejer_sum", "fourier_coeff", "j_functional", "j_norm",
    "j_norm_variant_2", "j_norm_variant_e", "jphi_norm", "k_functional", "laurent_compat_bound",
    "lp_norm", "multiply_by_linear", "norm", "null_corrector", "null_distance", "pl_norm",
    "representation_norm", "rk_bound_check", "shift", "stafney_sweep", "sum_norm",
    "uc_norm", "unshift", "windowed_norm",
]

"""Interpolating local polynomial estimators with singular kernels."""
from .adaptive import AggregateEstimator, BetaGrid, build_beta_grid, fit_adaptive, strict_floor
from .errors import (DataPointCoincidence, DuplicateDesignPoints, IncompleteDerivatives,
                     InvalidData, InvalidExponent, InvalidMatrix, InvalidParameter, LpeError,
                     NoLowerBound, QuadratureDiverged, SampleTooSmall)
from .kernels import Kernel, check_square_integrable, kernel_names, make_builtin, singularity_bound
from .lpe import (Dataset, LpeModel, TruncatedLpe, design_matrix, predict, predict_truncated,
                  truncation_level, weight_matrix, weights)
from .numerics import RandomSource, jacobi_eigh, min_eigenvalue, pseudo_inverse, quad_1d
from .poly_basis import Basis, enumerate_basis, taylor_eval, u_vector

__version__ = "0.1.0"

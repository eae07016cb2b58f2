"""Exact and asymptotic tools for the largest row of a shifted Schur measure."""
from .ascent import Biword, L_word, L_word_brute, PLetter, PMatrix, lambda1, to_biword
from .asymptotics import ScalingConstants, constants, saddle_z0, tau1_closed_form
from .errors import (CutoffError, DimensionError, DomainError, NumericalFailure, ResourceError,
                     SizeGuardError, ValidationError)
from .gessel import (KMatrix, build_K, cdf_curve, cdf_exact, cdf_table, gessel_lhs, gessel_rhs, log_Z,
                     operator_residuals)
from .numkernel import Rational, XScalar, gauss_legendre, pfaffian, sign_logdet
from .partitions import StrictPartition, enumerate_strict, enumerate_strict_bounded, shifted_cells
from .sampler import MeasureParams, Seed, exact_distribution_small, poisson_L, sample_lambda1_batch, sample_matrix
from .schurq import (P_lambda, QCoeffTable, Q_lambda, Q_lambda_comb, Q_rs, Specialization,
                     count_standard_shifted, d_s, q_coeffs)
from .tracywidom import airy_ai, airy_ai_prime, airy_kernel, f2

__version__ = "0.1.0"

"""Top Lyapunov exponents of random products of positive 2x2 matrices.

High-precision approximants with fully effective error bounds, a diagonal
change of basis that tightens the bounds, and an independent Monte Carlo
cross-check.  See the README for the CLI and the job-file format.
"""

from .basis_optimizer import ScalingResult, optimal_scaling, scaling_ratio_bound
from .cli import (ApproximationReport, JobConfig, ReportRow, VerifySpec,
                  fixed_decimal, job_from_dict, load_job, main, run_job,
                  sci_decimal)
from .error_bounds import (BoundReport, alpha_minus, coefficient_bounds_report,
                           error_bound, series_term, tail_bound_series)
from .exceptions import (BadProbabilityVector, BudgetExceeded, ConfigError,
                         DegenerateDenominator, LyapboundError,
                         NonPositiveEntry, OracleTooLarge, PrecisionUnstable,
                         RatioNotContracting, SingularMatrix)
from .matrix_core import (DEFAULT_PRECISION, Ensemble, EnsembleConstants,
                          PositiveMatrix2, SpectralPair, compute_constants,
                          parse_real, product, spectral_pair, to_exact_rational,
                          validate_ensemble, working_context)
from .oracle import (McEstimate, SplitMix64, exact_single_matrix,
                     monte_carlo_lyapunov, trial_stream)
from .trace_series import (DEFAULT_WORD_CAP, DetCoefficients, TraceData,
                           composition_sum_oracle, compute_traces,
                           det_coefficients, lyapunov_estimate)

__version__ = "0.1.0"

__all__ = [
    "ApproximationReport", "BadProbabilityVector", "BoundReport",
    "BudgetExceeded", "ConfigError", "DEFAULT_PRECISION", "DEFAULT_WORD_CAP",
    "DegenerateDenominator", "DetCoefficients", "Ensemble",
    "EnsembleConstants", "JobConfig", "LyapboundError", "McEstimate",
    "NonPositiveEntry", "OracleTooLarge", "PositiveMatrix2",
    "PrecisionUnstable", "RatioNotContracting", "ReportRow", "ScalingResult",
    "SingularMatrix", "SpectralPair", "SplitMix64", "TraceData", "VerifySpec",
    "alpha_minus", "coefficient_bounds_report", "composition_sum_oracle",
    "compute_constants", "compute_traces", "det_coefficients", "error_bound",
    "exact_single_matrix", "fixed_decimal", "job_from_dict", "load_job",
    "lyapunov_estimate", "main", "monte_carlo_lyapunov", "optimal_scaling",
    "parse_real", "product", "run_job", "scaling_ratio_bound", "sci_decimal",
    "series_term", "spectral_pair", "tail_bound_series", "to_exact_rational",
    "trial_stream", "validate_ensemble", "working_context",
]

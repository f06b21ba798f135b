"""Bayesian exponentially tilted empirical likelihood with outlier indicators."""

__version__ = "0.1.0"

from .errors import ChainError, ConfigurationError, DegenerateScaleWarning, InputError
from .etel import SolverOptions, TiltingSolution, implied_weights, log_el_ratio, log_etel_active, solve_tilting
from .moments import Dataset, MomentModel, huber, location_g, parse_keys, raw_mad, regression_g, scaled_mad
from .posterior import PosteriorSummary, density_grid, inclusion_probs, summarize, summarize_chain
from .robust import mm_fit, ols_fit, robust_error_scale
from .sampler import ChainConfig, ChainOutput, Priors, log_posterior_kernel, run_chain
from .simlab import LocationDesign, RegressionDesign, coverage, gen_location_data, gen_regression_data, replicate

"""Continuous counterparts of the Poisson and binomial distributions."""

__version__ = "0.1.0"

from .convergence import ConvergenceExperiment, ConvergenceReport, interval_mass_limit_check, run_convergence
from .distributions import (
    ContBinomialParams,
    ContPoissonParams,
    cbinom_cdf,
    cbinom_pdf,
    cdf,
    classical_binomial_cdf,
    classical_poisson_cdf,
    cpois_cdf,
    cpois_pdf,
    interval_mass,
    pdf,
    quantile,
    sample,
)
from .errors import ConvergenceError, DomainError, ExperimentDesignError
from .gamma_process import (
    GammaProcessParams,
    HitTimeExperiment,
    KsReport,
    ks_compare,
    simulate_hit_times,
    transition_density,
)
from .moments import DoubleLaplacePoint, MomentRequest, double_laplace, moment, moment_laplace
from .quadrature import DEFAULT_QUADRATURE, QuadratureConfig, integrate
from .rng import RandomStream
from .special import (
    VolterraArgs,
    log_gamma,
    reg_beta_upper,
    reg_gamma_upper,
    volterra_mu,
    volterra_nu,
)

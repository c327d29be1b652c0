"""Nonstationary GEV model fitting with L-moments and robust regression."""

from ._backend import BACKEND
from .distributions import (GevParams, SupportViolationError, gev_cdf,
                            gev_mean_std, gev_quantile, gev_rand,
                            gumbel_back_transform, gumbel_transform)
from .fitters import (fit, fit_gn16, fit_mle, fit_prop, fit_prop_covariate,
                      fit_stationary, fit_wls)
from .inference import bootstrap_se, cv_gld, gld
from .lmoments import (LMomentCovariance, LMomentSet,
                       gev_lmoments_from_params, gumbel_population_lmoments,
                       lmoment_covariance, sample_lmoments,
                       stationary_lme_gev, stationary_lme_gumbel)
from .models import FitResult, ModelSpec, NsGevParams
from .returns import (chi_distance, conventional_rl, modified_rl_plot_data,
                      parey_rl, qq_plot_data)
from .series import AnnualSeries, ingest_csv
from .simulation import SimDesign, SimReport, run_simulation, true_rl_table

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "GevParams", "SupportViolationError", "gev_cdf",
    "gev_mean_std", "gev_quantile", "gev_rand", "gumbel_back_transform",
    "gumbel_transform", "fit", "fit_gn16", "fit_mle", "fit_prop",
    "fit_prop_covariate", "fit_stationary", "fit_wls", "bootstrap_se",
    "cv_gld", "gld", "LMomentCovariance", "LMomentSet",
    "gev_lmoments_from_params", "gumbel_population_lmoments",
    "lmoment_covariance", "sample_lmoments", "stationary_lme_gev",
    "stationary_lme_gumbel", "FitResult", "ModelSpec", "NsGevParams",
    "chi_distance", "conventional_rl", "modified_rl_plot_data", "parey_rl",
    "qq_plot_data", "AnnualSeries", "ingest_csv", "SimDesign", "SimReport",
    "run_simulation", "true_rl_table",
]

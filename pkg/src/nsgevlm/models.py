"""Model specifications and fitted-parameter containers shared by the
fitting, return-level, and inference modules."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .distributions import XI_EPS
from .series import AnnualSeries

_FAMILIES = {"gev10", "gev11", "gev20", "covariate", "stationary"}


@dataclass(frozen=True)
class ModelSpec:
    """Which regressors drive the location and log-scale parameters.

    The shape parameter is always constant. Time-trend families map to
    fixed term lists; 'covariate' allows arbitrary named covariates.
    """

    family: str
    location_terms: tuple[str, ...] = ()
    logscale_terms: tuple[str, ...] = ()

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        expected = {
            "gev10": (("t",), ()),
            "gev11": (("t",), ("t",)),
            "gev20": (("t", "t2"), ()),
            "stationary": ((), ()),
        }
        if self.family in expected:
            loc, ls = expected[self.family]
            object.__setattr__(self, "location_terms", loc)
            object.__setattr__(self, "logscale_terms", ls)

    @classmethod
    def gev10(cls) -> "ModelSpec":
        return cls("gev10")

    @classmethod
    def gev11(cls) -> "ModelSpec":
        return cls("gev11")

    @classmethod
    def gev20(cls) -> "ModelSpec":
        return cls("gev20")

    @classmethod
    def covariate(cls, location_terms, logscale_terms=()) -> "ModelSpec":
        return cls("covariate", tuple(location_terms), tuple(logscale_terms))

    @property
    def time_only(self) -> bool:
        return all(m in ("t", "t2")
                   for m in self.location_terms + self.logscale_terms)

    def location_matrix(self, series: AnnualSeries) -> np.ndarray:
        """Regressor columns (no intercept) for the location parameter."""
        return np.column_stack([series.term(m) for m in self.location_terms]) \
            if self.location_terms else np.empty((series.n, 0))

    def logscale_matrix(self, series: AnnualSeries) -> np.ndarray:
        return np.column_stack([series.term(m) for m in self.logscale_terms]) \
            if self.logscale_terms else np.empty((series.n, 0))

    def matrices_at_t(self, t) -> tuple[np.ndarray, np.ndarray]:
        """Design columns evaluated on a raw time grid (extrapolation for
        return levels); only valid for time-only specs."""
        if not self.time_only:
            raise ValueError("spec has non-time covariates; cannot "
                             "extrapolate over a time grid")
        t = np.asarray(t, dtype=float)
        cols = {"t": t, "t2": t**2}
        loc = np.column_stack([cols[m] for m in self.location_terms]) \
            if self.location_terms else np.empty((t.size, 0))
        ls = np.column_stack([cols[m] for m in self.logscale_terms]) \
            if self.logscale_terms else np.empty((t.size, 0))
        return loc, ls


@dataclass(frozen=True)
class NsGevParams:
    """Coefficients of a nonstationary GEV model.

    mu(t) = mu_coef . (1, x_loc) + mu_sigma_mult * sigma(t)
    sigma(t) = exp(logsigma_coef . (1, x_ls))

    ``mu_sigma_mult`` carries the exact (non-linearized) location term
    produced by the WLS and GN16 back-substitutions; it is 0 for every
    other method.
    """

    mu_coef: np.ndarray
    logsigma_coef: np.ndarray
    xi: float
    mu_sigma_mult: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "mu_coef",
                           np.atleast_1d(np.asarray(self.mu_coef, float)))
        object.__setattr__(self, "logsigma_coef",
                           np.atleast_1d(np.asarray(self.logsigma_coef, float)))

    def evaluate(self, loc_matrix: np.ndarray,
                 ls_matrix: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Per-observation (mu_t, sigma_t) from design columns (no intercept)."""
        n = loc_matrix.shape[0]
        sigma = np.exp(self.logsigma_coef[0]
                       + ls_matrix @ self.logsigma_coef[1:])
        sigma = np.broadcast_to(sigma, (n,)).astype(float)
        mu = (self.mu_coef[0] + loc_matrix @ self.mu_coef[1:]
              + self.mu_sigma_mult * sigma)
        mu = np.broadcast_to(mu, (n,)).astype(float)
        return mu, sigma

    @property
    def is_gumbel(self) -> bool:
        return abs(self.xi) < XI_EPS


@dataclass(frozen=True)
class FitResult:
    """Unified result of any fitting method."""

    method: str
    spec: ModelSpec
    params: NsGevParams
    std_residuals: np.ndarray
    diagnostics: dict = field(default_factory=dict)

    def params_at(self, series: AnnualSeries) -> tuple[np.ndarray, np.ndarray]:
        return self.params.evaluate(self.spec.location_matrix(series),
                                    self.spec.logscale_matrix(series))

    def params_at_t(self, t) -> tuple[np.ndarray, np.ndarray]:
        return self.params.evaluate(*self.spec.matrices_at_t(t))

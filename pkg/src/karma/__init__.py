"""Kumaraswamy autoregressive moving average (KARMA) models for bounded time series."""
from .diagnostics import acf, diagnose, information_criteria, ljung_box, pacf, quantile_residuals
from .estimation import FitOptions, FitResult, confidence_intervals, fit, init_params, wald_z
from .forecast import ForecastResult, forecast, holdout_metrics
from .inference import fisher, loglik, score
from .io import harmonic_covariates, load_csv, write_csv
from .kuma import Bounds, KumaDist, kw_cdf, kw_logpdf, kw_pdf, kw_quantile, kw_sample
from .links import Link, link_apply, link_deriv, link_inverse
from .mc import McConfig, run_study, karma22_config, karma11_config
from .model import KarmaSpec, ParamVector, SeriesData, filter, simulate

__all__ = [
    "Bounds", "FitOptions", "FitResult", "ForecastResult", "KarmaSpec", "KumaDist", "Link",
    "McConfig", "ParamVector", "SeriesData", "acf", "confidence_intervals", "diagnose",
    "filter", "fisher", "fit", "forecast", "harmonic_covariates", "holdout_metrics",
    "information_criteria", "init_params", "kw_cdf", "kw_logpdf", "kw_pdf", "kw_quantile",
    "kw_sample", "link_apply", "link_deriv", "link_inverse", "ljung_box", "load_csv", "loglik",
    "pacf", "quantile_residuals", "run_study", "score", "simulate", "karma22_config",
    "karma11_config", "wald_z", "write_csv",
]

"""Residual diagnostics and information criteria."""
import math
from dataclasses import dataclass

import numpy as np
from scipy import special, stats

from .kuma import unit_cdf
from .model import KarmaSpec, SeriesData, unit_series

CDF_EPS = 1e-12


class ZeroVarianceError(ValueError):
    """Autocorrelations are undefined for a constant series."""


def quantile_residuals(spec: KarmaSpec, fit_mu, data: SeriesData, precision: float) -> np.ndarray:
    """Phi^{-1} of the fitted conditional cdf at each observation, t > m.

    ``fit_mu`` is the full-length fitted median series; entries t <= m are
    ignored.
    """
    fit_mu = np.asarray(fit_mu, dtype=float)
    m = spec.m
    y = unit_series(spec, data)[m:]
    u = unit_cdf(y, fit_mu[m:], precision)
    return special.ndtri(np.clip(u, CDF_EPS, 1.0 - CDF_EPS))


def _centered(x):
    x = np.asarray(x, dtype=float)
    xc = x - x.mean()
    denom = float(np.dot(xc, xc))
    if not denom > 0:
        raise ZeroVarianceError("zero-variance series: autocorrelation undefined")
    return xc, denom


def acf(x, h_max: int) -> np.ndarray:
    """Sample autocorrelations at lags 0..h_max (lag 0 is 1)."""
    xc, denom = _centered(x)
    k = xc.size
    if not 0 <= h_max < k:
        raise ValueError(f"need 0 <= h_max < {k}")
    out = np.empty(h_max + 1)
    out[0] = 1.0
    for j in range(1, h_max + 1):
        out[j] = np.dot(xc[:-j], xc[j:]) / denom
    return out


def pacf(x, h_max: int) -> np.ndarray:
    """Partial autocorrelations at lags 0..h_max by the Durbin-Levinson recursion."""
    rho = acf(x, h_max)
    out = np.empty(h_max + 1)
    out[0] = 1.0
    prev = np.zeros(0)
    v = 1.0
    for k in range(1, h_max + 1):
        a = (rho[k] - np.dot(prev, rho[k - 1:0:-1])) / v if k > 1 else rho[1]
        prev = np.concatenate([prev - a * prev[::-1], [a]])
        v *= 1.0 - a * a
        out[k] = a
    return out


def ljung_box(residuals, lags: int = 20):
    """Portmanteau statistic Q = k(k+2) sum_j rho_j^2/(k-j) with a chi2(lags) p-value."""
    res = np.asarray(residuals, dtype=float)
    k = res.size
    if not 1 <= lags < k:
        raise ValueError(f"need 1 <= lags < {k}")
    rho = acf(res, lags)[1:]
    q = k * (k + 2.0) * float(np.sum(rho ** 2 / (k - np.arange(1, lags + 1))))
    return q, float(stats.chi2.sf(q, lags))


def information_criteria(loglik_hat: float, s: int, n_eff: int):
    """(AIC, SIC, HQ) from the maximized conditional log-likelihood; n_eff = n - m."""
    if n_eff <= 1:
        raise ValueError("HQ needs n_eff > 1")
    aic = -2.0 * loglik_hat + 2.0 * s
    sic = -2.0 * loglik_hat + s * math.log(n_eff)
    hq = -2.0 * loglik_hat + 2.0 * s * math.log(math.log(n_eff))
    return aic, sic, hq


@dataclass
class DiagnosticsReport:
    quantile_residuals: np.ndarray
    acf: np.ndarray
    pacf: np.ndarray
    ljung_box_Q: float
    ljung_box_p: float
    lags: int
    aic: float
    sic: float
    hq: float

    @property
    def band(self) -> float:
        return 1.96 / math.sqrt(self.quantile_residuals.size)


def diagnose(fit, lags: int = 20, h_max: int = None) -> DiagnosticsReport:
    res = fit.residuals_quantile
    h_max = h_max or min(lags, res.size - 1)
    q, p = ljung_box(res, lags)
    crit = fit.criteria
    return DiagnosticsReport(quantile_residuals=res, acf=acf(res, h_max), pacf=pacf(res, h_max),
                             ljung_box_Q=q, ljung_box_p=p, lags=lags, aic=crit["aic"],
                             sic=crit["sic"], hq=crit["hq"])

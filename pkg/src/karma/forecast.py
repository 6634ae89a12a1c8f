"""Out-of-sample forecasts of the conditional median."""
from dataclasses import dataclass

import numpy as np

from .links import _g, _ginv
from .model import KarmaSpec, SeriesData, _eta_at, covariate_effect, filter as karma_filter
from .model import unit_series


@dataclass
class ForecastResult:
    horizon: int
    mu_hat_future: np.ndarray
    y_tilde_hat: np.ndarray
    mu_fitted: np.ndarray
    mse: float = None
    mape: float = None


def forecast(spec: KarmaSpec, fit, data: SeriesData, X_future=None, h0: int = 1,
             y_holdout=None) -> ForecastResult:
    """h-step forecasts: future errors are zero and future g(y) are replaced by g(mu_hat).

    ``fit`` is a :class:`~karma.estimation.FitResult` or a bare ``ParamVector``.
    ``y_holdout`` (on the original scale) adds MSE/MAPE on the rescaled scale.
    """
    params = getattr(fit, "estimates", fit)
    if h0 < 0:
        raise ValueError("horizon must be non-negative")
    if X_future is None:
        if spec.r and h0:
            raise ValueError(f"spec has r={spec.r} covariates; X_future with {h0} rows is required")
        X_future = np.zeros((h0, spec.r))
    X_future = np.asarray(X_future, dtype=float).reshape(h0, spec.r)
    filt = karma_filter(spec, params, data)
    n = data.n
    code = spec.link.code
    gy = np.empty(n + h0)
    gy[:n] = [_g(code, v) for v in unit_series(spec, data)]
    X = np.vstack([data.X, X_future])
    xb = covariate_effect(X, params.beta)
    r = np.zeros(n + h0)
    r[:n] = filt.r_err
    mu_f = np.empty(h0)
    for h in range(h0):
        t = n + h
        eta = _eta_at(t, gy, xb, r, params.alpha, params.phi_ar, params.theta)
        mu_f[h] = _ginv(code, eta)
        gy[t] = _g(code, mu_f[h])
    out = ForecastResult(horizon=h0, mu_hat_future=mu_f, y_tilde_hat=spec.bounds.from_unit(mu_f),
                         mu_fitted=filt.mu)
    if y_holdout is not None:
        y_unit = spec.bounds.to_unit(np.asarray(y_holdout, dtype=float))
        out.mse, out.mape = holdout_metrics(y_unit, mu_f)
    return out


def holdout_metrics(y_actual, mu_hat):
    """(MSE, MAPE) with MAPE as a proportion; call with both arguments on one scale."""
    y = np.asarray(y_actual, dtype=float)
    f = np.asarray(mu_hat, dtype=float)
    if y.shape != f.shape:
        raise ValueError("actual and forecast series differ in length")
    if np.any(y == 0):
        raise ZeroDivisionError("MAPE is undefined for zero actual values")
    err = y - f
    return float(np.mean(err ** 2)), float(np.mean(np.abs(err) / np.abs(y)))

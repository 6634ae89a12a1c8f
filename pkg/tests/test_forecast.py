import math

import numpy as np
import pytest

from karma.estimation import fit
from karma.forecast import forecast, holdout_metrics
from karma.kuma import Bounds
from karma.mc import karma11_config
from karma.model import KarmaSpec, ParamVector, SeriesData, filter, simulate


def logit(x):
    return math.log(x / (1 - x))


def expit(x):
    return 1 / (1 + math.exp(-x))


def test_ar1_forecast_unrolled_by_hand():
    spec = KarmaSpec(p=1, r=1, bounds=Bounds(0.0, 100.0))
    pv = ParamVector(0.1, [0.5], [0.6], [], 9.0)
    y = np.array([31.0, 45.0, 38.0, 52.0])
    X = np.array([[0.1], [0.2], [-0.3], [0.4]])
    Xf = np.array([[1.0], [-1.0], [0.5]])
    fc = forecast(spec, pv, SeriesData(y, X), X_future=Xf, h0=3)
    prev_g, prev_x = logit(0.52), 0.4
    for h in range(3):
        eta = 0.1 + 0.5 * Xf[h, 0] + 0.6 * (prev_g - 0.5 * prev_x)
        assert fc.mu_hat_future[h] == pytest.approx(expit(eta), abs=1e-14)
        prev_g, prev_x = eta, Xf[h, 0]
    assert np.allclose(fc.y_tilde_hat, 100 * fc.mu_hat_future)


def test_ma_forecast_uses_last_errors_then_zero():
    spec = KarmaSpec(q=2)
    pv = ParamVector(-0.3, [], [], [0.4, 0.2], 6.0)
    data = simulate(spec, pv, 30, seed=2)
    r = filter(spec, pv, data).r_err
    fc = forecast(spec, pv, data, h0=4)
    assert fc.mu_hat_future[0] == pytest.approx(expit(-0.3 + 0.4 * r[-1] + 0.2 * r[-2]))
    assert fc.mu_hat_future[1] == pytest.approx(expit(-0.3 + 0.2 * r[-1]))
    assert fc.mu_hat_future[2] == pytest.approx(expit(-0.3))
    assert fc.mu_hat_future[3] == pytest.approx(expit(-0.3))


def test_long_horizon_converges_to_stationary_median():
    cfg = karma11_config()
    pv = cfg.true_params
    data = simulate(cfg.spec, pv, 100, seed=3)
    fc = forecast(cfg.spec, pv, data, h0=60)
    # eta* = alpha + phi eta*  =>  eta* = alpha / (1 - phi)
    assert fc.mu_hat_future[-1] == pytest.approx(expit(pv.alpha / (1 - pv.phi_ar[0])), abs=1e-12)


def test_zero_horizon_and_fitted_values():
    cfg = karma11_config()
    data = simulate(cfg.spec, cfg.true_params, 80, seed=5)
    res = fit(cfg.spec, data)
    fc = forecast(cfg.spec, res, data, h0=0)
    assert fc.mu_hat_future.size == 0
    assert np.allclose(fc.mu_fitted[1:], res.mu_fitted[1:])


def test_forecast_requires_future_covariates():
    spec = KarmaSpec(r=1)
    with pytest.raises(ValueError):
        forecast(spec, ParamVector(0.0, [1.0]), SeriesData([0.3, 0.4], np.ones((2, 1))), h0=2)
    with pytest.raises(ValueError):
        forecast(KarmaSpec(), ParamVector(0.0), SeriesData([0.3, 0.4]), h0=-1)


def test_holdout_metrics():
    mse, mape = holdout_metrics([0.5, 0.4], [0.4, 0.5])
    assert mse == pytest.approx(0.01)
    assert mape == pytest.approx((0.2 + 0.25) / 2)
    with pytest.raises(ZeroDivisionError):
        holdout_metrics([0.0, 0.5], [0.1, 0.5])


def test_holdout_scoring_in_forecast():
    cfg = karma11_config()
    full = simulate(cfg.spec, cfg.true_params, 112, seed=6)
    train = full.head(100)
    fc = forecast(cfg.spec, cfg.true_params, train, h0=12, y_holdout=full.y_tilde[100:])
    mse, mape = holdout_metrics(full.y_tilde[100:], fc.mu_hat_future)
    assert fc.mse == mse and fc.mape == mape

import math

import numpy as np
import pytest
from statsmodels.stats.diagnostic import acorr_ljungbox
from statsmodels.tsa.stattools import acf as sm_acf, pacf as sm_pacf

from karma.diagnostics import (ZeroVarianceError, acf, diagnose, information_criteria,
                               ljung_box, pacf, quantile_residuals)
from karma.estimation import fit
from karma.kuma import KumaDist, kw_cdf
from karma.mc import karma11_config
from karma.model import simulate


def ar1(rng, n, a):
    e = rng.normal(size=n)
    x = np.empty(n)
    x[0] = e[0]
    for t in range(1, n):
        x[t] = a * x[t - 1] + e[t]
    return x


def test_acf_pacf_match_statsmodels(rng):
    x = ar1(rng, 400, 0.6)
    assert np.allclose(acf(x, 15), sm_acf(x, nlags=15, fft=False), atol=1e-12)
    assert np.allclose(pacf(x, 15), sm_pacf(x, nlags=15, method="ldb"), atol=1e-10)


def test_ar1_autocorrelation_pattern(rng):
    x = ar1(rng, 20000, 0.7)
    r = acf(x, 3)
    assert r[0] == 1.0
    assert np.allclose(r[1:], 0.7 ** np.arange(1, 4), atol=0.03)
    assert pacf(x, 3)[1] == pytest.approx(0.7, abs=0.03)
    assert np.all(np.abs(pacf(x, 3)[2:]) < 0.03)


def test_constant_series_raises():
    with pytest.raises(ZeroVarianceError):
        acf(np.ones(10), 2)
    with pytest.raises(ValueError):
        acf(np.arange(5.0), 5)


def test_ljung_box_matches_statsmodels(rng):
    x = rng.normal(size=300)
    q, p = ljung_box(x, 20)
    ref = acorr_ljungbox(x, lags=[20])
    assert q == pytest.approx(float(ref["lb_stat"].iloc[0]), rel=1e-12)
    assert p == pytest.approx(float(ref["lb_pvalue"].iloc[0]), rel=1e-10)


def test_information_criteria_closed_form():
    aic, sic, hq = information_criteria(100.0, 5, 200)
    assert aic == -190.0
    assert sic == pytest.approx(-200.0 + 5 * math.log(200))
    assert hq == pytest.approx(-200.0 + 10 * math.log(math.log(200)))
    with pytest.raises(ValueError):
        information_criteria(1.0, 1, 1)


def test_quantile_residuals_definition():
    cfg = karma11_config()
    data = simulate(cfg.spec, cfg.true_params, 50, seed=4)
    from karma.model import filter
    mu = filter(cfg.spec, cfg.true_params, data).mu
    res = quantile_residuals(cfg.spec, mu, data, 10.0)
    from scipy.stats import norm
    for t in (1, 17, 49):
        u = kw_cdf(data.y_tilde[t], KumaDist(mu[t], 10.0))
        assert res[t - 1] == pytest.approx(norm.ppf(u), abs=1e-12)


def test_residuals_of_true_model_recover_the_simulation_draws():
    # at the true parameters the fitted cdf inverts the simulator's uniforms exactly
    from scipy.stats import norm
    from karma.model import filter, simulate_path
    cfg = karma11_config()
    path = simulate_path(cfg.spec, cfg.true_params, 500, seed=8)
    mu = filter(cfg.spec, cfg.true_params, path.data).mu
    res = quantile_residuals(cfg.spec, mu, path.data, 10.0)
    assert np.allclose(res, norm.ppf(path.uniforms[1:]), atol=1e-9)


def test_diagnose_report():
    cfg = karma11_config()
    data = simulate(cfg.spec, cfg.true_params, 300, seed=9)
    rep = diagnose(fit(cfg.spec, data), lags=20)
    assert rep.acf.shape == (21,) and rep.pacf.shape == (21,)
    assert rep.band == pytest.approx(1.96 / math.sqrt(299))
    assert 0 <= rep.ljung_box_p <= 1

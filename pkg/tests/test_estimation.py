import numpy as np
import pytest
from scipy import optimize

from karma.estimation import FitOptions, confidence_intervals, fit, init_params, wald_z
from karma.inference import Prepared, loglik
from karma.kuma import Bounds
from karma.links import link_apply
from karma.mc import karma11_config
from karma.model import KarmaSpec, ParamVector, SeriesData, simulate


@pytest.fixture(scope="module")
def karma11():
    cfg = karma11_config()
    data = simulate(cfg.spec, cfg.true_params, 400, seed=21)
    return cfg.spec, cfg.true_params, data, fit(cfg.spec, data)


def test_init_params_is_ols(rng):
    spec = KarmaSpec(p=2, q=1, r=1)
    n = 120
    y = rng.uniform(0.1, 0.9, n)
    X = rng.normal(size=(n, 1))
    start = init_params(spec, SeriesData(y, X), precision_start=3.0)
    g = link_apply("logit", y)
    Z = np.column_stack([np.ones(n - 2), X[2:, 0], g[1:-1], g[:-2]])
    coef = np.linalg.lstsq(Z, g[2:], rcond=None)[0]
    assert np.allclose(start.to_array(), [coef[0], coef[1], coef[2], coef[3], 0.0, 3.0])


def test_init_params_intercept_only(rng):
    y = rng.uniform(0.1, 0.9, 40)
    start = init_params(KarmaSpec(q=2), SeriesData(y))
    assert start.alpha == pytest.approx(np.mean(link_apply("logit", y[2:])), rel=1e-12)
    assert np.array_equal(start.theta, [0.0, 0.0])


def test_init_params_rank_deficient_falls_back_to_median():
    spec = KarmaSpec(p=0, q=1, r=1)
    y = np.linspace(0.2, 0.8, 30)
    start = init_params(spec, SeriesData(y, np.ones((30, 1))))
    assert start.alpha == pytest.approx(np.median(link_apply("logit", y[1:])))
    assert np.all(start.beta == 0)


def test_fit_reaches_stationary_point(karma11):
    spec, truth, data, res = karma11
    assert res.converged
    assert np.max(np.abs(res.score_at_estimate)) < 1e-6
    assert res.loglik_hat >= res.loglik_start
    assert np.all(np.diag(res.vcov) > 0)
    assert np.all(np.abs(res.estimates.to_array() - truth.to_array()) < 4 * res.std_errors)


def test_fit_is_a_local_maximum(karma11):
    spec, _, data, res = karma11
    prep = Prepared(spec, data)
    x = res.estimates.to_array()
    for k in range(x.size):
        for step in (-1e-3, 1e-3):
            e = np.zeros_like(x)
            e[k] = step * max(1, abs(x[k]))
            assert loglik(spec, ParamVector.from_array(spec, x + e), prep) <= res.loglik_hat


def test_fit_matches_independent_optimizer(karma11):
    spec, _, data, res = karma11
    prep = Prepared(spec, data)
    f = lambda x: -loglik(spec, ParamVector.from_array(spec, x), prep) if x[-1] > 0 else np.inf
    ref = optimize.minimize(f, res.estimates.to_array() * 0.9 + 0.01, method="Nelder-Mead",
                            options=dict(xatol=1e-9, fatol=1e-12, maxiter=20000, maxfev=40000))
    assert np.allclose(ref.x, res.estimates.to_array(), atol=1e-4)


def test_bounds_invariance(karma11):
    spec, _, data, res = karma11
    spec2 = KarmaSpec(p=1, q=1, bounds=Bounds(10.0, 110.0))
    data2 = SeriesData(10.0 + 100.0 * data.y_tilde)
    res2 = fit(spec2, data2)
    assert np.allclose(res2.estimates.to_array(), res.estimates.to_array(), atol=1e-6)
    assert res2.loglik_hat == pytest.approx(res.loglik_hat - (data.n - 1) * np.log(100.0),
                                            rel=1e-9)


def test_grid_search_oracle_for_white_noise(rng):
    spec = KarmaSpec()
    data = simulate(spec, ParamVector(0.4, precision=7.0), 250, seed=rng)
    res = fit(spec, data)
    prep = Prepared(spec, data)
    grid_a = np.linspace(-1.0, 1.5, 101)
    grid_p = np.linspace(2.0, 15.0, 105)
    ll = np.array([[loglik(spec, ParamVector(a, precision=p), prep) for p in grid_p]
                   for a in grid_a])
    i, j = np.unravel_index(np.argmax(ll), ll.shape)
    ref = optimize.minimize(lambda x: -loglik(spec, ParamVector(x[0], precision=x[1]), prep),
                            [grid_a[i], grid_p[j]], method="Nelder-Mead",
                            options=dict(xatol=1e-10, fatol=1e-13))
    assert np.allclose(res.estimates.to_array(), ref.x, atol=1e-4)


def test_result_table_and_inference(karma11):
    spec, _, _, res = karma11
    rows = res.table()
    assert [r[0] for r in rows] == spec.param_names()
    ci = confidence_intervals(res, 0.95)
    est = res.estimates.to_array()
    assert np.all(ci[:, 0] < est) and np.all(est < ci[:, 1])
    assert np.allclose(ci[:, 1] - ci[:, 0], 2 * 1.959963984540054 * res.std_errors)
    z, p = wald_z(res, 0)
    assert z == pytest.approx(res.z_stats[0]) and p == pytest.approx(res.p_values[0])
    z1, p1 = wald_z(res, 0, null_value=est[0])
    assert z1 == 0.0 and p1 == 1.0
    assert set(res.criteria) == {"aic", "sic", "hq"}
    with pytest.raises(ValueError):
        confidence_intervals(res, 1.2)


def test_fit_rejects_too_short_series():
    spec = KarmaSpec(p=2, q=2)
    with pytest.raises(ValueError):
        fit(spec, SeriesData(np.linspace(0.2, 0.8, 7)))


def test_fit_options_respected(karma11):
    spec, _, data, _ = karma11
    res = fit(spec, data, FitOptions(max_iter=1, polish_steps=0))
    assert not res.converged
    assert res.loglik_hat >= res.loglik_start

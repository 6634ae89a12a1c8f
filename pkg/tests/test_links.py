import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special

from karma.links import EPS, Link, link_apply, link_deriv, link_inverse

LINKS = list(Link)


@pytest.mark.parametrize("link", LINKS)
def test_round_trip(link):
    mu = np.linspace(1e-6, 1 - 1e-6, 301)
    assert np.allclose(link_inverse(link, link_apply(link, mu)), mu, atol=1e-13, rtol=1e-11)


@pytest.mark.parametrize("link", LINKS)
def test_derivative_finite_difference(link):
    mu = np.linspace(0.02, 0.98, 25)
    h = 1e-6
    fd = (link_apply(link, mu + h) - link_apply(link, mu - h)) / (2 * h)
    assert np.allclose(link_deriv(link, mu), fd, rtol=1e-7)


def test_against_scipy():
    mu = np.linspace(1e-9, 1 - 1e-9, 1001)
    assert np.allclose(link_apply("logit", mu), special.logit(mu), rtol=1e-13, atol=1e-13)
    assert np.allclose(link_apply("probit", mu), special.ndtri(mu), rtol=1e-12, atol=1e-12)
    eta = np.linspace(-30, 30, 601)
    assert np.allclose(link_inverse("logit", eta), np.clip(special.expit(eta), EPS, 1 - EPS),
                       rtol=1e-14)
    assert np.allclose(link_inverse("probit", eta), np.clip(special.ndtr(eta), EPS, 1 - EPS),
                       rtol=1e-13)
    assert np.allclose(link_apply("cloglog", mu), np.log(-np.log1p(-mu)), rtol=1e-12)
    assert np.allclose(link_apply("loglog", mu), -np.log(-np.log(mu)), rtol=1e-12)


@pytest.mark.parametrize("link", LINKS)
def test_saturation(link):
    out = link_inverse(link, np.array([-1e6, 1e6]))
    assert out[0] == EPS and out[1] == 1 - EPS


def test_domain_error():
    with pytest.raises(ValueError):
        link_apply("logit", 1.0)
    with pytest.raises(ValueError):
        Link.parse("tanh")


@settings(max_examples=50, deadline=None)
@given(st.sampled_from(LINKS), st.floats(min_value=-8, max_value=8))
def test_inverse_monotone(link, eta):
    lo, hi = link_inverse(link, np.array([eta, eta + 0.5]))
    assert lo <= hi

import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from karma.special import digamma, trigamma

GRID = [0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.5, 7.0, 10.0, 25.5, 100.0, 1e4]


@pytest.mark.parametrize("x", GRID)
def test_digamma_matches_mpmath(x):
    assert digamma(x) == pytest.approx(float(mpmath.digamma(x)), rel=1e-12, abs=1e-13)


@pytest.mark.parametrize("x", GRID)
def test_trigamma_matches_mpmath(x):
    assert trigamma(x) == pytest.approx(float(mpmath.psi(1, x)), rel=1e-12)


def test_known_values():
    assert digamma(1.0) == pytest.approx(-0.5772156649015329, abs=1e-15)
    assert trigamma(2.0) == pytest.approx(math.pi ** 2 / 6 - 1, abs=1e-14)


def test_vectorized_shape():
    x = np.linspace(0.2, 30, 17).reshape(17, 1)
    out = digamma(x)
    assert out.shape == x.shape
    assert np.allclose(out.ravel(), [float(mpmath.digamma(v)) for v in x.ravel()], rtol=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.floats(min_value=0.05, max_value=500.0))
def test_recurrences(x):
    assert digamma(x + 1) - digamma(x) == pytest.approx(1.0 / x, rel=1e-10, abs=1e-12)
    assert trigamma(x) - trigamma(x + 1) == pytest.approx(1.0 / x ** 2, rel=1e-10)

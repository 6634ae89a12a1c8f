"""Monotone link functions g: (0, 1) -> R.

The scalar kernels (``_g``, ``_ginv``, ``_gprime``) are numba-compiled so the
median recursion in :mod:`karma.model` can call them inside its loops; the
public array functions run the very same kernels, which keeps a filtered
series bit-identical to the simulator's internal path.
"""
import math
from enum import Enum

import numpy as np
from numba import njit

EPS = 1e-12

LOGIT, PROBIT, CLOGLOG, LOGLOG = 0, 1, 2, 3


class Link(str, Enum):
    LOGIT = "logit"
    PROBIT = "probit"
    CLOGLOG = "cloglog"
    LOGLOG = "loglog"

    @property
    def code(self) -> int:
        return _CODES[self]

    @classmethod
    def parse(cls, link) -> "Link":
        if isinstance(link, Link):
            return link
        try:
            return cls(str(link).lower())
        except ValueError:
            names = ", ".join(m.value for m in cls)
            raise ValueError(f"unknown link {link!r}; choose one of {names}") from None


_CODES = {Link.LOGIT: LOGIT, Link.PROBIT: PROBIT, Link.CLOGLOG: CLOGLOG, Link.LOGLOG: LOGLOG}

_SQRT2 = math.sqrt(2.0)
_SQRT2PI = math.sqrt(2.0 * math.pi)

# Acklam's rational approximation for the normal quantile, refined below.
_A = (-3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
      1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00)
_B = (-5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
      6.680131188771972e01, -1.328068155288572e01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
      -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
      3.754408661907416e00)


@njit(cache=True)
def _ndtr(x):
    return 0.5 * math.erfc(-x / _SQRT2)


@njit(cache=True)
def _ndtri(p):
    if p < 0.02425:
        s = math.sqrt(-2.0 * math.log(p))
        x = ((((((_C[0] * s + _C[1]) * s + _C[2]) * s + _C[3]) * s + _C[4]) * s + _C[5])
             / ((((_D[0] * s + _D[1]) * s + _D[2]) * s + _D[3]) * s + 1.0))
    elif p > 1.0 - 0.02425:
        s = math.sqrt(-2.0 * math.log1p(-p))
        x = -((((((_C[0] * s + _C[1]) * s + _C[2]) * s + _C[3]) * s + _C[4]) * s + _C[5])
              / ((((_D[0] * s + _D[1]) * s + _D[2]) * s + _D[3]) * s + 1.0))
    else:
        s = p - 0.5
        t = s * s
        x = ((((((_A[0] * t + _A[1]) * t + _A[2]) * t + _A[3]) * t + _A[4]) * t + _A[5]) * s
             / (((((_B[0] * t + _B[1]) * t + _B[2]) * t + _B[3]) * t + _B[4]) * t + 1.0))
    # two Halley steps; the upper tail is refined on the complementary side
    for _ in range(2):
        if p > 0.5:
            e = 0.5 * math.erfc(x / _SQRT2) - (1.0 - p)
            e = -e
        else:
            e = _ndtr(x) - p
        u = e * _SQRT2PI * math.exp(0.5 * x * x)
        x = x - u / (1.0 + 0.5 * x * u)
    return x


@njit(cache=True)
def _g(code, mu):
    if code == LOGIT:
        return math.log(mu) - math.log1p(-mu)
    elif code == PROBIT:
        return _ndtri(mu)
    elif code == CLOGLOG:
        return math.log(-math.log1p(-mu))
    else:
        return -math.log(-math.log(mu))


@njit(cache=True)
def _ginv(code, eta):
    if code == LOGIT:
        if eta >= 0.0:
            mu = 1.0 / (1.0 + math.exp(-eta))
        else:
            z = math.exp(eta)
            mu = z / (1.0 + z)
    elif code == PROBIT:
        mu = _ndtr(eta)
    elif code == CLOGLOG:
        mu = -math.expm1(-math.exp(min(eta, 700.0)))
    else:
        mu = math.exp(-math.exp(min(-eta, 700.0)))
    if mu < EPS:
        return EPS
    if mu > 1.0 - EPS:
        return 1.0 - EPS
    return mu


@njit(cache=True)
def _gprime(code, mu):
    if code == LOGIT:
        return 1.0 / (mu * (1.0 - mu))
    elif code == PROBIT:
        z = _ndtri(mu)
        return _SQRT2PI * math.exp(0.5 * z * z)
    elif code == CLOGLOG:
        return -1.0 / ((1.0 - mu) * math.log1p(-mu))
    else:
        return -1.0 / (mu * math.log(mu))


@njit(cache=True)
def _g_array(code, mu):
    out = np.empty(mu.size)
    for i in range(mu.size):
        out[i] = _g(code, mu[i])
    return out


@njit(cache=True)
def _ginv_array(code, eta):
    out = np.empty(eta.size)
    for i in range(eta.size):
        out[i] = _ginv(code, eta[i])
    return out


@njit(cache=True)
def _gprime_array(code, mu):
    out = np.empty(mu.size)
    for i in range(mu.size):
        out[i] = _gprime(code, mu[i])
    return out


def _apply(kernel, link, x, check_unit):
    code = Link.parse(link).code
    arr = np.asarray(x, dtype=float)
    flat = np.ascontiguousarray(arr.ravel())
    if check_unit and np.any(~((flat > 0.0) & (flat < 1.0))):
        raise ValueError("link functions are defined on the open interval (0, 1)")
    out = kernel(code, flat).reshape(arr.shape)
    return float(out) if out.ndim == 0 else out


def link_apply(link, mu):
    """eta = g(mu); ``mu`` must lie strictly inside (0, 1)."""
    return _apply(_g_array, link, mu, check_unit=True)


def link_inverse(link, eta):
    """mu = g^{-1}(eta), clamped to [EPS, 1 - EPS]."""
    return _apply(_ginv_array, link, eta, check_unit=False)


def link_deriv(link, mu):
    """g'(mu), positive for every supported link."""
    return _apply(_gprime_array, link, mu, check_unit=True)

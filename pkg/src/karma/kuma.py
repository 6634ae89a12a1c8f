"""Kumaraswamy distribution on (a, b), parameterized by its median.

With shape pair (phi, delta) the rescaled variable ``y = (y_tilde - a)/(b - a)``
has cdf ``1 - (1 - y**phi)**delta``. Writing ``mu`` for the median of ``y``,
``delta = log(0.5) / log(1 - mu**phi)``.
"""
import math
from dataclasses import dataclass

import numpy as np
from numba import njit
from scipy.special import betaln

LOG_HALF = math.log(0.5)
Y_EPS = 1e-12


class KumaDomainError(ValueError):
    """Raised when a parameter or argument lies outside the distribution's domain."""


@dataclass(frozen=True)
class Bounds:
    a: float = 0.0
    b: float = 1.0

    def __post_init__(self):
        if not (np.isfinite(self.a) and np.isfinite(self.b)) or not self.a < self.b:
            raise KumaDomainError(f"need finite a < b, got a={self.a}, b={self.b}")

    @property
    def width(self) -> float:
        return self.b - self.a

    def to_unit(self, y_tilde):
        return (np.asarray(y_tilde, dtype=float) - self.a) / (self.b - self.a)

    def from_unit(self, y):
        return self.a + (self.b - self.a) * np.asarray(y, dtype=float)


@dataclass(frozen=True)
class KumaDist:
    """Median-parameterized Kumaraswamy law: median ``a + (b-a)*mu``, precision ``phi``."""

    mu: float
    phi: float
    bounds: Bounds = Bounds()

    def __post_init__(self):
        if not 0.0 < self.mu < 1.0:
            raise KumaDomainError(f"median mu must lie in (0, 1), got {self.mu}")
        if not self.phi > 0.0:
            raise KumaDomainError(f"precision phi must be positive, got {self.phi}")
        delta_from_mu(self.mu, self.phi)

    @property
    def delta(self) -> float:
        return delta_from_mu(self.mu, self.phi)


def log1m_pow(x, phi):
    """log(1 - x**phi) without cancellation when x**phi is small."""
    return np.log1p(-np.exp(phi * np.log(x)))


def _delta(mu, phi):
    """Unchecked vectorized delta; inf/nan flag degenerate inputs."""
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        return LOG_HALF / log1m_pow(mu, phi)


def delta_from_mu(mu, phi):
    """Second shape parameter implied by median ``mu`` and precision ``phi``.

    Raises
    ------
    KumaDomainError
        If ``mu**phi`` underflows to 0 or rounds to 1, where delta is
        infinite or zero.
    """
    mu = np.asarray(mu, dtype=float)
    phi = np.asarray(phi, dtype=float)
    if np.any(~((mu > 0) & (mu < 1))) or np.any(~(phi > 0)):
        raise KumaDomainError("need 0 < mu < 1 and phi > 0")
    with np.errstate(under="ignore"):
        mp = np.exp(phi * np.log(mu))
    if np.any(mp == 0.0) or np.any(mp >= 1.0) or np.any(1.0 - mp == 1.0):
        raise KumaDomainError("mu**phi degenerates to 0 or 1; delta is not representable")
    d = LOG_HALF / np.log1p(-mp)
    return float(d) if d.ndim == 0 else d


def unit_logpdf(y, mu, phi):
    """Log density of the rescaled variable on (0, 1); -inf outside."""
    y = np.asarray(y, dtype=float)
    d = _delta(mu, phi)
    inside = (y > 0) & (y < 1)
    yc = np.where(inside, y, 0.5)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = (np.log(phi) + np.log(d) + (phi - 1.0) * np.log(yc)
               + (d - 1.0) * log1m_pow(yc, phi))
    out = np.where(inside, out, -np.inf)
    return float(out) if out.ndim == 0 else out


def unit_cdf(y, mu, phi):
    y = np.asarray(y, dtype=float)
    d = _delta(mu, phi)
    yc = np.where((y > 0) & (y < 1), y, 0.5)
    with np.errstate(divide="ignore", under="ignore"):
        out = -np.expm1(d * log1m_pow(yc, phi))
    out = np.where(y <= 0, 0.0, np.where(y >= 1, 1.0, out))
    return float(out) if out.ndim == 0 else out


def unit_quantile(u, mu, phi):
    u = np.asarray(u, dtype=float)
    if np.any(~((u > 0) & (u < 1))):
        raise KumaDomainError("quantile level u must lie in (0, 1)")
    out = np.exp(np.log(-np.expm1(np.log1p(-u) * log1m_pow(mu, phi) / LOG_HALF)) / phi)
    return float(out) if out.ndim == 0 else out


@njit(cache=True)
def _unit_quantile_scalar(u, mu, phi):
    lm = math.log1p(-math.exp(phi * math.log(mu)))
    return math.exp(math.log(-math.expm1(math.log1p(-u) * lm / LOG_HALF)) / phi)


def kw_logpdf(y_tilde, dist: KumaDist):
    """Log density on (a, b).

    Observations numerically equal to a bound are nudged inside by 1e-12
    (on the unit scale); anything strictly outside [a, b] gets ``-inf``.
    """
    y = dist.bounds.to_unit(y_tilde)
    edge = (y >= 0) & (y <= 1)
    y = np.where(edge, np.clip(y, Y_EPS, 1.0 - Y_EPS), y)
    out = unit_logpdf(y, dist.mu, dist.phi) - math.log(dist.bounds.width)
    return float(out) if np.ndim(out) == 0 else out


def kw_logpdf_strict(y_tilde, dist: KumaDist):
    """As :func:`kw_logpdf` but raises for arguments outside the open support."""
    y = dist.bounds.to_unit(y_tilde)
    if np.any(~((y > 0) & (y < 1))):
        raise KumaDomainError("observation outside the open support (a, b)")
    return kw_logpdf(y_tilde, dist)


def kw_pdf(y_tilde, dist: KumaDist):
    return np.exp(kw_logpdf(y_tilde, dist))


def kw_cdf(y_tilde, dist: KumaDist):
    """Distribution function, 0 below a and 1 above b."""
    return unit_cdf(dist.bounds.to_unit(y_tilde), dist.mu, dist.phi)


def kw_quantile(u, dist: KumaDist):
    out = dist.bounds.from_unit(unit_quantile(u, dist.mu, dist.phi))
    return float(out) if out.ndim == 0 else out


def kw_sample(dist: KumaDist, uniform_draw):
    """Inversion sampling: the quantile at the supplied uniform draw(s)."""
    return kw_quantile(uniform_draw, dist)


def _delta_beta(k, dist):
    # delta * B(1 + k/phi, delta) through log-gamma differences
    d = dist.delta
    return math.exp(math.log(d) + betaln(1.0 + k / dist.phi, d))


def kw_cond_mean(dist: KumaDist) -> float:
    return dist.bounds.a + dist.bounds.width * _delta_beta(1, dist)


def kw_cond_variance(dist: KumaDist) -> float:
    """Variance on the (a, b) scale; scales with (b - a)**2."""
    m1 = _delta_beta(1, dist)
    m2 = _delta_beta(2, dist)
    return dist.bounds.width ** 2 * (m2 - m1 * m1)

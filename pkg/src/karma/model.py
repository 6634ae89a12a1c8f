"""KARMA(p, q) structure: the median recursion, error terms and simulation.

The linear predictor for t > m = max(p, q) is

    eta_t = alpha + x_t'beta + sum_i phi_i (g(y_{t-i}) - x_{t-i}'beta)
                             + sum_j theta_j r_{t-j},

with ``mu_t = g^{-1}(eta_t)`` and ``r_t = g(y_t) - eta_t``. Pre-sample error
terms (t <= m) are zero.
"""
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .kuma import Bounds, Y_EPS, _unit_quantile_scalar
from .links import EPS, Link, _g, _g_array, _ginv, _ginv_array


@dataclass(frozen=True)
class KarmaSpec:
    p: int = 0
    q: int = 0
    r: int = 0
    link: Link = Link.LOGIT
    bounds: Bounds = field(default_factory=Bounds)

    def __post_init__(self):
        if min(self.p, self.q, self.r) < 0:
            raise ValueError("orders p, q and covariate count r must be non-negative")
        object.__setattr__(self, "link", Link.parse(self.link))

    @property
    def m(self) -> int:
        return max(self.p, self.q)

    @property
    def n_params(self) -> int:
        return self.p + self.q + self.r + 2

    def param_names(self) -> list:
        return (["alpha"] + [f"beta{l + 1}" for l in range(self.r)]
                + [f"phi{i + 1}" for i in range(self.p)]
                + [f"theta{j + 1}" for j in range(self.q)] + ["precision"])


@dataclass(frozen=True)
class ParamVector:
    """gamma = (alpha, beta, phi_ar, theta, precision)."""

    alpha: float
    beta: np.ndarray = ()
    phi_ar: np.ndarray = ()
    theta: np.ndarray = ()
    precision: float = 1.0

    def __post_init__(self):
        for name in ("beta", "phi_ar", "theta"):
            object.__setattr__(self, name, np.atleast_1d(np.asarray(getattr(self, name), dtype=float)))
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "precision", float(self.precision))
        if not self.precision > 0:
            raise ValueError(f"precision must be positive, got {self.precision}")

    def to_array(self) -> np.ndarray:
        return np.concatenate([[self.alpha], self.beta, self.phi_ar, self.theta, [self.precision]])

    @classmethod
    def from_array(cls, spec: KarmaSpec, x) -> "ParamVector":
        x = np.asarray(x, dtype=float)
        if x.size != spec.n_params:
            raise ValueError(f"expected {spec.n_params} parameters, got {x.size}")
        r, p, q = spec.r, spec.p, spec.q
        return cls(alpha=x[0], beta=x[1:1 + r], phi_ar=x[1 + r:1 + r + p],
                   theta=x[1 + r + p:1 + r + p + q], precision=x[-1])

    def check(self, spec: KarmaSpec):
        if (self.beta.size, self.phi_ar.size, self.theta.size) != (spec.r, spec.p, spec.q):
            raise ValueError(
                f"parameter shapes (r={self.beta.size}, p={self.phi_ar.size}, q={self.theta.size}) "
                f"do not match spec (r={spec.r}, p={spec.p}, q={spec.q})")


@dataclass(frozen=True)
class SeriesData:
    y_tilde: np.ndarray
    X: np.ndarray = None

    def __post_init__(self):
        y = np.asarray(self.y_tilde, dtype=float).ravel()
        X = np.zeros((y.size, 0)) if self.X is None else np.asarray(self.X, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        if X.shape[0] != y.size:
            raise ValueError(f"covariate matrix has {X.shape[0]} rows for {y.size} observations")
        object.__setattr__(self, "y_tilde", y)
        object.__setattr__(self, "X", X)

    @property
    def n(self) -> int:
        return self.y_tilde.size

    def head(self, n: int) -> "SeriesData":
        return SeriesData(self.y_tilde[:n], self.X[:n])

    def tail(self, n: int) -> "SeriesData":
        return SeriesData(self.y_tilde[self.n - n:], self.X[self.n - n:])


@dataclass(frozen=True)
class FilterOutput:
    """Recursion output; entries with t <= m are NaN for eta/mu and 0 for r_err."""

    eta: np.ndarray
    mu: np.ndarray
    r_err: np.ndarray
    m: int


def unit_series(spec: KarmaSpec, data: SeriesData) -> np.ndarray:
    """Rescale to (0, 1); values on a bound are nudged inside, values beyond raise."""
    if data.X.shape[1] != spec.r:
        raise ValueError(f"spec expects r={spec.r} covariates, data has {data.X.shape[1]}")
    y = spec.bounds.to_unit(data.y_tilde)
    bad = np.flatnonzero(~((y >= 0) & (y <= 1)))
    if bad.size:
        i = bad[0]
        raise ValueError(
            f"observation {i + 1} ({data.y_tilde[i]!r}) lies outside ({spec.bounds.a}, {spec.bounds.b})")
    return np.clip(y, Y_EPS, 1.0 - Y_EPS)


def covariate_effect(X: np.ndarray, beta: np.ndarray) -> np.ndarray:
    # column-by-column accumulation; row results do not depend on the row count
    xb = np.zeros(X.shape[0])
    for l in range(X.shape[1]):
        xb = xb + X[:, l] * beta[l]
    return xb


@njit(cache=True)
def _eta_at(t, gy, xb, r, alpha, phi, theta):
    eta = alpha + xb[t]
    for i in range(phi.size):
        eta = eta + phi[i] * (gy[t - 1 - i] - xb[t - 1 - i])
    for j in range(theta.size):
        eta = eta + theta[j] * r[t - 1 - j]
    return eta


@njit(cache=True)
def _filter_kernel(gy, xb, alpha, phi, theta, m):
    n = gy.size
    eta = np.full(n, np.nan)
    r = np.zeros(n)
    for t in range(m, n):
        e = _eta_at(t, gy, xb, r, alpha, phi, theta)
        eta[t] = e
        r[t] = gy[t] - e
    return eta, r


@njit(cache=True)
def _simulate_kernel(u, xb, alpha, phi, theta, precision, m, code):
    n = u.size
    y = np.empty(n)
    gy = np.empty(n)
    eta = np.full(n, np.nan)
    mu = np.empty(n)
    r = np.zeros(n)
    mu0 = _ginv(code, alpha)
    for t in range(n):
        if t < m:
            mt = mu0
        else:
            e = _eta_at(t, gy, xb, r, alpha, phi, theta)
            eta[t] = e
            mt = _ginv(code, e)
        mu[t] = mt
        yt = _unit_quantile_scalar(u[t], mt, precision)
        yt = min(max(yt, Y_EPS), 1.0 - Y_EPS)
        y[t] = yt
        gy[t] = _g(code, yt)
        if t >= m:
            r[t] = gy[t] - eta[t]
    return y, eta, mu, r


def filter(spec: KarmaSpec, params: ParamVector, data: SeriesData) -> FilterOutput:
    """Run the median recursion over an observed series."""
    params.check(spec)
    m = spec.m
    if data.n <= m:
        raise ValueError(f"series of length {data.n} is too short for m = {m}")
    y = unit_series(spec, data)
    gy = _g_array(spec.link.code, y)
    return _filter_from_gy(spec, params, gy, data.X)


def _filter_from_gy(spec, params, gy, X):
    xb = covariate_effect(X, params.beta)
    eta, r = _filter_kernel(gy, xb, params.alpha, params.phi_ar, params.theta, spec.m)
    mu = np.full(eta.size, np.nan)
    mu[spec.m:] = _ginv_array(spec.link.code, np.ascontiguousarray(eta[spec.m:]))
    return FilterOutput(eta=eta, mu=mu, r_err=r, m=spec.m)


@dataclass(frozen=True)
class SimulationPath:
    """Full simulated path including burn-in, with the simulator's internal state."""

    data: SeriesData
    eta: np.ndarray
    mu: np.ndarray
    r_err: np.ndarray
    uniforms: np.ndarray
    burn_in: int


def burn_in_length(spec: KarmaSpec) -> int:
    return 2 * spec.m


def simulate_path(spec: KarmaSpec, params: ParamVector, n: int, X=None, seed=None,
                  burn_in=None) -> SimulationPath:
    """Simulate ``burn_in + n`` observations by inversion.

    ``X`` must provide ``burn_in + n`` rows when ``spec.r > 0``. ``seed`` may be
    an int, a ``SeedSequence`` or a ``Generator``; uniforms are drawn in one
    block, so a longer series extends a shorter one with the same seed.
    """
    params.check(spec)
    if n < 1:
        raise ValueError("n must be at least 1")
    n0 = burn_in_length(spec) if burn_in is None else int(burn_in)
    total = n0 + n
    if X is None:
        if spec.r:
            raise ValueError(f"spec has r={spec.r} covariates; supply X with {total} rows")
        X = np.zeros((total, 0))
    X = np.asarray(X, dtype=float).reshape(total, -1) if np.size(X) else np.zeros((total, 0))
    if X.shape != (total, spec.r):
        raise ValueError(f"X must have shape ({total}, {spec.r}), got {X.shape}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    u = rng.random(total)
    u = np.clip(u, EPS, 1.0 - EPS)
    xb = covariate_effect(X, params.beta)
    y, eta, mu, r = _simulate_kernel(u, xb, params.alpha, params.phi_ar, params.theta,
                                     params.precision, spec.m, spec.link.code)
    data = SeriesData(spec.bounds.from_unit(y), X)
    return SimulationPath(data=data, eta=eta, mu=mu, r_err=r, uniforms=u, burn_in=n0)


def simulate(spec: KarmaSpec, params: ParamVector, n: int, X=None, seed=None) -> SeriesData:
    """Simulate a KARMA series of length ``n`` after a burn-in of 2m steps."""
    path = simulate_path(spec, params, n, X=X, seed=seed)
    return path.data.tail(n)

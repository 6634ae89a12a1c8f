"""Conditional log-likelihood, score vector and conditional Fisher information.

Per observation t > m (unit scale, ``L = log(1 - mu**phi)``)::

    delta  = log(0.5) / L
    A      = mu**(phi-1) / ((1 - mu**phi) L)
    c      = A (1 + delta log(1 - y**phi))           d l/d mu = phi c

The expected information per observation, with ``h1 = E[Y^phi log Y/(1-Y^phi)] phi``
and ``h2 = E[Y^phi log^2 Y/(1-Y^phi)^2] phi^2`` (functions of delta only)::

    I_mu,mu   = phi^2 A^2                        (= -w_t)
    I_mu,phi  = delta A h1 + phi mu A^2 log mu   (= -d_t)
    I_phi,phi = 1/phi^2 + (delta-1) h2/phi^2 + 2 delta mu A log(mu) h1/phi
                + mu^2 A^2 log(mu)^2

Derivatives of eta with respect to (alpha, beta, phi_ar, theta) follow the
recursion ``d eta_t = d a_t - sum_j theta_j d eta_{t-j}``, started at zero.
"""
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.signal import lfilter

from .kuma import LOG_HALF, delta_from_mu, log1m_pow
from .links import EPS, _g_array, _gprime_array
from .model import (FilterOutput, KarmaSpec, ParamVector, SeriesData, _filter_from_gy,
                    covariate_effect, unit_series)
from .special import EULER_GAMMA, digamma, trigamma

PSI_2 = 1.0 - EULER_GAMMA
TRIGAMMA_2 = math.pi ** 2 / 6.0 - 1.0
POLE_TOL = 1e-6


# -- closed-form expectations ---------------------------------------------------

def _split_quad(f_v, f_w):
    # V = Y^phi ~ Beta(1, delta); near V = 0 integrate in V, near V = 1 in W = 1 - V
    opts = dict(limit=200, epsabs=1e-14, epsrel=1e-12)
    return quad(f_v, 0.0, 0.5, **opts)[0] + quad(f_w, 0.0, 0.5, **opts)[0]


def _h1_quad(delta):
    # phi * E[Y^phi log Y / (1 - Y^phi)]
    return _split_quad(lambda v: delta * v * math.log(v) * (1.0 - v) ** (delta - 2.0),
                       lambda w: delta * (1.0 - w) * math.log1p(-w) * w ** (delta - 2.0))


def _h2_quad(delta):
    return _split_quad(lambda v: delta * v * math.log(v) ** 2 * (1.0 - v) ** (delta - 3.0),
                       lambda w: delta * (1.0 - w) * math.log1p(-w) ** 2 * w ** (delta - 3.0))


def h1(delta):
    """phi * E[Y^phi log Y / (1 - Y^phi)]; removable pole at delta = 1."""
    d = np.atleast_1d(np.asarray(delta, dtype=float))
    near = np.abs(d - 1.0) < POLE_TOL
    safe = np.where(near, 3.0, d)
    out = (PSI_2 - digamma(safe + 1.0)) / (safe - 1.0)
    for i in np.flatnonzero(near):
        out[i] = _h1_quad(d[i])
    return float(out[0]) if np.ndim(delta) == 0 else out


def h2(delta):
    """phi^2 * E[Y^phi log^2 Y / (1 - Y^phi)^2]; removable poles at delta = 1, 2."""
    d = np.atleast_1d(np.asarray(delta, dtype=float))
    near = (np.abs(d - 1.0) < POLE_TOL) | (np.abs(d - 2.0) < POLE_TOL)
    safe = np.where(near, 3.0, d)
    num = (PSI_2 - digamma(safe)) ** 2 + TRIGAMMA_2 - trigamma(safe)
    out = safe * num / ((safe - 1.0) * (safe - 2.0))
    for i in np.flatnonzero(near):
        out[i] = _h2_quad(d[i])
    return float(out[0]) if np.ndim(delta) == 0 else out


def lemma1_expectation(mu, phi):
    """E[log(1 - Y^phi)] for Y ~ K(mu, phi); equals -1/delta."""
    return -1.0 / delta_from_mu(mu, phi)


def lemma2_expectations(mu, phi):
    """(E[Y^phi log Y/(1-Y^phi)], E[Y^phi log^2 Y/(1-Y^phi)^2]) for Y ~ K(mu, phi).

    Closed forms in digamma/trigamma of delta. The second one is
    ``delta F / ((delta-1)(delta-2) phi^2)`` with
    ``F = psi(delta)[psi(delta) + 2(kappa-1)] - psi'(delta) + pi^2/6 + kappa^2 - 2 kappa``;
    near the removable poles delta in {1, 2} quadrature is used instead.
    """
    d = delta_from_mu(mu, phi)
    return h1(d) / phi, h2(d) / phi ** 2


# -- evaluation core --------------------------------------------------------------

class Prepared:
    """Parameter-free data transforms reused across likelihood evaluations."""

    def __init__(self, spec: KarmaSpec, data: SeriesData):
        if data.n <= spec.m:
            raise ValueError(f"series of length {data.n} is too short for m = {spec.m}")
        self.spec = spec
        self.data = data
        self.y_all = unit_series(spec, data)
        self.gy = _g_array(spec.link.code, self.y_all)
        self.X = data.X
        m = spec.m
        self.y = self.y_all[m:]
        self.log_y = np.log(self.y)
        self.n_eff = data.n - m
        self.log_width = math.log(spec.bounds.width)


def _prepare(spec, data):
    return data if isinstance(data, Prepared) else Prepared(spec, data)


@dataclass
class _State:
    filt: FilterOutput
    mu: np.ndarray
    ok: bool


def _run_filter(prep: Prepared, params: ParamVector) -> _State:
    spec = prep.spec
    filt = _filter_from_gy(spec, params, prep.gy, prep.X)
    mu = filt.mu[spec.m:]
    eta = filt.eta[spec.m:]
    ok = bool(np.all(np.isfinite(eta)) and np.all(mu > EPS) and np.all(mu < 1.0 - EPS))
    return _State(filt, mu, ok)


def _terms(prep: Prepared, mu, phi):
    with np.errstate(divide="ignore", invalid="ignore", over="ignore", under="ignore"):
        log_mu = np.log(mu)
        mu_phi = np.exp(phi * log_mu)
        L = np.log1p(-mu_phi)
        delta = LOG_HALF / L
        y_phi = np.exp(phi * prep.log_y)
        Ly = np.log1p(-y_phi)
    return log_mu, mu_phi, L, delta, y_phi, Ly


def _loglik_terms(prep, mu, phi, delta, Ly):
    return (math.log(phi) - prep.log_width + np.log(delta)
            + (phi - 1.0) * prep.log_y + (delta - 1.0) * Ly)


def eta_derivatives(spec: KarmaSpec, params: ParamVector, prep, filt: FilterOutput):
    """(n - m) x (s - 1) matrix of d eta_t / d(alpha, beta, phi_ar, theta), t > m."""
    n, m = prep.data.n, spec.m
    X, gy, r = prep.X, prep.gy, filt.r_err
    xb = covariate_effect(X, params.beta)
    t = np.arange(m, n)
    cols = [np.ones(n - m)]
    for l in range(spec.r):
        c = X[t, l].copy()
        for i in range(spec.p):
            c -= params.phi_ar[i] * X[t - 1 - i, l]
        cols.append(c)
    for i in range(spec.p):
        cols.append(gy[t - 1 - i] - xb[t - 1 - i])
    for j in range(spec.q):
        cols.append(r[t - 1 - j])
    A = np.column_stack(cols)
    if spec.q:
        A = lfilter([1.0], np.concatenate([[1.0], params.theta]), A, axis=0)
    return A


def loglik(spec: KarmaSpec, params: ParamVector, data) -> float:
    """Conditional log-likelihood sum_{t>m} l_t; -inf when the recursion leaves (0, 1)."""
    prep = _prepare(spec, data)
    params.check(spec)
    st = _run_filter(prep, params)
    if not st.ok:
        return -math.inf
    phi = params.precision
    _, _, _, delta, _, Ly = _terms(prep, st.mu, phi)
    with np.errstate(all="ignore"):
        val = float(np.sum(_loglik_terms(prep, st.mu, phi, delta, Ly)))
    return val if np.isfinite(val) else -math.inf


def loglik_and_score(spec: KarmaSpec, params: ParamVector, data):
    """Log-likelihood and analytic score in one pass (score is NaN when ll is -inf)."""
    prep = _prepare(spec, data)
    params.check(spec)
    st = _run_filter(prep, params)
    s = spec.n_params
    if not st.ok:
        return -math.inf, np.full(s, np.nan)
    phi = params.precision
    mu = st.mu
    log_mu, mu_phi, L, delta, y_phi, Ly = _terms(prep, mu, phi)
    with np.errstate(all="ignore"):
        ll = float(np.sum(_loglik_terms(prep, mu, phi, delta, Ly)))
        A = np.exp((phi - 1.0) * log_mu) / ((1.0 - mu_phi) * L)
        c = A * (1.0 + delta * Ly)
        T = 1.0 / _gprime_array(spec.link.code, mu)
        D = eta_derivatives(spec, params, prep, st.filt)
        u = np.empty(s)
        u[:-1] = D.T @ (phi * c * T)
        u[-1] = np.sum(1.0 / phi + prep.log_y + c * mu * log_mu
                       - (delta - 1.0) * y_phi * prep.log_y / (1.0 - y_phi))
    if not (np.isfinite(ll) and np.all(np.isfinite(u))):
        return -math.inf, np.full(s, np.nan)
    return ll, u


def score(spec: KarmaSpec, params: ParamVector, data) -> np.ndarray:
    """Score vector ordered (alpha, beta, phi_ar, theta, precision)."""
    return loglik_and_score(spec, params, data)[1]


@dataclass(frozen=True)
class AuxQuantities:
    mu: np.ndarray
    delta_t: np.ndarray
    c_t: np.ndarray
    lambda1: np.ndarray
    lambda2: np.ndarray
    w_t: np.ndarray
    d_t: np.ndarray
    info_phi_phi: np.ndarray
    T: np.ndarray
    D: np.ndarray


def aux_quantities(spec: KarmaSpec, params: ParamVector, data) -> AuxQuantities:
    """Per-observation pieces of the score and information, t = m+1..n."""
    prep = _prepare(spec, data)
    params.check(spec)
    st = _run_filter(prep, params)
    if not st.ok:
        raise FloatingPointError("conditional median left (0, 1); information is undefined here")
    phi = params.precision
    mu = st.mu
    log_mu, mu_phi, L, delta, y_phi, Ly = _terms(prep, mu, phi)
    A = np.exp((phi - 1.0) * log_mu) / ((1.0 - mu_phi) * L)
    lam1 = A / mu
    lam2 = A * A
    c = A * (1.0 + delta * Ly)
    e1 = h1(delta)
    # (delta - 1) * h2 has only the removable pole at delta = 2
    e2 = (delta - 1.0) * h2(delta)
    w = -phi ** 2 * lam2
    d = -(delta * A * e1 + phi * mu * log_mu * lam2)
    i_pp = (1.0 / phi ** 2 + e2 / phi ** 2 + 2.0 * delta * mu * A * log_mu * e1 / phi
            + (mu * log_mu) ** 2 * lam2)
    T = 1.0 / _gprime_array(spec.link.code, mu)
    D = eta_derivatives(spec, params, prep, st.filt)
    return AuxQuantities(mu=mu, delta_t=delta, c_t=c, lambda1=lam1, lambda2=lam2, w_t=w,
                         d_t=d, info_phi_phi=i_pp, T=T, D=D)


@dataclass(frozen=True)
class FisherInfo:
    K: np.ndarray
    min_eigenvalue: float

    @property
    def is_singular(self) -> bool:
        return not self.min_eigenvalue > 0

    def inverse(self) -> np.ndarray:
        if self.is_singular:
            raise np.linalg.LinAlgError(
                f"Fisher information is not positive definite (min eigenvalue {self.min_eigenvalue:.3g})")
        return np.linalg.inv(self.K)


def fisher(spec: KarmaSpec, params: ParamVector, data) -> FisherInfo:
    """Conditional (expected) Fisher information, symmetric by construction."""
    aux = aux_quantities(spec, params, data)
    s = spec.n_params
    D, T = aux.D, aux.T
    K = np.empty((s, s))
    K[:-1, :-1] = D.T @ ((-aux.w_t * T * T)[:, None] * D)
    K[:-1, -1] = -(D.T @ (aux.d_t * T))
    K[-1, :-1] = K[:-1, -1]
    K[-1, -1] = np.sum(aux.info_phi_phi)
    K = 0.5 * (K + K.T)
    min_eig = float(np.linalg.eigvalsh(K)[0]) if np.all(np.isfinite(K)) else -math.inf
    return FisherInfo(K=K, min_eigenvalue=min_eig)

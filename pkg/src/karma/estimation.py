"""Conditional maximum likelihood fitting and Wald inference."""
import logging
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize, stats

from .inference import Prepared, fisher, loglik, loglik_and_score
from .model import KarmaSpec, ParamVector, SeriesData

logger = logging.getLogger(__name__)


@dataclass
class FitOptions:
    gtol: float = 1e-6
    max_iter: int = 500
    precision_start: float = 3.0
    # Fisher-scoring steps applied when BFGS stops short of gtol
    polish_steps: int = 20


@dataclass
class FitResult:
    spec: KarmaSpec
    estimates: ParamVector
    vcov: np.ndarray
    loglik_hat: float
    std_errors: np.ndarray
    z_stats: np.ndarray
    p_values: np.ndarray
    converged: bool
    iterations: int
    residuals_quantile: np.ndarray
    mu_fitted: np.ndarray
    score_at_estimate: np.ndarray
    fisher_min_eigenvalue: float
    loglik_start: float
    message: str = ""
    n_obs: int = 0
    names: list = field(default_factory=list)

    @property
    def n_eff(self) -> int:
        return self.n_obs - self.spec.m

    @property
    def fisher_singular(self) -> bool:
        return not self.fisher_min_eigenvalue > 0

    @property
    def criteria(self) -> dict:
        from .diagnostics import information_criteria
        aic, sic, hq = information_criteria(self.loglik_hat, self.spec.n_params, self.n_eff)
        return {"aic": aic, "sic": sic, "hq": hq}

    def table(self) -> list:
        """Rows (name, estimate, std error, z, p) in parameter order."""
        est = self.estimates.to_array()
        return [(nm, est[i], self.std_errors[i], self.z_stats[i], self.p_values[i])
                for i, nm in enumerate(self.names)]


def _ols_design(spec: KarmaSpec, gy: np.ndarray, X: np.ndarray):
    n, m = gy.size, spec.m
    t = np.arange(m, n)
    cols = [np.ones(n - m)] + [X[t, l] for l in range(spec.r)]
    cols += [gy[t - 1 - i] for i in range(spec.p)]
    return np.column_stack(cols), gy[m:]


def init_params(spec: KarmaSpec, data, precision_start: float = 3.0) -> ParamVector:
    """Starting values: OLS of g(y_t) on (1, x_t, g(y_{t-1}), ..., g(y_{t-p})); theta = 0."""
    prep = data if isinstance(data, Prepared) else Prepared(spec, data)
    Z, resp = _ols_design(spec, prep.gy, prep.X)
    coef, _, rank, _ = np.linalg.lstsq(Z, resp, rcond=None)
    if rank < Z.shape[1] or not np.all(np.isfinite(coef)):
        logger.warning("rank-deficient OLS design; starting from the sample median")
        coef = np.zeros(Z.shape[1])
        coef[0] = float(np.median(prep.gy[spec.m:]))
    r = spec.r
    return ParamVector(alpha=coef[0], beta=coef[1:1 + r], phi_ar=coef[1 + r:],
                       theta=np.zeros(spec.q), precision=precision_start)


def _to_free(x):
    z = x.copy()
    z[-1] = math.log(x[-1])
    return z


def _from_free(z):
    x = z.copy()
    x[-1] = math.exp(z[-1])
    return x


def fit(spec: KarmaSpec, data: SeriesData, options: FitOptions = None) -> FitResult:
    """Maximize the conditional log-likelihood by BFGS with the analytic score.

    The precision is optimized on the log scale. The start is the OLS
    estimate from :func:`init_params`, and the initial inverse Hessian is the
    inverse Fisher information there. If BFGS stops before ``max|score| < gtol``,
    a few Fisher-scoring steps finish the job. A fit that still misses the
    tolerance is returned with ``converged=False``.
    """
    opts = options or FitOptions()
    prep = Prepared(spec, data)
    if prep.n_eff <= spec.n_params:
        raise ValueError(f"need n - m > {spec.n_params} observations, got {prep.n_eff}")
    start = init_params(spec, prep, opts.precision_start)
    ll0 = loglik(spec, start, prep)
    s = spec.n_params

    def objective(z):
        x = _from_free(z)
        ll, u = loglik_and_score(spec, ParamVector.from_array(spec, x), prep)
        if not np.isfinite(ll):
            return math.inf, np.zeros(s)
        g = -u
        g[-1] *= x[-1]
        return -ll, g

    z0 = _to_free(start.to_array())
    bfgs_opts = {"gtol": opts.gtol, "maxiter": opts.max_iter}
    try:
        K0 = fisher(spec, start, prep)
        if not K0.is_singular:
            J = np.ones(s)
            J[-1] = start.precision
            H0 = np.linalg.inv(K0.K * np.outer(J, J))
            H0 = 0.5 * (H0 + H0.T)
            if np.linalg.eigvalsh(H0)[0] > 0:
                bfgs_opts["hess_inv0"] = H0
    except (FloatingPointError, np.linalg.LinAlgError):
        pass
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        res = optimize.minimize(objective, z0, jac=True, method="BFGS", options=bfgs_opts)
    x = _from_free(res.x)
    iterations = int(res.nit)
    best = ParamVector.from_array(spec, x)
    ll, u = loglik_and_score(spec, best, prep)
    if not np.isfinite(ll) or ll < ll0:
        best, (ll, u) = start, loglik_and_score(spec, start, prep)
    message = str(res.message)

    steps = 0
    while steps < opts.polish_steps and not (np.max(np.abs(u)) < opts.gtol):
        try:
            info = fisher(spec, best, prep)
            step = np.linalg.solve(info.K, u)
        except (FloatingPointError, np.linalg.LinAlgError):
            break
        x = best.to_array()
        t = 1.0
        while t > 1e-8:
            cand = x + t * step
            if cand[-1] > 0:
                pv = ParamVector.from_array(spec, cand)
                ll_c, u_c = loglik_and_score(spec, pv, prep)
                if np.isfinite(ll_c) and ll_c >= ll - 1e-10 * max(1.0, abs(ll)):
                    break
            t *= 0.5
        else:
            break
        best, ll, u = pv, ll_c, u_c
        steps += 1
    if steps:
        message += f"; {steps} Fisher-scoring refinement step(s)"
    converged = bool(np.max(np.abs(u)) < opts.gtol)
    return _finish(spec, prep, best, ll, u, converged, iterations + steps, message, ll0)


def _finish(spec, prep, est, ll, u, converged, iterations, message, ll0):
    from .diagnostics import quantile_residuals
    from .model import _filter_from_gy

    s = spec.n_params
    try:
        info = fisher(spec, est, prep)
        min_eig = info.min_eigenvalue
        vcov = info.inverse() if not info.is_singular else np.full((s, s), np.nan)
    except (FloatingPointError, np.linalg.LinAlgError):
        min_eig, vcov = -math.inf, np.full((s, s), np.nan)
    with np.errstate(invalid="ignore"):
        se = np.sqrt(np.diag(vcov))
    z = est.to_array() / se
    pvals = 2.0 * stats.norm.sf(np.abs(z))
    mu = _filter_from_gy(spec, est, prep.gy, prep.X).mu
    resid = quantile_residuals(spec, mu, prep.data, est.precision)
    return FitResult(spec=spec, estimates=est, vcov=vcov, loglik_hat=float(ll), std_errors=se,
                     z_stats=z, p_values=pvals, converged=converged, iterations=iterations,
                     residuals_quantile=resid, mu_fitted=mu, score_at_estimate=u,
                     fisher_min_eigenvalue=min_eig, loglik_start=ll0, message=message,
                     n_obs=prep.data.n, names=spec.param_names())


def confidence_intervals(fit: FitResult, level: float = 0.95) -> np.ndarray:
    """Wald intervals, one (lower, upper) row per parameter."""
    if not 0 < level < 1:
        raise ValueError("level must lie in (0, 1)")
    zq = stats.norm.ppf(0.5 + level / 2.0)
    est = fit.estimates.to_array()
    half = zq * fit.std_errors
    return np.column_stack([est - half, est + half])


def wald_z(fit: FitResult, index: int, null_value: float = 0.0):
    """Signed root Wald statistic for H0: gamma_index = null_value and its two-sided p-value."""
    est = fit.estimates.to_array()[index]
    z = (est - null_value) / fit.std_errors[index]
    return float(z), float(2.0 * stats.norm.sf(abs(z)))

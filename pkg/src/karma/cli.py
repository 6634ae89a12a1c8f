"""Command-line front end: ``karma {fit,forecast,simulate,mc,diagnose}``."""
import argparse
import json
import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .diagnostics import acf, diagnose, ljung_box, pacf
from .estimation import FitOptions, fit
from .forecast import forecast, holdout_metrics
from .io import CsvError, harmonic_covariates, load_csv, write_columns, write_csv
from .kuma import Bounds
from .links import Link
from .mc import McConfig, run_study, karma22_config, karma11_config
from .model import KarmaSpec, ParamVector, SeriesData, burn_in_length, simulate

logger = logging.getLogger("karma")

COMMANDS = ("fit", "forecast", "simulate", "mc", "diagnose")


@dataclass
class CliConfig:
    command: str
    input_path: str = None
    p: int = 1
    q: int = 1
    link: str = "logit"
    lower: float = 0.0
    upper: float = 1.0
    harmonic_period: int = None
    horizon: int = 0
    holdout: int = 0
    seed: int = 2017
    output_dir: str = "."
    rescale: float = 1.0
    lags: int = 20
    # simulate
    n: int = 200
    alpha: float = 0.0
    beta: list = field(default_factory=list)
    phi: list = field(default_factory=list)
    theta: list = field(default_factory=list)
    precision: float = 10.0
    # mc
    design: str = "karma11"
    reps: int = 1000
    sizes: tuple = (70, 100, 200, 300)
    jobs: int = 1

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        if not self.lower < self.upper:
            raise ValueError("lower must be below upper")
        if self.p < 0 or self.q < 0:
            raise ValueError("p and q must be non-negative")
        if self.horizon < 0 or self.holdout < 0:
            raise ValueError("horizon and holdout must be non-negative")
        if self.rescale <= 0:
            raise ValueError("rescale must be positive")
        Link.parse(self.link)


def _covariates(cfg: CliConfig, X_file, n_total):
    blocks = [X_file] if X_file is not None and X_file.shape[1] else []
    if cfg.harmonic_period:
        blocks.append(harmonic_covariates(n_total, cfg.harmonic_period))
    return np.hstack(blocks) if blocks else np.zeros((n_total, 0))


def _load(cfg: CliConfig):
    """Series, split into the fitting sample and the withheld tail."""
    if not cfg.input_path:
        raise ValueError(f"{cfg.command} needs --input")
    bounds = Bounds(cfg.lower, cfg.upper)
    data, t = load_csv(cfg.input_path, bounds, cfg.rescale)
    n_fit = data.n - cfg.holdout
    h = max(cfg.horizon, cfg.holdout)
    if cfg.horizon and cfg.horizon < cfg.holdout:
        raise ValueError("horizon must cover the holdout")
    if data.X.shape[1] and h > cfg.holdout:
        raise ValueError("file covariates cannot be extended past the end of the series")
    X = _covariates(cfg, data.X, data.n + h - cfg.holdout)
    if X.shape[1] and np.linalg.matrix_rank(X[:n_fit]) < X.shape[1]:
        raise ValueError("covariate columns are linearly dependent "
                         "(file columns duplicated by --harmonic?)")
    spec = KarmaSpec(p=cfg.p, q=cfg.q, r=X.shape[1], link=Link.parse(cfg.link), bounds=bounds)
    fit_data = SeriesData(data.y_tilde[:n_fit], X[:n_fit])
    return spec, fit_data, data.y_tilde[n_fit:], X[n_fit:], t[:n_fit]


def _fit_report(res, diag):
    crit = res.criteria
    return {
        "model": {"p": res.spec.p, "q": res.spec.q, "r": res.spec.r, "link": res.spec.link.value,
                  "lower": res.spec.bounds.a, "upper": res.spec.bounds.b},
        "n": res.n_obs,
        "n_eff": res.n_eff,
        "parameters": [{"name": nm, "estimate": float(e), "std_error": float(s), "z": float(z),
                        "p_value": float(p)} for nm, e, s, z, p in res.table()],
        "loglik": res.loglik_hat,
        "aic": crit["aic"], "sic": crit["sic"], "hq": crit["hq"],
        "ljung_box": {"lags": diag.lags, "Q": diag.ljung_box_Q, "p_value": diag.ljung_box_p},
        "converged": res.converged,
        "fisher_singular": res.fisher_singular,
        "iterations": res.iterations,
        "message": res.message,
        "vcov": np.where(np.isfinite(res.vcov), res.vcov, None).tolist(),
    }


def format_table(res, diag) -> str:
    """Parameter table followed by criteria and the Ljung-Box line."""
    lines = [f"KARMA({res.spec.p},{res.spec.q}) {res.spec.link.value} link, "
             f"n = {res.n_obs}, conditional on the first {res.spec.m}",
             f"{'Parameter':<12}{'Estimate':>12}{'Std. Error':>12}{'z stat':>10}{'Pr(>|z|)':>10}"]
    for nm, e, s, z, p in res.table():
        lines.append(f"{nm:<12}{e:>12.4f}{s:>12.4f}{z:>10.4f}{p:>10.4f}")
    crit = res.criteria
    lines += ["",
              f"log-lik = {res.loglik_hat:.4f}  AIC = {crit['aic']:.4f}  "
              f"SIC = {crit['sic']:.4f}  HQ = {crit['hq']:.4f}",
              f"Ljung-Box Q({diag.lags}) = {diag.ljung_box_Q:.4f}, p-value = {diag.ljung_box_p:.4f}",
              f"converged: {res.converged} ({res.message})"]
    if res.fisher_singular:
        lines.append("warning: Fisher information is singular; standard errors unavailable")
    return "\n".join(lines) + "\n"


def _write_fit(out: Path, res, t):
    diag = diagnose(res, lags=min(20, res.residuals_quantile.size - 1))
    (out / "fit.json").write_text(json.dumps(_fit_report(res, diag), indent=2))
    (out / "fit.txt").write_text(format_table(res, diag))
    write_columns(out / "residuals.csv",
                  {"t": t[res.spec.m:], "quantile_residual": res.residuals_quantile})
    lags = np.arange(diag.acf.size)
    write_columns(out / "acf.csv", {"lag": lags, "acf": diag.acf, "pacf": diag.pacf,
                                    "band": np.full(lags.size, diag.band)})
    return diag


def _cmd_fit(cfg, out):
    spec, data, _, _, t = _load(cfg)
    res = fit(spec, data)
    diag = _write_fit(out, res, t)
    print(format_table(res, diag), end="")
    return 0 if res.converged else 3


def _cmd_forecast(cfg, out):
    spec, data, y_hold, X_future, t = _load(cfg)
    h0 = max(cfg.horizon, cfg.holdout)
    res = fit(spec, data)
    _write_fit(out, res, t)
    fc = forecast(spec, res, data, X_future=X_future, h0=h0)
    write_columns(out / "forecast.csv", {"h": np.arange(1, h0 + 1), "mu_hat": fc.mu_hat_future,
                                         "y_hat": fc.y_tilde_hat})
    report = {"horizon": h0, "mu_hat": fc.mu_hat_future.tolist(), "y_hat": fc.y_tilde_hat.tolist(),
              "holdout": None}
    if cfg.holdout:
        k = cfg.holdout
        # headline metrics on the rescaled (0, 1) series; MAPE as a proportion
        mse, mape = holdout_metrics(spec.bounds.to_unit(y_hold), fc.mu_hat_future[:k])
        mse_o, mape_o = holdout_metrics(y_hold, fc.y_tilde_hat[:k])
        report["holdout"] = {"n": k, "actual": y_hold.tolist(), "mse": mse, "mape": mape,
                             "mse_original": mse_o, "mape_original": mape_o}
        print(f"{'':<6}{'MSE':>12}{'MAPE':>12}")
        print(f"{'KARMA':<6}{mse:>12.4f}{mape:>12.4f}")
    (out / "forecast.json").write_text(json.dumps(report, indent=2))
    for h, v in enumerate(fc.y_tilde_hat, start=1):
        print(f"h={h:<3d} y_hat={v:.6g}")
    return 0


def _cmd_simulate(cfg, out):
    bounds = Bounds(cfg.lower, cfg.upper)
    r = 2 if cfg.harmonic_period else 0
    spec = KarmaSpec(p=cfg.p, q=cfg.q, r=r, link=Link.parse(cfg.link), bounds=bounds)
    params = ParamVector(cfg.alpha, cfg.beta, cfg.phi, cfg.theta, cfg.precision)
    params.check(spec)
    X = None
    if r:
        # the burn-in occupies t = 1 - n0 .. 0, so output row t carries harmonic t
        n0 = burn_in_length(spec)
        X = harmonic_covariates(n0 + cfg.n, cfg.harmonic_period, start=1 - n0)
    data = simulate(spec, params, cfg.n, X=X, seed=cfg.seed)
    write_csv(out / "series.csv", data)
    print(f"wrote {data.n} observations to {out / 'series.csv'}")
    return 0


def _cmd_mc(cfg, out):
    make = {"karma22": karma22_config, "karma11": karma11_config}[cfg.design]
    mc_cfg: McConfig = make(replications=cfg.reps, seed=cfg.seed, sample_sizes=cfg.sizes)

    def progress(n, row, failed):
        logger.info("n=%d done: %d used, %d failed", n, row["used"], failed)

    rep = run_study(mc_cfg, n_jobs=cfg.jobs, progress=progress)
    (out / "mc_report.csv").write_text(rep.to_csv())
    (out / "mc_report.md").write_text(rep.to_markdown())
    (out / "mc_report.json").write_text(rep.to_json())
    print(rep.to_markdown(), end="")
    return 0


def _cmd_diagnose(cfg, out):
    """ACF/PACF and Ljung-Box of the series itself, for order identification."""
    bounds = Bounds(cfg.lower, cfg.upper)
    data, _ = load_csv(cfg.input_path, bounds, cfg.rescale)
    y = bounds.to_unit(data.y_tilde)
    h = min(cfg.lags, y.size - 1)
    a, pa = acf(y, h), pacf(y, h)
    band = 1.96 / math.sqrt(y.size)
    write_columns(out / "acf.csv", {"lag": np.arange(h + 1), "acf": a, "pacf": pa,
                                    "band": np.full(h + 1, band)})
    q, pv = ljung_box(y, h)
    (out / "diagnose.json").write_text(json.dumps(
        {"n": int(y.size), "acf": a.tolist(), "pacf": pa.tolist(), "band": band,
         "ljung_box": {"lags": h, "Q": q, "p_value": pv}}, indent=2))
    print(f"{'lag':>4}{'acf':>10}{'pacf':>10}")
    for j in range(1, h + 1):
        print(f"{j:>4}{a[j]:>10.4f}{pa[j]:>10.4f}")
    print(f"Ljung-Box Q({h}) = {q:.4f}, p-value = {pv:.4g}")
    return 0


_HANDLERS = {"fit": _cmd_fit, "forecast": _cmd_forecast, "simulate": _cmd_simulate,
             "mc": _cmd_mc, "diagnose": _cmd_diagnose}


def run(config: CliConfig) -> int:
    """Execute one command; returns the process exit code."""
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return _HANDLERS[config.command](config, out)


def _floats(s):
    return [float(v) for v in s.split(",") if v.strip()] if s else []


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="karma", description="Kumaraswamy ARMA modelling")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", dest="input_path", help="CSV with header t,y[,x1,...]")
    common.add_argument("--p", type=int, default=1)
    common.add_argument("--q", type=int, default=1)
    common.add_argument("--link", default="logit", choices=[l.value for l in Link])
    common.add_argument("--lower", type=float, default=0.0)
    common.add_argument("--upper", type=float, default=1.0)
    common.add_argument("--rescale", type=float, default=1.0, help="divide y by this on input")
    common.add_argument("--harmonic", dest="harmonic_period", type=int, default=None,
                        help="append sin/cos covariates with this period")
    common.add_argument("--horizon", type=int, default=0)
    common.add_argument("--holdout", type=int, default=0)
    common.add_argument("--seed", type=int, default=2017)
    common.add_argument("--reps", type=int, default=1000)
    common.add_argument("--out", dest="output_dir", default=".")
    common.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("fit", parents=[common], help="fit and write the parameter table")
    sub.add_parser("forecast", parents=[common], help="fit and forecast")
    sp = sub.add_parser("simulate", parents=[common], help="simulate a series")
    sp.add_argument("--n", type=int, default=200)
    sp.add_argument("--alpha", type=float, default=0.0)
    sp.add_argument("--beta", type=_floats, default=[])
    sp.add_argument("--phi", type=_floats, default=None, help="comma separated; length p")
    sp.add_argument("--theta", type=_floats, default=None, help="comma separated; length q")
    sp.add_argument("--precision", type=float, default=10.0)
    mp = sub.add_parser("mc", parents=[common], help="Monte Carlo study")
    mp.add_argument("--design", choices=["karma22", "karma11"], default="karma11")
    mp.add_argument("--sizes", type=lambda s: tuple(int(v) for v in s.split(",")),
                    default=(70, 100, 200, 300))
    mp.add_argument("--jobs", type=int, default=1)
    dp = sub.add_parser("diagnose", parents=[common], help="ACF/PACF of the input series")
    dp.add_argument("--lags", type=int, default=20)
    return ap


def main(argv=None) -> int:
    args = vars(build_parser().parse_args(argv))
    logging.basicConfig(level=logging.INFO if args.pop("verbose") else logging.WARNING,
                        format="%(levelname)s %(message)s")
    if args["command"] == "simulate":
        args["phi"] = args["phi"] if args["phi"] is not None else [0.0] * args["p"]
        args["theta"] = args["theta"] if args["theta"] is not None else [0.0] * args["q"]
    try:
        return run(CliConfig(**args))
    except (CsvError, ValueError, ArithmeticError, np.linalg.LinAlgError, OSError) as exc:
        print(f"karma: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

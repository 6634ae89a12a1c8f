"""Monte Carlo study: repeated simulate -> fit cycles.

Replication ``i`` draws its uniforms from child ``i`` of ``SeedSequence(seed)``
for every sample size, so the series for different ``n`` share their first
observations (common random numbers). Totals are plain sums over
replications, so the report does not depend on completion order.
"""
import csv
import io
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .estimation import FitOptions, fit
from .model import KarmaSpec, ParamVector, simulate

logger = logging.getLogger(__name__)


@dataclass
class McConfig:
    spec: KarmaSpec
    true_params: ParamVector
    sample_sizes: tuple = (70, 100, 200, 300)
    replications: int = 1000
    seed: int = 2017
    fit_options: FitOptions = field(default_factory=FitOptions)

    def __post_init__(self):
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        for n in self.sample_sizes:
            if n - self.spec.m <= self.spec.n_params:
                raise ValueError(f"sample size {n} too small for {self.spec.n_params} parameters")
        self.true_params.check(self.spec)


def karma22_config(replications=1000, seed=2017, sample_sizes=(70, 100, 200, 300)) -> McConfig:
    """KARMA(2,2) design: alpha=0.5, phi=(0.5,-0.3), theta=(0.4,0.15), precision=15."""
    return McConfig(KarmaSpec(p=2, q=2),
                    ParamVector(0.5, [], [0.5, -0.3], [0.4, 0.15], 15.0),
                    tuple(sample_sizes), replications, seed)


def karma11_config(replications=1000, seed=2017, sample_sizes=(70, 100, 200, 300)) -> McConfig:
    """KARMA(1,1) design: alpha=-1, phi=-0.5, theta=0.25, precision=10."""
    return McConfig(KarmaSpec(p=1, q=1),
                    ParamVector(-1.0, [], [-0.5], [0.25], 10.0),
                    tuple(sample_sizes), replications, seed)


@dataclass
class ReplicateSet:
    """Raw per-replication output for one sample size."""

    n: int
    estimates: np.ndarray
    std_errors: np.ndarray
    converged: np.ndarray


@dataclass
class McReport:
    names: list
    truth: np.ndarray
    replications: int
    rows: dict
    failures: dict
    replicates: dict

    def stats(self, n):
        return self.rows[n]

    def to_rows(self):
        out = []
        for n, st in self.rows.items():
            for k, nm in enumerate(self.names):
                out.append({"n": n, "parameter": nm, "truth": self.truth[k], "mean": st["mean"][k],
                            "rb_percent": st["rb_percent"][k], "mse": st["mse"][k],
                            "used": st["used"], "failures": self.failures[n]})
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        rows = self.to_rows()
        w = csv.DictWriter(buf, fieldnames=list(rows[0]))
        w.writeheader()
        w.writerows(rows)
        return buf.getvalue()

    def to_markdown(self) -> str:
        head = "| | " + " | ".join(self.names) + " |"
        lines = [head, "|" + "---|" * (len(self.names) + 1),
                 "| Parameter | " + " | ".join(f"{v:.4f}" for v in self.truth) + " |"]
        for n, st in self.rows.items():
            lines.append(f"| **n = {n}** (used {st['used']}, failed {self.failures[n]}) |"
                         + " |" * len(self.names))
            for key, label in (("mean", "Mean"), ("rb_percent", "RB (%)"), ("mse", "MSE")):
                lines.append(f"| {label} | " + " | ".join(f"{v:.4f}" for v in st[key]) + " |")
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        return json.dumps({"names": self.names, "truth": list(map(float, self.truth)),
                           "replications": self.replications,
                           "failures": {str(k): v for k, v in self.failures.items()},
                           "rows": self.to_rows()}, indent=2)


def _one(args):
    spec, params, n, seed_seq, opts = args
    data = simulate(spec, params, n, seed=np.random.default_rng(seed_seq))
    try:
        res = fit(spec, data, opts)
    except (ValueError, FloatingPointError, np.linalg.LinAlgError) as exc:
        logger.debug("fit failed: %s", exc)
        s = spec.n_params
        return np.full(s, np.nan), np.full(s, np.nan), False
    return res.estimates.to_array(), res.std_errors, res.converged


def summarize(estimates, converged, truth):
    est = estimates[converged]
    mean = est.mean(axis=0)
    return {"mean": mean, "rb_percent": 100.0 * (mean - truth) / truth,
            "mse": ((est - truth) ** 2).mean(axis=0), "used": int(converged.sum())}


def run_study(config: McConfig, n_jobs: int = 1, progress=None) -> McReport:
    """Simulate, fit and aggregate; non-converged fits are excluded and counted."""
    spec, truth_pv = config.spec, config.true_params
    truth = truth_pv.to_array()
    children = np.random.SeedSequence(config.seed).spawn(config.replications)
    rows, failures, reps = {}, {}, {}
    for n in config.sample_sizes:
        jobs = [(spec, truth_pv, n, children[i], config.fit_options)
                for i in range(config.replications)]
        if n_jobs == 1:
            out = [_one(j) for j in jobs]
        else:
            with ProcessPoolExecutor(max_workers=n_jobs) as ex:
                out = list(ex.map(_one, jobs, chunksize=max(1, len(jobs) // (4 * n_jobs))))
        est = np.array([o[0] for o in out])
        se = np.array([o[1] for o in out])
        conv = np.array([o[2] for o in out], dtype=bool)
        reps[n] = ReplicateSet(n, est, se, conv)
        failures[n] = int((~conv).sum())
        rows[n] = summarize(est, conv, truth)
        if progress:
            progress(n, rows[n], failures[n])
    return McReport(names=spec.param_names(), truth=truth, replications=config.replications,
                    rows=rows, failures=failures, replicates=reps)

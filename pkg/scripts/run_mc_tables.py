"""Reproduce the two Monte Carlo tables (KARMA(2,2) and KARMA(1,1) designs).

    python3 scripts/run_mc_tables.py --reps 1000 --jobs 4 --out results/mc
"""
import argparse
import logging
from pathlib import Path

import numpy as np

from karma.mc import run_study, karma22_config, karma11_config


def coverage(report, n, z=1.959963984540054):
    r = report.replicates[n]
    lo, hi = r.estimates - z * r.std_errors, r.estimates + z * r.std_errors
    return ((lo <= report.truth) & (report.truth <= hi))[r.converged].mean(axis=0)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--reps", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=2017)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", default="results/mc")
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(message)s")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name, make in (("karma22", karma22_config), ("karma11", karma11_config)):
        rep = run_study(make(replications=args.reps, seed=args.seed), n_jobs=args.jobs,
                        progress=lambda n, row, f: logging.info("%s n=%d failed=%d", name, n, f))
        (out / f"{name}.csv").write_text(rep.to_csv())
        (out / f"{name}.json").write_text(rep.to_json())
        md = rep.to_markdown()
        cov = ", ".join(f"{nm} {100 * c:.1f}%" for nm, c in zip(rep.names, coverage(rep, max(rep.rows))))
        md += f"\n95% Wald coverage at n = {max(rep.rows)}: {cov}\n"
        (out / f"{name}.md").write_text(md)
        print(f"## {name}\n\n{md}")


if __name__ == "__main__":
    np.seterr(all="ignore")
    main()

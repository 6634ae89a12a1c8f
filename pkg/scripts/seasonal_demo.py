"""End-to-end run on a synthetic monthly series: simulate, fit with harmonic
covariates, forecast a 12-month holdout, and write every CLI artifact.

    python3 scripts/seasonal_demo.py --out results/seasonal
"""
import argparse
import json
from pathlib import Path

from karma.cli import CliConfig, run
from karma.io import load_csv
from karma.kuma import Bounds


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=300)
    ap.add_argument("--seed", type=int, default=2017)
    ap.add_argument("--out", default="results/seasonal")
    args = ap.parse_args()
    out = Path(args.out)
    common = dict(p=1, q=1, lower=0.0, upper=100.0, harmonic_period=12, seed=args.seed)
    run(CliConfig("simulate", n=args.n + 12, alpha=-0.4, beta=[0.35, -0.25], phi=[0.5],
                  theta=[0.2], precision=12.0, output_dir=str(out), **common))
    data, _ = load_csv(out / "series.csv", Bounds(0.0, 100.0))
    # keep only t,y so the fit regenerates the harmonics itself
    (out / "y.csv").write_text("t,y\n" + "\n".join(
        f"{i + 1},{float(v)!r}" for i, v in enumerate(data.y_tilde)))
    run(CliConfig("forecast", input_path=str(out / "y.csv"), holdout=12, output_dir=str(out),
                  **common))
    print(json.dumps(json.loads((out / "forecast.json").read_text())["holdout"], indent=2))


if __name__ == "__main__":
    main()

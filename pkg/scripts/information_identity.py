"""Compare the analytic conditional Fisher information with the Monte Carlo
second moment of the score at the true parameters (KARMA(1,1) design).

    python3 scripts/information_identity.py --reps 10000 --n 300
"""
import argparse
import math

import numpy as np

from karma.inference import fisher, score
from karma.mc import karma11_config
from karma.model import simulate


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--reps", type=int, default=10_000)
    ap.add_argument("--n", type=int, default=300)
    ap.add_argument("--seed", type=int, default=2017)
    args = ap.parse_args()
    cfg = karma11_config()
    spec, pv = cfg.spec, cfg.true_params
    children = np.random.SeedSequence(args.seed).spawn(args.reps)
    s = spec.n_params
    U = np.empty((args.reps, s))
    K = np.zeros((s, s))
    for i, child in enumerate(children):
        data = simulate(spec, pv, args.n, seed=np.random.default_rng(child))
        U[i] = score(spec, pv, data)
        K += fisher(spec, pv, data).K
    K /= args.reps
    prods = U[:, :, None] * U[:, None, :]
    C = prods.mean(axis=0)
    se = prods.std(axis=0, ddof=1) / math.sqrt(args.reps)
    names = spec.param_names()
    print(f"{'entry':<22}{'K':>12}{'E[UU]':>12}{'rel err':>10}{'MC SE/|K|':>11}{'z':>7}")
    for i in range(s):
        for j in range(i, s):
            print(f"{names[i] + ',' + names[j]:<22}{K[i, j]:>12.3f}{C[i, j]:>12.3f}"
                  f"{abs(C[i, j] - K[i, j]) / abs(K[i, j]):>10.3f}{se[i, j] / abs(K[i, j]):>11.3f}"
                  f"{abs(C[i, j] - K[i, j]) / se[i, j]:>7.2f}")
    print("mean score:", np.round(U.mean(axis=0), 3),
          "+/-", np.round(U.std(axis=0) / math.sqrt(args.reps), 3))


if __name__ == "__main__":
    main()

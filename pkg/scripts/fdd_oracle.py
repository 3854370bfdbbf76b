"""Closed-form joint cdf against the nested Stieltjes oracle and a Monte Carlo estimate.

    python scripts/fdd_oracle.py --dist lack_of_memory --alpha 0.5 --epochs 1,3,4 --thresholds 0.8,1.5,2
"""
import argparse

import numpy as np

from kendall_walk import (FddQuery, SimConfig, fdd_cdf_dp, fdd_cdf_enum, fdd_cdf_stieltjes,
                          make_family, sample_ensemble)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dist", default="uniform")
    ap.add_argument("--alpha", type=float, default=1.0)
    ap.add_argument("--p", type=float, default=None)
    ap.add_argument("--epochs", default="1,3,4")
    ap.add_argument("--thresholds", default="0.8,1.5,2.0")
    ap.add_argument("--cells", default="250,500,1000,2000")
    ap.add_argument("--paths", type=int, default=200_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    params = {} if args.p is None else {"p": args.p}
    d = make_family(args.dist, args.alpha, **params)
    q = FddQuery(tuple(int(v) for v in args.epochs.split(",")),
                 tuple(float(v) for v in args.thresholds.split(",")))
    exact = fdd_cdf_enum(d, q)
    print(f"enum        {exact:.12f}")
    print(f"dp          {fdd_cdf_dp(d, q):.12f}")
    for m in (int(v) for v in args.cells.split(",")):
        plain = fdd_cdf_stieltjes(d, q, cells=m, extrapolate=False)
        rich = fdd_cdf_stieltjes(d, q, cells=m)
        print(f"cells={m:<5d} plain err {abs(plain - exact):.2e}  extrapolated err {abs(rich - exact):.2e}")
    e = sample_ensemble(SimConfig(d, horizon=max(q.epochs), paths=args.paths, seed=args.seed,
                                  record=q.epochs))
    freq = e.joint_frequency(q.epochs, q.thresholds)
    sd = max(np.sqrt(exact * (1 - exact) / args.paths), 1e-300)
    print(f"monte carlo {freq:.6f}  z = {(freq - exact) / sd:+.2f}")


if __name__ == "__main__":
    main()

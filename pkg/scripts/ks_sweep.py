"""Kolmogorov-Smirnov distance of simulated X_n against the exact cdf, across N.

    python scripts/ks_sweep.py --dist uniform --alpha 0.5 --n 5 --paths 1e3,1e4,1e5
"""
import argparse

from kendall_walk import SimConfig, cdf_n, make_family, sample_ensemble
from kendall_walk.validation import ks_statistic, ks_threshold


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dist", default="uniform")
    ap.add_argument("--alpha", type=float, default=1.0)
    ap.add_argument("--p", type=float, default=None)
    ap.add_argument("--n", type=int, default=5)
    ap.add_argument("--paths", default="1e3,1e4,1e5,1e6")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    params = {} if args.p is None else {"p": args.p}
    d = make_family(args.dist, args.alpha, **params)
    print("paths,ks,threshold,sqrtN_ks")
    for N in (int(float(v)) for v in args.paths.split(",")):
        e = sample_ensemble(SimConfig(d, horizon=args.n, paths=N, seed=args.seed))
        ks = ks_statistic(e, lambda t: cdf_n(d, args.n, t))
        print(f"{N},{ks:.5f},{ks_threshold(N):.5f},{ks * N ** 0.5:.3f}")


if __name__ == "__main__":
    main()

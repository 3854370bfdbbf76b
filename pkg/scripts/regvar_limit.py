"""Regularly varying step laws: X_n / a_n against the two candidate limit laws.

The law with r = alpha / (alpha - theta) accounts for the step tail; r = 1
omits it. For ParetoMix(alpha, p) with p < alpha, theta = alpha - p.

    python scripts/regvar_limit.py --alpha 1 --p 0.5 --n 1e2,1e3,1e4,1e5,1e6
"""
import argparse

from kendall_walk import (ParetoMix, RegVar, RegVarWalk, ScaledFddQuery, convergence_diagnostic,
                          fdd_limit_regvar, fdd_zn, norming_sequence)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--alpha", type=float, default=1.0)
    ap.add_argument("--p", type=float, default=0.5)
    ap.add_argument("--n", default="1e2,1e3,1e4,1e5,1e6")
    ap.add_argument("--times", default="0.4,1.0")
    ap.add_argument("--levels", default="0.7,1.9")
    args = ap.parse_args(argv)
    d = ParetoMix(args.alpha, p=args.p)
    theta = d.regvar_theta
    if theta is None:
        ap.error("need p < min(alpha, 1) for a regularly varying tail")
    ns = [int(float(v)) for v in args.n.split(",")]
    walk = convergence_diagnostic(d, ns, law=RegVarWalk(theta, d.alpha))
    rate1 = convergence_diagnostic(d, ns, law=RegVar(theta, d.alpha))
    times = tuple(float(v) for v in args.times.split(","))
    levels = tuple(float(v) for v in args.levels.split(","))
    lim_walk = fdd_limit_regvar(times, levels, d.alpha, theta, include_tail=True)
    lim_rate1 = fdd_limit_regvar(times, levels, d.alpha, theta)
    print(f"theta = {theta:g}")
    print("n,a_n,sup_vs_rate_alpha/(alpha-theta),sup_vs_rate_1,fdd_gap_tail,fdd_gap_no_tail")
    for i, n in enumerate(ns):
        z = fdd_zn(d, ScaledFddQuery(times, levels, n, norming_sequence(d, n)))
        print(f"{n},{walk.a_n[i]:.6g},{walk.sup_distance[i]:.3e},{rate1.sup_distance[i]:.3e},"
              f"{abs(z - lim_walk):.3e},{abs(z - lim_rate1):.3e}")


if __name__ == "__main__":
    main()

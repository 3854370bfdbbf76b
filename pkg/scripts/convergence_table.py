"""Sup distance between the law of X_n / a_n and its limit, for each named family.

    python scripts/convergence_table.py --alpha 1 --n 10,100,1000,10000
"""
import argparse
import math

from kendall_walk import NormingError, convergence_diagnostic
from kendall_walk.asymptotics import default_law
from kendall_walk.validation import _label, named_families


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--alpha", type=float, default=1.0)
    ap.add_argument("--n", default="10,100,1000,10000,100000")
    args = ap.parse_args(argv)
    ns = [int(float(v)) for v in args.n.split(",")]
    print("family,law," + ",".join(f"n={n}" for n in ns))
    for d in named_families(args.alpha):
        method = "closed_form" if math.isfinite(d.alpha_moment) else "numeric"
        law = default_law(d)
        cells = []
        for n in ns:
            try:
                tab = convergence_diagnostic(d, [n], law=law, method=method)
                cells.append(f"{tab.sup_distance[0]:.3e}")
            except NormingError:
                cells.append("n/a")  # n too small for the numeric norming bracket
        cells = ",".join(cells)
        print(f"\"{_label(d)}\",{law.kind},{cells}")


if __name__ == "__main__":
    main()

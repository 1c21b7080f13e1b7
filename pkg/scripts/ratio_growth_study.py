"""Track the eq21 ratio statistic across dyadic truncation levels.

Writes one row per box size N so the growth per doubling (the quantity
that must stay bounded for the estimate to be plausible) can be read off
or plotted.
"""

import argparse
import csv

from modnls import resonance


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--rho", type=float, default=1.0)
    p.add_argument("--s", type=float, default=0.3)
    p.add_argument("--sprime", type=float, default=0.0)
    p.add_argument("--q", type=int, default=1)
    p.add_argument("--sizes", default="4,8,16")
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    args = p.parse_args()

    sizes = [int(tok) for tok in args.sizes.split(",")]
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["N", "ratio", "growth"])
        prev = None
        for N in sizes:
            rep = resonance.estimate_ratio_eq21(
                args.d, args.k, args.rho, args.s, args.sprime, args.q,
                N=N, trials=args.trials, seed=args.seed)
            ratio = rep.max_ratio_over_trials
            growth = "" if prev is None else f"{ratio / prev:.17g}"
            writer.writerow([N, f"{ratio:.17g}", growth])
            print(f"N={N}: ratio {ratio:.4f}" +
                  (f", growth {ratio / prev:.3f}" if prev else ""))
            prev = ratio
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()

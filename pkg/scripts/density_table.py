"""Alpha-density of the range and of the complement for the standard map family.

    python scripts/density_table.py --horizon 1000000 --alphas 0.3333,0.5,1 > table.csv
"""
import argparse
import csv
import sys

from divlab import density, seqmap


def fmt(est):
    if est.kind == density.FINITE:
        return f"{est.value:.4f}"
    return "inf" if est.kind == density.INFINITE else "?"


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--horizon", type=int, default=10**6)
    ap.add_argument("--alphas", default="0.3333,0.5,1")
    ap.add_argument("--tolerance", type=float, default=0.05)
    args = ap.parse_args()
    alphas = [float(a) for a in args.alphas.split(",")]

    w = csv.writer(sys.stdout)
    w.writerow(["map", "alpha", "range", "complement", "verdict"])
    for label, phi in seqmap.standard_generators().items():
        for a in alphas:
            rng_est = density.estimate_delta_alpha(phi, a, args.horizon, args.tolerance)
            verdict = density.is_delta_alpha_dense(phi, a, args.horizon, args.tolerance)
            w.writerow([label, a, fmt(rng_est), fmt(verdict.evidence), verdict.claim])


if __name__ == "__main__":
    main()

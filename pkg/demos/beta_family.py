"""The beta_gamma family of Neyman-Pearson curves and their minimal 0-1 risks, as CSV.

Each beta curve is converted to a risk curve and back again; the last
column reports the round-trip error.
"""

import csv
import sys

import numpy as np

from binexp.curves import beta_from_minLL, beta_gamma, minLL_from_beta

GAMMAS = (0.25, 0.5, 0.75)


def main(points: int = 21) -> None:
    w = csv.writer(sys.stdout)
    w.writerow(["gamma", "x", "beta", "minLL", "round_trip_error"])
    for g in GAMMAS:
        L = lambda p, g=g: minLL_from_beta(lambda a: beta_gamma(g, a), p)
        for x in np.linspace(0.01, 0.99, points):
            b = beta_gamma(g, x)
            err = abs(beta_from_minLL(lambda p: g * p * (1 - p), x) - b)
            w.writerow([g] + [f"{v:.9g}" for v in (x, b, L(x), err)])


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 21)

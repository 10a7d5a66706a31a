"""Lower bounds on KL as a function of the variational divergence V, as CSV.

Columns: the tight explicit bound, the parametric reference curve and the
classical polynomial and logarithmic comparators.
"""

import csv
import sys

import numpy as np

from binexp.bounds import classic_comparators, fedotov_reference, kl_pinsker_explicit


def main(points: int = 40) -> None:
    grid = np.linspace(0.05, 1.95, points)
    names = sorted(classic_comparators(1.0))
    w = csv.writer(sys.stdout)
    w.writerow(["V", "kl_tight", "fedotov"] + names)
    for V in grid:
        comp = classic_comparators(V)
        row = [V, kl_pinsker_explicit(V).value, fedotov_reference(V)] + [comp[n] for n in names]
        w.writerow([f"{x:.9g}" for x in row])


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 40)

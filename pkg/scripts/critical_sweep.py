"""Sweep the entry rate and report where each zone changes curvature.

    python scripts/critical_sweep.py --papers 10000 --step 0.025
"""
import argparse

import numpy as np

from bradford_dynamics.curve import assemble_curve
from bradford_dynamics.model import analytic_zone_params


def sweep(alphas, A):
    rows = []
    for alpha in alphas:
        c = assemble_curve(analytic_zone_params(alpha, A), alpha * A, A)
        z = c.zone_params
        rows.append((alpha, z.k, c.egghe.b * z.T0, *c.signs, c.shape.value))
    return rows


def first_flip(rows, column):
    for prev, cur in zip(rows, rows[1:]):
        if prev[column] < 0 <= cur[column]:
            return 0.5 * (prev[0] + cur[0])
    return None


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--papers", type=float, default=1e4)
    p.add_argument("--start", type=float, default=0.10)
    p.add_argument("--stop", type=float, default=0.40)
    p.add_argument("--step", type=float, default=0.025)
    args = p.parse_args()

    alphas = np.round(np.arange(args.start, args.stop + 1e-9, args.step), 6)
    rows = sweep(alphas, args.papers)
    print(f"{'alpha':>7} {'k':>9} {'b*T0':>9} {'core':>5} {'normal':>7}  shape")
    for alpha, k, bT0, sc, sn, shape in rows:
        print(f"{alpha:7.3f} {k:9.4f} {bT0:9.4f} {sc:5d} {sn:7d}  {shape}")
    print(f"normal zone turns concave-up near alpha = {first_flip(rows, 4):.4f}")
    print(f"core zone turns concave-up near alpha = {first_flip(rows, 3):.4f}")


if __name__ == "__main__":
    main()

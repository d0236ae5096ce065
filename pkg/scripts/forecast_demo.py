"""Build a history from simulated snapshots and forecast a later curve.

Snapshot sizes follow a logistic growth law; each snapshot is the mean of an
ensemble, and the forecast is compared to an independent ensemble.

    python scripts/forecast_demo.py --alpha 0.2 --t-star 6
"""
import argparse
import math

import numpy as np

from bradford_dynamics.pipeline import Snapshot, build_history, forecast
from bradford_dynamics.sim import Constant, SimConfig, run_ensemble


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--alpha", type=float, default=0.2)
    p.add_argument("--capacity", type=float, default=1.2e4)
    p.add_argument("--growth", type=float, default=0.8)
    p.add_argument("--midpoint", type=float, default=4.0)
    p.add_argument("--times", type=float, nargs="+", default=[1, 2, 3, 4, 5, 6])
    p.add_argument("--t-star", type=float, default=6.0)
    p.add_argument("--reps", type=int, default=500)
    args = p.parse_args()

    size = lambda t: round(args.capacity / (1 + math.exp(-args.growth * (t - args.midpoint))))
    snaps = [Snapshot.from_ensemble(t, run_ensemble(SimConfig(Constant(args.alpha), size(t),
                                                              replications=args.reps, master_seed=11)))
             for t in args.times]
    history = build_history(snaps)
    fc = forecast(history, args.t_star)
    print(f"logistic K={history.logistic.K:.1f} r={history.logistic.r:.4f} t0={history.logistic.t0:.4f}")
    print(f"entry law: {history.entry.model}, alpha_s={history.entry.alpha_s:.4f}")
    print(f"forecast t*={fc.t_star}: A={fc.A:.1f} T={fc.T:.1f} T0={fc.T0:.2f} "
          f"A0={fc.A0:.1f} X1={fc.X1:.1f} shape={fc.shape.value} extrapolated={fc.extrapolated}")

    held = run_ensemble(SimConfig(Constant(args.alpha), size(args.t_star),
                                  replications=args.reps, master_seed=99))
    keep = (fc.curve.r >= 2) & (fc.curve.r <= held.mean_cumulative.size)
    truth = held.mean_cumulative[fc.curve.r[keep] - 1]
    err = np.abs(fc.curve.R[keep] - truth) / truth
    print(f"held-out ensemble: mean relative error {err.mean():.4f}, max {err.max():.4f}")


if __name__ == "__main__":
    main()

"""Compare ensembles with and without aging of journal weights.

    python scripts/aging_comparison.py --gamma 1.0 0.99 0.95 --reps 300
"""
import argparse

from bradford_dynamics.sim import Constant, SimConfig, run_ensemble


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--alpha", type=float, default=0.1)
    p.add_argument("--papers", type=int, default=10_000)
    p.add_argument("--reps", type=int, default=300)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--gamma", type=float, nargs="+", default=[1.0, 0.99, 0.95])
    p.add_argument("--threads", type=int, default=1)
    args = p.parse_args()

    print(f"{'gamma':>6} {'T':>9} {'T0':>8} {'A0':>9} {'X1':>9}")
    base = None
    for gamma in args.gamma:
        cfg = SimConfig(Constant(args.alpha), args.papers, decay_gamma=gamma,
                        replications=args.reps, master_seed=args.seed)
        res = run_ensemble(cfg, threads=args.threads)
        base = base or res.mean_X1
        print(f"{gamma:6.3f} {res.mean_T:9.1f} {res.mean_T0:8.2f} {res.mean_A0:9.1f} {res.mean_X1:9.1f}"
              f"  (X1 ratio {res.mean_X1 / base:.3f})")


if __name__ == "__main__":
    main()

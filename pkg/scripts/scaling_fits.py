"""Log-log scaling of the key parameters with the paper count.

Fits ln Y = a + b ln A for Y in (T0, A0, X1), once on the steady-state
formulas and once on ensemble means.

    python scripts/scaling_fits.py --alpha 0.1 --papers 1000 3000 10000 --reps 300
"""
import argparse

from bradford_dynamics.fit import fit_loglog
from bradford_dynamics.model import core_zone_analytic, rho_from_alpha, x1_analytic
from bradford_dynamics.sim import Constant, SimConfig, run_ensemble


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--alpha", type=float, default=0.1)
    p.add_argument("--papers", type=int, nargs="+", default=[1000, 3000, 10_000])
    p.add_argument("--reps", type=int, default=300)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()

    rho = rho_from_alpha(args.alpha)
    analytic = {"T0": [], "A0": [], "X1": []}
    simulated = {"T0": [], "A0": [], "X1": []}
    for A in args.papers:
        T0, A0 = core_zone_analytic(A, rho)
        for key, v in zip(analytic, (T0, A0, x1_analytic(A, rho))):
            analytic[key].append((A, v))
        res = run_ensemble(SimConfig(Constant(args.alpha), A, replications=args.reps, master_seed=args.seed))
        for key, v in zip(simulated, (res.mean_T0, res.mean_A0, res.mean_X1)):
            simulated[key].append((A, v))

    expected = {"T0": 1 / (rho + 1), "A0": 2 / (rho + 1), "X1": 1 / rho}
    print(f"{'param':>5} {'expected':>9} {'analytic':>9} {'simulated':>10}")
    for key in expected:
        a, s = fit_loglog(analytic[key]), fit_loglog(simulated[key])
        print(f"{key:>5} {expected[key]:9.4f} {a.b_rho:9.4f} {s.b_rho:10.4f}")


if __name__ == "__main__":
    main()

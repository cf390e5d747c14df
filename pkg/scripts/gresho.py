"""Gresho vortex: drift of the azimuthal velocity over time.

    python scripts/gresho.py --n 100 --t-end 1
    python scripts/gresho.py --n 400 --t-end 3 --interfaces   # long-running
"""
import argparse

import numpy as np

from ktinterface.core import assemble
from ktinterface.problems import azimuthal_velocity, build_problem, get_problem
from ktinterface.timestepping import Simulation


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=100)
    ap.add_argument("--t-end", type=float, default=1.0)
    ap.add_argument("--interfaces", action="store_true", help="cuts at x = 0.05 and y = 0.05")
    ap.add_argument("--eps", type=float, default=0.0, help="azimuthal perturbation amplitude")
    ap.add_argument("--every", type=int, default=100)
    args = ap.parse_args()
    spec = get_problem("gresho", t_end=args.t_end, params={"perturbation_eps": args.eps})
    domain, model = build_problem(spec, args.n, ((0.05,), (0.05,)) if args.interfaces else ())
    (x, y), f0 = assemble(domain)
    X, Y = np.meshgrid(x, y, indexing="ij")
    u0 = azimuthal_velocity(f0, X, Y)

    def on_sample(t, values):
        u = azimuthal_velocity(assemble(domain, values)[1], X, Y)
        print(f"t={t:7.3f}  relative L1 change of u_phi = "
              f"{np.abs(u - u0).sum() / np.abs(u0).sum():.4f}")

    Simulation(domain, model, theta=spec.theta, cfl=spec.cfl).run(
        spec.t_end, sample_every=args.every, on_sample=on_sample)


if __name__ == "__main__":
    main()

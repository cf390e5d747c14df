"""Lip' convergence with and without interfaces for the 1D problems.

    python scripts/convergence.py advection
    python scripts/convergence.py burgers --t-end 114 --reference exact
"""
import argparse
import math
from pathlib import Path

from ktinterface.diagnostics import conservation_drift, write_convergence_csv
from ktinterface.runner import RunConfig, run_convergence

DEFAULT_INTERFACE = {"advection": 0.5, "burgers": 1.25 * math.pi}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("problem", choices=sorted(DEFAULT_INTERFACE))
    ap.add_argument("--resolutions", type=int, nargs="+", default=[40, 80, 160, 320])
    ap.add_argument("--t-end", type=float)
    ap.add_argument("--reference", default="default", choices=["default", "numeric", "exact"])
    ap.add_argument("--merge-timing", default="stage", choices=["stage", "step"])
    ap.add_argument("--out", default="out/convergence")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for label, ifs in (("single", ()), ("interface", ((DEFAULT_INTERFACE[args.problem],),))):
        cfg = RunConfig(args.problem, resolutions=tuple(args.resolutions), t_end=args.t_end,
                        interfaces=ifs, reference=args.reference, merge_timing=args.merge_timing,
                        sample_every=100)
        rows, (b, p), results = run_convergence(cfg)
        print(f"{args.problem} {label}: error = {b:.4g} dx^{p:.3f}")
        for row, res in zip(rows, results):
            drift = conservation_drift(res.report.series)[1][0]
            print(f"  N={row['N']:5d}  lip'={row['lip_prime']:.4e}  l1={row['l1']:.4e}  "
                  f"relative drift={drift:.2e}")
        write_convergence_csv(out / f"{args.problem}_{label}.csv", rows, p)


if __name__ == "__main__":
    main()

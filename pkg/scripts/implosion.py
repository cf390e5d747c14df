"""Implosion with zero, one and two interfaces; symmetry and difference maps.

    python scripts/implosion.py --n 101
"""
import argparse
import csv
from pathlib import Path

import numpy as np

from ktinterface.runner import RunConfig, compare_results, run_single

LAYOUTS = {"none": (), "one": ((0.15,),), "two": ((0.15,), (0.15,))}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=101, help="odd, so 0.15 is a cell centre")
    ap.add_argument("--t-end", type=float, default=2.5)
    ap.add_argument("--p-outer", type=float, default=1.0)
    ap.add_argument("--out", default="out/implosion")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    runs = {}
    for name, ifs in LAYOUTS.items():
        cfg = RunConfig("implosion", resolutions=(args.n,), t_end=args.t_end, interfaces=ifs,
                        sample_every=10 ** 6, params={"p_outer": args.p_outer})
        runs[name] = run_single(cfg)
        print(f"{name}: {runs[name].report.steps} steps")
    f = runs["none"].field
    print("x<->y asymmetry:", np.max(np.abs(f - f.transpose(1, 0, 2)[..., [0, 2, 1, 3]])))
    x, y = runs["none"].coords
    for name in ("one", "two"):
        cmp = compare_results(runs["none"], runs[name])
        print(f"{name}: L1 difference per component {cmp['l1']}, "
              f"share of |dp| in shock cells {cmp['shock_fraction']:.3f}")
        with open(out / f"pressure_difference_{name}.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x", "y", "dp", "shock_cell"])
            for i, xi in enumerate(x):
                for j, yj in enumerate(y):
                    w.writerow([xi, yj, cmp["pressure_diff"][i, j], int(cmp["shock_mask"][i, j])])


if __name__ == "__main__":
    main()

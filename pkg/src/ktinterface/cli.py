"""Command line: ``ktinterface {run,converge,compare} --config FILE``.

Config files are INI-style.  The ``[run]`` section holds the run keys and
an optional section named after the problem holds problem parameters::

    [run]
    problem = burgers
    resolutions = 40, 80, 160, 320
    interfaces = 3.9269908169872414
    t_end = 2.0

    [burgers]

Exit status: 0 success, 2 configuration error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import json
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .core import ContractViolation, InadmissibleStateError
from .diagnostics import DegenerateFitError, MassDefectError, write_convergence_csv, \
    write_series_csv
from .problems import SetupError
from .runner import RunConfig, run_compare, run_convergence, run_single

OUT_ENV = "KTINTERFACE_OUT"

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


class ConfigError(ValueError):
    pass


def _floats(text):
    text = text.strip()
    if not text or text.lower() in ("none", "off", "[]"):
        return ()
    return tuple(float(t) for t in text.replace(";", ",").split(","))


def _axis_list(text):
    """'0.15' -> ((0.15,),); '0.15 | 0.15' -> ((0.15,), (0.15,))."""
    text = text.strip()
    if text.lower() in ("", "none", "off"):
        return ()
    return tuple(_floats(part) for part in text.split("|"))


def _scalar(text):
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    low = text.strip().lower()
    if low in ("true", "yes", "on"):
        return True
    if low in ("false", "no", "off"):
        return False
    return text.strip()


def load_config(path):
    parser = configparser.ConfigParser()
    if not parser.read(path):
        raise ConfigError(f"cannot read config {path}")
    if "run" not in parser:
        raise ConfigError(f"{path}: missing [run] section")
    run = parser["run"]
    if "problem" not in run:
        raise ConfigError(f"{path}: [run] needs a problem")
    known = {"problem", "resolution", "resolutions", "theta", "cfl", "t_end", "interfaces",
             "merge_timing", "out", "sample_every", "reference", "reference_n",
             "simulate_distributed"}
    unknown = set(run) - known
    if unknown:
        raise ConfigError(f"{path}: unknown keys in [run]: {sorted(unknown)}")
    try:
        kwargs = {"problem": run["problem"].strip()}
        res = run.get("resolutions", run.get("resolution"))
        if res:
            kwargs["resolutions"] = tuple(int(float(r)) for r in _floats(res))
        for key in ("theta", "cfl", "t_end"):
            if key in run:
                kwargs[key] = float(run[key])
        if "interfaces" in run:
            if run["interfaces"].strip().lower() != "default":
                kwargs["interfaces"] = _axis_list(run["interfaces"])
        if "merge_timing" in run:
            kwargs["merge_timing"] = run["merge_timing"].strip()
        if "out" in run:
            kwargs["out_dir"] = run["out"].strip()
        if "sample_every" in run:
            kwargs["sample_every"] = int(run["sample_every"])
        if "reference" in run:
            kwargs["reference"] = run["reference"].strip()
        if "reference_n" in run:
            kwargs["reference_n"] = int(run["reference_n"])
        if "simulate_distributed" in run:
            kwargs["simulate_distributed"] = run.getboolean("simulate_distributed")
        section = kwargs["problem"]
        if section in parser:
            kwargs["params"] = {k: _scalar(v) for k, v in parser[section].items()}
    except ValueError as err:
        raise ConfigError(f"{path}: {err}") from None
    cfg = RunConfig(**kwargs)
    if cfg.merge_timing not in ("stage", "step"):
        raise ConfigError(f"merge_timing must be 'stage' or 'step', got {cfg.merge_timing!r}")
    if cfg.reference not in ("default", "numeric", "exact"):
        raise ConfigError(f"reference must be default, numeric or exact")
    cfg.spec()  # validates the problem name
    return cfg


def apply_overrides(cfg, args):
    changes = {}
    if getattr(args, "theta", None) is not None:
        changes["theta"] = args.theta
    if getattr(args, "cfl", None) is not None:
        changes["cfl"] = args.cfl
    if getattr(args, "merge_timing", None):
        changes["merge_timing"] = args.merge_timing
    if getattr(args, "simulate_distributed", False):
        changes["simulate_distributed"] = True
    out = getattr(args, "out", None) or os.environ.get(OUT_ENV)
    if out:
        changes["out_dir"] = out
    return replace(cfg, **changes)


# -- output --------------------------------------------------------------

def write_fields(path, result):
    names = result.model.variables
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["block_id", "x", "y"] + list(names))
        for bid, block in enumerate(result.domain.blocks):
            v = result.report.values[bid]
            if block.ndim == 1:
                for i, xi in enumerate(block.x):
                    w.writerow([bid, repr(float(xi)), "0.0"] + [repr(float(c)) for c in v[i]])
            else:
                for i, xi in enumerate(block.x):
                    for j, yj in enumerate(block.y):
                        w.writerow([bid, repr(float(xi)), repr(float(yj))]
                                   + [repr(float(c)) for c in v[i, j]])


def write_manifest(path, cfg, extra=None):
    data = {"version": __version__, "config": _jsonable(cfg.resolved())}
    if extra:
        data.update(_jsonable(extra))
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    return obj


def _suffix(cfg, n):
    return f"{cfg.problem}_N{n}"


def write_run(out, cfg, result, tag=None):
    tag = tag or _suffix(cfg, result.n)
    write_fields(out / f"fields_{tag}.csv", result)
    write_series_csv(out / f"diagnostics_{tag}.csv", result.report.series,
                     result.model.variables)
    return tag


def cmd_run(cfg, out):
    ns = cfg.resolutions or (None,)
    summary = {}
    for n in ns:
        result = run_single(cfg, n)
        tag = write_run(out, cfg, result)
        summary[tag] = {"steps": result.report.steps, "dt": result.report.dt,
                        "link_bytes_per_step": result.bytes_per_step}
        print(f"{tag}: {result.report.steps} steps to t={cfg.spec().t_end}")
    write_manifest(out / "manifest.json", cfg, {"runs": summary})


def cmd_converge(cfg, out):
    rows, (b, p), results = run_convergence(cfg)
    for res in results:
        write_run(out, cfg, res)
    write_convergence_csv(out / f"convergence_{cfg.problem}.csv", rows, p)
    for row in rows:
        print(f"N={row['N']:6d} dx={row['dx']:.5g} lip'={row['lip_prime']:.6e} "
              f"l1={row['l1']:.6e}")
    print(f"fit: error = {b:.4g} * dx^{p:.4f}")
    write_manifest(out / "manifest.json", cfg, {"fit": {"b": b, "p": p}})


def cmd_compare(cfg_a, cfg_b, out):
    cmp = run_compare(cfg_a, cfg_b)
    write_run(out, cfg_a, cmp["a"], tag="a")
    write_run(out, cfg_b, cmp["b"], tag="b")
    (coords, diff) = cmp["a"].coords, cmp["diff"]
    names = cmp["a"].model.variables
    with open(out / "difference.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "y"] + [f"d_{n}" for n in names] + ["shock_cell"])
        flat = diff.reshape(-1, diff.shape[-1])
        if len(coords) == 1:
            grid = [(x, 0.0) for x in coords[0]]
        else:
            grid = [(x, y) for x in coords[0] for y in coords[1]]
        mask = cmp["shock_mask"].ravel()
        for (x, y), d, m in zip(grid, flat, mask):
            w.writerow([repr(float(x)), repr(float(y))] + [repr(float(c)) for c in d] + [int(m)])
    for n, v in zip(names, cmp["l1"]):
        print(f"L1 difference {n}: {v:.6e}")
    print(f"fraction of |dp| in shock cells: {cmp['shock_fraction']:.3f}")
    write_manifest(out / "manifest.json", cfg_a,
                   {"compare_with": _jsonable(cfg_b.resolved()),
                    "l1": cmp["l1"], "shock_fraction": cmp["shock_fraction"]})


def build_parser():
    p = argparse.ArgumentParser(prog="ktinterface", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="verb", required=True)
    for verb in ("run", "converge", "compare"):
        s = sub.add_parser(verb)
        s.add_argument("--config", action="append", required=True,
                       help="config file (give two for compare)")
        s.add_argument("--out", help=f"output directory (env {OUT_ENV} also works)")
        s.add_argument("--merge-timing", choices=("stage", "step"))
        s.add_argument("--theta", type=float)
        s.add_argument("--cfl", type=float)
        s.add_argument("--simulate-distributed", action="store_true",
                       help="route interface merges through a byte-counting queue")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfgs = [apply_overrides(load_config(c), args) for c in args.config]
        if args.verb == "compare":
            if len(cfgs) != 2:
                raise ConfigError("compare needs exactly two --config files")
        elif len(cfgs) != 1:
            raise ConfigError(f"{args.verb} takes a single --config")
        out = Path(cfgs[0].out_dir)
        out.mkdir(parents=True, exist_ok=True)
        if args.verb == "run":
            cmd_run(cfgs[0], out)
        elif args.verb == "converge":
            cmd_converge(cfgs[0], out)
        else:
            cmd_compare(cfgs[0], cfgs[1], out)
    except (ConfigError, SetupError, DegenerateFitError) as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except (InadmissibleStateError, MassDefectError, ContractViolation) as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

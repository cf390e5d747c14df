"""Single runs, convergence studies and layout comparisons."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field, replace
from functools import lru_cache
from typing import Optional

import numpy as np

from .core import assemble
from .diagnostics import (fit_convergence, l1_error, lip_prime_error, restrict_average,
                          shock_cell_mask, shock_position, total_variation, total_variation_2d)
from .interface import LinkChannel
from .problems import (SetupError, advection_cell_average, build_problem,
                       burgers_cell_average, burgers_shock_location, get_problem)
from .timestepping import N_STAGES, Simulation


@dataclass
class RunConfig:
    problem: str
    resolutions: tuple = ()
    theta: Optional[float] = None
    cfl: Optional[float] = None
    t_end: Optional[float] = None
    interfaces: Optional[tuple] = None  # None: problem default; (): single block
    merge_timing: str = "stage"
    out_dir: str = "out"
    sample_every: int = 1
    reference: str = "default"  # default | numeric | exact
    reference_n: Optional[int] = None
    simulate_distributed: bool = False
    params: dict = field(default_factory=dict)

    def spec(self):
        changes = {"params": dict(self.params)}
        for key in ("theta", "cfl", "t_end", "reference_n"):
            if getattr(self, key) is not None:
                changes[key] = getattr(self, key)
        spec = get_problem(self.problem, **changes)
        if self.resolutions:
            spec = replace(spec, resolution=int(self.resolutions[0]))
        return spec

    def resolved(self):
        """Config with every problem default filled in (for manifests)."""
        spec = self.spec()
        out = asdict(self)
        out.update(theta=spec.theta, cfl=spec.cfl, t_end=spec.t_end,
                   resolutions=list(self.resolutions or (spec.resolution,)),
                   interfaces=[list(a) for a in (self.interfaces if self.interfaces is not None
                                                 else spec.interfaces)],
                   reference_n=spec.reference_n, params=dict(spec.params))
        return out


@dataclass
class RunResult:
    config: RunConfig
    n: int
    domain: object
    model: object
    report: object
    coords: tuple
    field: np.ndarray
    bytes_per_step: dict

    @property
    def periodic(self):
        return self.config.spec().boundary == "periodic"


def global_tv(domain, periodic):
    def tv(values):
        _, g = assemble(domain, values)
        if g.ndim == 2:
            return total_variation(g, periodic=periodic)
        return total_variation_2d(g, periodic=(periodic, periodic))
    return tv


def run_single(config, n=None, interfaces=None):
    spec = config.spec()
    n = spec.resolution if n is None else int(n)
    if interfaces is None:
        interfaces = config.interfaces
    domain, model = build_problem(spec, n, interfaces)
    channel = LinkChannel() if config.simulate_distributed else None
    sim = Simulation(domain, model, theta=spec.theta, cfl=spec.cfl,
                     merge_timing=config.merge_timing, channel=channel)
    periodic = spec.boundary == "periodic"
    report = sim.run(spec.t_end, sample_every=max(1, int(config.sample_every)),
                     tv_fn=global_tv(domain, periodic))
    coords, g = assemble(domain, report.values)
    per_step = {}
    if channel is not None and report.steps:
        per_step = {k: v / report.steps for k, v in channel.bytes_by_link.items()}
    return RunResult(config, n, domain, model, report, coords, g, per_step)


@lru_cache(maxsize=8)
def _numeric_reference(problem, n, t_end, theta, cfl, params_key):
    cfg = RunConfig(problem=problem, resolutions=(n,), theta=theta, cfl=cfl, t_end=t_end,
                    interfaces=(), sample_every=10 ** 9, params=dict(params_key))
    res = run_single(cfg)
    return res.field[:, 0].copy()


def reference_field(config, x, dx):
    """Reference cell averages on the coarse points ``x``."""
    spec = config.spec()
    kind = config.reference
    if kind == "default":
        kind = "numeric" if spec.reference_n else "exact"
    if kind == "exact":
        if spec.name == "advection":
            return advection_cell_average(x, dx, spec.t_end)
        if spec.name == "burgers":
            return burgers_cell_average(x, dx, spec.t_end)
        raise SetupError(f"no exact solution for {spec.name}")
    n_ref = int(spec.reference_n or 20480)
    n = len(x)
    if n_ref % n:
        raise SetupError(f"reference N={n_ref} is not a multiple of N={n}")
    fine = _numeric_reference(spec.name, n_ref, spec.t_end, spec.theta, spec.cfl,
                              tuple(sorted(spec.params.items())))
    return restrict_average(fine, n_ref // n, periodic=spec.boundary == "periodic")


def run_convergence(config):
    """Lip' and L1 errors per resolution and the fitted power law."""
    spec = config.spec()
    if spec.ndim != 1:
        raise SetupError("convergence studies are 1D only")
    resolutions = config.resolutions or (40, 80, 160, 320)
    if len(resolutions) < 3:
        raise SetupError("a convergence study needs at least three resolutions")
    rows, results = [], []
    periodic = spec.boundary == "periodic"
    for n in resolutions:
        res = run_single(config, n)
        (x,) = res.coords
        dx = (spec.bounds[0][1] - spec.bounds[0][0]) / n
        ref = reference_field(config, x, dx)
        v = res.field[:, 0]
        rows.append({"N": int(n), "dx": dx,
                     "lip_prime": float(lip_prime_error(v, ref, dx, periodic=periodic)),
                     "l1": float(l1_error(v, ref, dx))})
        results.append(res)
    b, p = fit_convergence([(r["dx"], r["lip_prime"]) for r in rows])
    return rows, (b, p), results


def _pressure(model, field):
    return model.pressure(field) if hasattr(model, "pressure") else field[..., 0]


def run_compare(config_a, config_b):
    """Per-cell differences between two layouts of one problem."""
    return compare_results(run_single(config_a), run_single(config_b))


def compare_results(a, b, shock_factor=10.0):
    """Differences, per-component L1 and the share of |dp| in shock cells."""
    if a.field.shape != b.field.shape or any(
            not np.allclose(ca, cb, rtol=0, atol=1e-12) for ca, cb in zip(a.coords, b.coords)):
        raise SetupError("compared runs are on different grids")
    diff = b.field - a.field
    vol = float(np.prod(a.domain.blocks[0].spacing))
    l1 = l1_error(b.field, a.field, vol)
    pa = _pressure(a.model, a.field)
    pb = _pressure(b.model, b.field)
    dp = np.abs(pb - pa)
    mask = shock_cell_mask(pa, shock_factor)
    total = float(dp.sum())
    frac = float(dp[mask].sum() / total) if total > 0 else 1.0
    return {"a": a, "b": b, "diff": diff, "l1": np.atleast_1d(l1), "shock_mask": mask,
            "pressure_diff": pb - pa, "shock_fraction": frac}


def expected_link_bytes_per_step(n_components, n_points=1, merge_timing="stage"):
    """Bytes both sides of one link send per step under the channel protocol."""
    stages = N_STAGES if merge_timing == "stage" else 1
    message = LinkChannel.HEADER.size + 8 * n_components * n_points
    return stages * 2 * message


def shock_location_error(result):
    """Distance of the numerical Burgers shock from the characteristics oracle."""
    spec = result.config.spec()
    (x,) = result.coords
    L = spec.bounds[0][1] - spec.bounds[0][0]
    xs = shock_position(x, result.field[:, 0], period=L)
    exact = burgers_shock_location(spec.t_end)
    d = abs(xs - exact) % L
    return min(d, L - d), xs, exact


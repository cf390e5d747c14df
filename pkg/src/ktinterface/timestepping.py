"""Third-order SSP Runge-Kutta stepping with a fixed dt = cfl * min spacing."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import InadmissibleStateError, check_finite, total_conserved
from .diagnostics import total_variation
from .interface import multiblock_rhs, synchronize

N_STAGES = 3


@dataclass
class StepControl:
    t_end: float
    dt: float
    cfl: float = 0.1
    t: float = 0.0
    steps: int = 0

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")

    @property
    def done(self):
        return self.t >= self.t_end - 1e-12 * max(1.0, abs(self.t_end))

    def next_dt(self):
        """Step to take next; the last one lands exactly on t_end."""
        remaining = self.t_end - self.t
        if remaining <= self.dt * (1 + 1e-12):
            return remaining
        return self.dt

    def advance(self, dt):
        self.steps += 1
        if self.t + dt >= self.t_end - 1e-12 * max(1.0, abs(self.t_end)):
            self.t = self.t_end
        else:
            self.t += dt


def compute_dt(blocks, cfl=0.1):
    return cfl * min(min(b.spacing) for b in blocks)


def ssp_rk3_step(fields, rhs_operator, dt, post_stage_hook=None, t=None):
    """Advance a list of arrays by one SSP-RK3 step.

    ``post_stage_hook(fields, stage)`` runs after each stage update (merges
    belong there).  Returns new arrays; the inputs are not modified.
    """
    u0 = [np.array(f, dtype=float, copy=True) for f in fields]

    def stage(k, current, weight_old, weight_new):
        try:
            rates = rhs_operator(current)
            new = [weight_old * a + weight_new * (b + dt * r)
                   for a, b, r in zip(u0, current, rates)]
            check_finite(new)
            if post_stage_hook is not None:
                post_stage_hook(new, k)
        except InadmissibleStateError as err:
            if err.stage is None:
                err.stage = k
            if err.time is None:
                err.time = t
            raise
        return new

    u1 = stage(0, u0, 0.0, 1.0)
    u2 = stage(1, u1, 0.75, 0.25)
    return stage(2, u2, 1.0 / 3.0, 2.0 / 3.0)


@dataclass
class RunReport:
    """Sampled diagnostics plus the final fields of one run."""

    times: list
    tv: list
    totals: list
    values: list
    steps: int
    dt: float
    link_bytes: dict

    @property
    def series(self):
        return list(zip(self.times, self.tv, self.totals))


class Simulation:
    """Multi-block KT solver driven by SSP-RK3.

    ``merge_timing='stage'`` merges interface copies after every RK stage,
    ``'step'`` only after the full step; ``'off'`` never merges and exists
    to show that the merge is what couples the blocks.
    """

    def __init__(self, domain, model, theta=2.0, cfl=0.1, merge_timing="stage",
                 channel=None, first_order=False):
        if merge_timing not in ("stage", "step", "off"):
            raise ValueError(f"merge_timing must be 'stage' or 'step', got {merge_timing!r}")
        self.domain = domain
        self.model = model
        self.theta = theta
        self.cfl = cfl
        self.merge_timing = merge_timing
        self.channel = channel
        self.first_order = first_order
        self.dt = compute_dt(domain.blocks, cfl)
        self.values = [b.values.copy() for b in domain.blocks]

    def rhs(self, values):
        return multiblock_rhs(self.domain, self.model, self.theta, values,
                              check_sync=self.merge_timing == "stage",
                              first_order=self.first_order)

    def post_stage(self, values, stage):
        if self.merge_timing == "off":
            return
        if self.merge_timing == "stage" or stage == N_STAGES - 1:
            synchronize(self.domain, values, stage, self.channel)

    def step(self, dt, t=None):
        self.values = ssp_rk3_step(self.values, self.rhs, dt, self.post_stage, t)
        return self.values

    def run(self, t_end, sample_every=1, tv_fn=None, on_sample=None):
        """Evolve to ``t_end``; sample TV and totals every ``sample_every`` steps.

        ``tv_fn(values)`` defaults to the per-block componentwise TV sum.
        """
        if tv_fn is None:
            def tv_fn(values):
                return sum(total_variation(v.reshape(-1, v.shape[-1])) for v in values)

        control = StepControl(t_end=t_end, dt=self.dt, cfl=self.cfl)
        times, tvs, totals = [], [], []

        def sample():
            times.append(control.t)
            tvs.append(np.atleast_1d(tv_fn(self.values)))
            totals.append(np.atleast_1d(total_conserved(self.domain.blocks, self.values)))
            if on_sample is not None:
                on_sample(control.t, self.values)

        sample()
        while not control.done:
            dt = control.next_dt()
            self.step(dt, control.t)
            control.advance(dt)
            if control.steps % sample_every == 0 or control.done:
                sample()
        link_bytes = dict(self.channel.bytes_by_link) if self.channel is not None else {}
        for bid, block in enumerate(self.domain.blocks):
            block.values = self.values[bid]
        return RunReport(times, tvs, totals, self.values, control.steps, self.dt, link_bytes)

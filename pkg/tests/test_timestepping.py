import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from ktinterface.core import Block1D, Block2D, EdgeRole, InadmissibleStateError
from ktinterface.diagnostics import total_variation
from ktinterface.models import Euler2D
from ktinterface.problems import Axis, build_domain, build_problem, get_problem
from ktinterface.timestepping import N_STAGES, Simulation, StepControl, compute_dt, ssp_rk3_step

P = EdgeRole.periodic()


def test_dt_examples():
    b1 = Block1D(0.0, 0.1, np.zeros(5), P, P)
    assert compute_dt([b1], 0.1) == pytest.approx(0.01)
    b2 = Block1D(0.4, 0.05, np.zeros(5), P, P)
    assert compute_dt([b1, b2], 0.1) == pytest.approx(0.005)
    edges = {k: P for k in "WESN"}
    b3 = Block2D((0.0, 0.0), 0.2, 0.1, np.zeros((3, 3, 1)), edges)
    assert compute_dt([b3], 0.1) == pytest.approx(0.01)


def test_zero_operator_is_identity():
    u = [np.arange(4.0)]
    out = ssp_rk3_step(u, lambda f: [np.zeros_like(x) for x in f], 0.3)
    np.testing.assert_array_equal(out[0], u[0])


def test_constant_rate_exact():
    out = ssp_rk3_step([np.zeros(1)], lambda f: [np.ones_like(x) for x in f], 0.3)
    assert out[0][0] == pytest.approx(0.3, abs=1e-16)


def test_inputs_untouched_and_hook_called_per_stage():
    calls = []
    u = [np.ones(3)]
    ssp_rk3_step(u, lambda f: [2 * x for x in f], 0.1, lambda f, k: calls.append(k))
    assert calls == list(range(N_STAGES))
    np.testing.assert_array_equal(u[0], 1.0)


def one_step_error(lam, dt):
    out = ssp_rk3_step([np.ones(1)], lambda f: [lam * x for x in f], dt)
    return abs(out[0][0] - np.exp(lam * dt))


def test_rk3_one_step_error_is_fourth_order():
    dts = 0.2 / 2.0 ** np.arange(5)
    errs = np.array([one_step_error(-1.0, dt) for dt in dts])
    slopes = np.log2(errs[:-1] / errs[1:])
    assert np.all(np.abs(slopes - 4.0) < 0.2), slopes
    # the leading term of exp(z) - (1 + z + z^2/2 + z^3/6) is z^4/24
    assert errs[-1] == pytest.approx(dts[-1] ** 4 / 24, rel=0.05)


def test_step_control_lands_on_t_end():
    c = StepControl(t_end=1.0, dt=0.3)
    dts = []
    while not c.done:
        dt = c.next_dt()
        dts.append(dt)
        c.advance(dt)
    assert c.t == 1.0 and c.steps == 4
    assert dts[-1] == pytest.approx(0.1)
    with pytest.raises(ValueError):
        StepControl(1.0, 0.0)


@given(arrays(float, st.integers(5, 40), elements=st.floats(-10, 10)),
       st.sampled_from(["advection", "burgers"]))
def test_scalar_step_never_increases_tv(u, name):
    n = u.size
    values = u.copy()
    domain = build_domain([Axis(0.0, 1.0, n)], lambda x: values[np.rint(x * n).astype(int)])
    spec = get_problem(name)
    from ktinterface.problems import make_model
    sim = Simulation(domain, make_model(spec), theta=2.0, cfl=0.1)
    tv0 = total_variation(sim.values[0], periodic=True)[0]
    sim.step(sim.dt)
    tv1 = total_variation(sim.values[0], periodic=True)[0]
    assert tv1 <= tv0 + 1e-12 * max(1.0, tv0)


def test_linear_stability_long_run():
    domain, model = build_problem(get_problem("advection"), 40, ())
    sim = Simulation(domain, model, theta=2.0, cfl=0.1)
    m0 = np.max(np.abs(sim.values[0]))
    mx = m0
    for _ in range(10_000):
        sim.step(sim.dt)
        m = np.max(np.abs(sim.values[0]))
        assert m <= mx + 1e-12
        mx = m


def test_stage_failure_reports_stage_and_time():
    state = np.array([1.0, 0.0, 0.0, 2.5])
    domain = build_domain([Axis(0.0, 1.0, 8), Axis(0.0, 1.0, 8)],
                          lambda x, y: np.broadcast_to(state, x.shape + (4,)).copy())
    domain.blocks[0].values[3, 3, 3] = -5.0  # negative pressure
    sim = Simulation(domain, Euler2D(), theta=1.2)
    with pytest.raises(InadmissibleStateError) as info:
        sim.step(sim.dt, t=0.25)
    assert info.value.stage == 0 and info.value.time == 0.25
    assert info.value.location is not None


def test_merge_timing_validated():
    domain, model = build_problem(get_problem("advection"), 40, ())
    with pytest.raises(ValueError):
        Simulation(domain, model, merge_timing="sometimes")

import numpy as np
import pytest

from ktinterface.core import assemble
from ktinterface.models import primitive_to_conserved
from ktinterface.problems import SetupError, advection_cell_average, build_problem, get_problem
from ktinterface.runner import (RunConfig, expected_link_bytes_per_step, reference_field,
                                run_compare, run_single, shock_location_error)
from ktinterface.timestepping import N_STAGES, Simulation


@pytest.mark.parametrize("ifs", [(), ((0.15,),), ((0.15,), (0.15,))])
def test_constant_euler_state_unchanged(ifs):
    state = primitive_to_conserved(1.0, 0.0, 0.0, 1.0)
    spec = get_problem("implosion", t_end=0.05)
    domain, model = build_problem(spec, 21, ifs)
    for b in domain.blocks:
        b.values[...] = state
    rep = Simulation(domain, model, theta=1.2).run(0.05, sample_every=10 ** 6)
    for v in rep.values:
        np.testing.assert_allclose(v, np.broadcast_to(state, v.shape), rtol=0, atol=1e-12)


def test_interface_code_is_exercised():
    spec = get_problem("burgers", t_end=1.5)
    single, model = build_problem(spec, 40, ())
    split, _ = build_problem(spec, 40)
    run = Simulation(single, model).run(1.5, sample_every=10 ** 6)
    off = Simulation(split, model, merge_timing="off").run(1.5, sample_every=10 ** 6)
    g_single = assemble(single, run.values)[1]
    g_off = assemble(split, off.values)[1]
    assert np.max(np.abs(g_single - g_off)) > 1e-3
    link = split.links[0]
    # without the merge the two copies of the interface point drift apart
    assert abs(link.left_slice(off.values[0]) - link.right_slice(off.values[1])).max() > 1e-3
    split2, _ = build_problem(spec, 40)
    on = Simulation(split2, model).run(1.5, sample_every=10 ** 6)
    assert np.max(np.abs(assemble(split2, on.values)[1] - g_off)) > 1e-3


def test_compare_identical_configs_zero():
    cfg = RunConfig("advection", resolutions=(40,), t_end=0.5)
    cmp = run_compare(cfg, cfg)
    assert np.all(cmp["diff"] == 0) and np.all(cmp["l1"] == 0)


def test_compare_rejects_different_grids():
    a = RunConfig("advection", resolutions=(40,), t_end=0.1)
    b = RunConfig("advection", resolutions=(80,), t_end=0.1)
    with pytest.raises(SetupError):
        run_compare(a, b)


def test_interface_difference_below_scheme_error():
    base = RunConfig("advection", resolutions=(160,), t_end=20.0, sample_every=10 ** 6)
    a = base
    b = RunConfig("advection", resolutions=(160,), t_end=20.0, interfaces=(),
                  sample_every=10 ** 6)
    cmp = run_compare(a, b)
    (x,) = cmp["a"].coords
    dx = 4.0 / 160
    exact = advection_cell_average(x, dx, 20.0)
    own = dx * np.abs(cmp["b"].field[:, 0] - exact).sum()
    assert cmp["l1"][0] < own


def test_link_bytes_independent_of_resolution():
    per = []
    for n in (40, 160):
        res = run_single(RunConfig("advection", resolutions=(n,), t_end=0.2,
                                   simulate_distributed=True), n)
        per.append(res.bytes_per_step)
    assert per[0] == per[1] == {0: expected_link_bytes_per_step(1)}
    assert expected_link_bytes_per_step(1) == N_STAGES * 2 * (13 + 8)


def test_burgers_shock_position_small_run():
    res = run_single(RunConfig("burgers", resolutions=(40,), t_end=2.0, sample_every=10 ** 6))
    err, xs, exact = shock_location_error(res)
    assert exact == pytest.approx(np.pi + 1.0)
    assert err <= 2 * (2 * np.pi / 40)


def test_reference_field_choices():
    cfg = RunConfig("advection", t_end=1.0)
    x = -2 + 0.1 * np.arange(40)
    np.testing.assert_allclose(reference_field(cfg, x, 0.1), advection_cell_average(x, 0.1, 1.0))
    cfg = RunConfig("burgers", t_end=0.5, reference_n=200)
    with pytest.raises(SetupError):
        reference_field(cfg, np.arange(30) * 2 * np.pi / 30, 2 * np.pi / 30)
    with pytest.raises(SetupError):
        reference_field(RunConfig("implosion", reference="exact"), x, 0.1)

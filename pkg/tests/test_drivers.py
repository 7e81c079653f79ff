"""Problem data: assumption checks, probes, contraction arithmetic."""

import math

import numpy as np
import pytest

from rgbsde.drivers import (
    AssumptionError,
    DivergenceError,
    DriverSpec,
    HorizonSpec,
    ObstacleSpec,
    assert_valid,
    contraction_constant,
    exponential_weights,
    make_driver,
    make_obstacle,
    max_stable_dt,
    monotonicity_probe,
    validate_problem,
    zero_weights,
)


def test_contraction_constant_unit_exponential_weights():
    # v = v' = e^{-t}, u = 0: the constant is 24[(e^{-t0})^2 + e^{-2 t0}/2]
    # = 36 e^{-2 t0}.  At t0 = 0 it is exactly 36; it crosses 1 at
    # t0 = ln(36)/2.
    w = exponential_weights(v=(1.0, 1.0), v_prime=(1.0, 1.0), u=(0.0, 1.0))
    assert contraction_constant(w, 0.0) == pytest.approx(36.0, abs=1e-12)
    t0_star = math.log(36.0) / 2.0
    assert contraction_constant(w, t0_star) == pytest.approx(1.0, abs=1e-12)
    for t0 in np.linspace(0.0, 5.0, 41):
        assert contraction_constant(w, t0) == pytest.approx(
            36.0 * math.exp(-2.0 * t0), abs=1e-12
        )
    # nonincreasing in t0
    vals = [contraction_constant(w, t0) for t0 in np.linspace(0, 6, 25)]
    assert all(a >= b - 1e-15 for a, b in zip(vals, vals[1:]))


def test_contraction_constant_includes_local_time_weight():
    w = exponential_weights(v=(1.0, 1.0), v_prime=(1.0, 1.0), u=(0.5, 1.0), g_rate_bound=2.0)
    # u-tail contributes g_rate * (0.5) e^{-t0} = e^{-t0} on top of v.
    expect = 24.0 * ((2.0 * math.exp(-1.0)) ** 2 + math.exp(-2.0) / 2.0)
    assert contraction_constant(w, 1.0) == pytest.approx(expect, rel=1e-14)


def test_divergent_weights_raise():
    w = exponential_weights(v=(1.0, 0.0))  # rate 0: infinite mass
    with pytest.raises(DivergenceError):
        contraction_constant(w, 0.0)
    assert math.isinf(w.total_mass())
    assert math.isfinite(zero_weights().total_mass())


def test_monotonicity_probe_sine_perturbation():
    # g(t, y) = -2y + sin(y) has slope in [-3, -1]; beta = -1 passes with
    # margin <= 0.
    drv = DriverSpec(
        f=lambda t, x, y, z: -y,
        g=lambda t, x, y: -2.0 * y + np.sin(y),
        alpha=-1.0,
        beta=-1.0,
        k_f=0.0,
        lam=2.5,
        mu=2.5,
    )
    probe = monotonicity_probe(drv, n_samples=400, seed=3)
    assert probe.f_margin <= 0.0 + 1e-12
    assert probe.g_margin <= 0.0 + 1e-12
    assert probe.passed


def test_monotonicity_probe_flags_violation_with_witness():
    drv = DriverSpec(
        f=lambda t, x, y, z: +0.5 * y,  # increasing in y, alpha says 0
        g=lambda t, x, y: -y,
        alpha=0.0,
        beta=-1.0,
        k_f=0.0,
        lam=1.0,
        mu=2.5,
    )
    probe = monotonicity_probe(drv, n_samples=200, seed=1)
    assert probe.f_margin > 0.0
    assert not probe.passed
    assert probe.f_witness is not None and "y" in probe.f_witness


def test_validate_problem_beta_zero_message():
    drv = make_driver("linear", f_const=1.0, g_y=0.0)
    report = validate_problem(drv)
    by_name = {c.name: c for c in report.checks}
    assert not by_name["beta_negative"].passed
    assert by_name["beta_negative"].detail == "beta must be negative"
    assert not report.passed
    with pytest.raises(AssumptionError, match="beta must be negative"):
        assert_valid(drv)


def test_validate_problem_passing_linear_driver():
    drv = make_driver("linear", f_const=1.0, f_y=-1.0, g_y=-1.0)
    report = validate_problem(drv, obstacle=make_obstacle("constant", level=-5.0),
                              weights=zero_weights())
    assert report.passed, report.as_dict()
    names = [c.name for c in report.checks]
    assert "obstacle_terminal_consistency" in names
    assert "weights_integrable" in names


def test_validate_problem_growth_violation():
    # |f| = 3 but growth_phi claims 1 and k_growth = 0 -> growth check fails.
    drv = DriverSpec(
        f=lambda t, x, y, z: np.full(y.shape, 3.0),
        g=lambda t, x, y: -y,
        alpha=0.0,
        beta=-1.0,
        k_f=0.0,
        lam=0.5,
        mu=2.5,
        growth_phi=lambda t: 1.0,
    )
    report = validate_problem(drv)
    by_name = {c.name: c for c in report.checks}
    assert not by_name["f_growth_bound"].passed
    assert by_name["f_growth_bound"].witness is not None


def test_z_lipschitz_check():
    drv = DriverSpec(
        f=lambda t, x, y, z: 2.0 * z[..., 0],
        g=lambda t, x, y: -y,
        alpha=0.0,
        beta=-1.0,
        k_f=1.0,  # declared too small
        lam=1.5,
        mu=2.5,
        k_growth=2.0,
    )
    report = validate_problem(drv)
    by_name = {c.name: c for c in report.checks}
    assert not by_name["f_lipschitz_in_z"].passed
    drv_ok = DriverSpec(
        f=drv.f, g=drv.g, alpha=0.0, beta=-1.0, k_f=2.0, lam=4.5, mu=2.5, k_growth=2.0
    )
    assert validate_problem(drv_ok).passed


def test_obstacle_terminal_consistency():
    ob = make_obstacle("put", strike=0.6)  # h_of_x_tau: gap is exactly zero
    x = np.linspace(0.0, 1.0, 11).reshape(-1, 1)
    assert ob.terminal_gap(x) == 0.0
    bad = ObstacleSpec(
        h=lambda x: np.full(x.shape[0], 1.0),
        terminal_rule="explicit",
        xi=lambda x: np.zeros(x.shape[0]),
    )
    assert bad.terminal_gap(x) == pytest.approx(1.0)
    drv = make_driver("linear", f_y=-1.0, g_y=-1.0)
    report = validate_problem(drv, obstacle=bad)
    by_name = {c.name: c for c in report.checks}
    assert not by_name["obstacle_terminal_consistency"].passed


def test_max_stable_dt():
    drv = make_driver("linear", f_y=-1.0, g_y=-1.0)
    assert max_stable_dt(drv, g_rate=1.0) == pytest.approx(0.25)
    free = make_driver("linear", f_const=1.0, f_y=0.0, g_y=0.0)
    assert math.isinf(max_stable_dt(free, g_rate=0.0))


def test_registries():
    with pytest.raises(KeyError, match="unknown driver"):
        make_driver("polynomial_chaos")
    with pytest.raises(KeyError, match="unknown obstacle"):
        make_obstacle("staircase")
    drv = make_driver("manufactured_pde", alpha=-1.0, beta=-4.0)
    x = np.array([[0.0], [1.0], [0.5]])
    u_star = x[:, 0] ** 2
    # interior identity: f(x, u*) = -1, boundary data g(0,u*) = 0, g(1,u*) = 2
    np.testing.assert_allclose(drv.f(0.0, x, u_star, np.zeros_like(x)), -1.0)
    g_vals = drv.g(0.0, x, u_star)
    assert g_vals[0] == 0.0 and g_vals[1] == 2.0
    assert "put_payoff" in __import__("rgbsde.drivers", fromlist=["driver_names"]).driver_names()


def test_horizon_validation():
    h = HorizonSpec(kind="deterministic", T=2.0)
    assert h.t_max == 2.0
    with pytest.raises(ValueError):
        HorizonSpec(kind="deterministic", T=0.0)
    with pytest.raises(ValueError):
        HorizonSpec(kind="hitting", t_max=1.0)  # missing predicate
    with pytest.raises(ValueError):
        HorizonSpec(kind="infinite", t_max=0.0)
    ok = HorizonSpec(kind="hitting", predicate=lambda t, x: x[:, 0] >= 1.0, t_max=3.0)
    assert ok.t_max == 3.0

import numpy as np
import numpy.testing as npt
import pytest

from gyrostat import lie
from gyrostat.integrate import Trajectory, rk4_step, run, standard_invariants
from gyrostat.lie import SO3
from gyrostat.poisson import (ReducedPoint, ScalarField, point_like,
                              reduced_point, tangent_like)


def zero_field(p):
    return tangent_like(p, np.zeros(p.flat().size))


def linear_field(p):
    # x_dot = x componentwise
    return tangent_like(p, p.flat())


def start():
    return reduced_point(SO3, [0.3, -0.4, 0.8], theta=[0.1], l=[0.2])


# ------------------------------------------------------------------- stepping

def test_zero_field_leaves_state_unchanged():
    p = start()
    q = rk4_step(zero_field, p, 0.1)
    npt.assert_array_equal(q.flat(), p.flat())


def test_linear_field_matches_exponential():
    p = start()
    q = rk4_step(linear_field, p, 0.1)
    npt.assert_allclose(q.flat(), p.flat() * np.exp(0.1), atol=2.1e-8)


def test_step_requires_positive_dt():
    with pytest.raises(ValueError, match="dt"):
        rk4_step(zero_field, start(), 0.0)


def test_step_halving_order_on_smooth_field():
    # Richardson estimate of the convergence order on x_dot = x
    p = start()
    exact = p.flat() * np.exp(0.2)

    def err(dt):
        q = p
        for _ in range(int(round(0.2 / dt))):
            q = rk4_step(linear_field, q, dt)
        return np.max(np.abs(q.flat() - exact))

    order = np.log2(err(0.02) / err(0.01))
    assert order == pytest.approx(4.0, abs=0.1)


def test_non_finite_step_rejected():
    def bad(p):
        return tangent_like(p, np.full(p.flat().size, np.nan))

    with pytest.raises(ValueError, match="non-finite"):
        rk4_step(bad, start(), 0.1)


# ----------------------------------------------------------------------- runs

def test_run_grid_and_lengths():
    traj = run(zero_field, start(), 0.1, 1.0)
    assert len(traj.states) == 11
    npt.assert_allclose(traj.times, np.arange(11) * 0.1, atol=1e-15)
    assert traj.dt == pytest.approx(0.1)


def test_run_rejects_non_dividing_step():
    with pytest.raises(ValueError, match="divide"):
        run(zero_field, start(), 0.3, 1.0)


def test_run_reports_blowup_time():
    p = reduced_point(SO3, [1e3, 0.0, 0.0])

    def explosive(q):
        return tangent_like(q, 40.0 * q.flat())

    with pytest.raises(ValueError, match="blew up at t"):
        run(explosive, p, 0.1, 10.0)


def test_time_reversal_returns_to_start():
    def spiral(p):
        x = p.flat()
        out = np.empty_like(x)
        out[0] = -x[1]
        out[1] = x[0]
        out[2:] = np.sin(x[2:])
        return tangent_like(p, out)

    def backward(p):
        return spiral(p).scale(-1.0)

    p0 = start()
    fwd = run(spiral, p0, 1e-3, 1.0)
    back = run(backward, fwd.states[-1], 1e-3, 1.0)
    assert np.max(np.abs(back.states[-1].flat() - p0.flat())) <= 1e-6


def test_invariant_drift_series():
    # x_dot = x doubles nothing invariant; a genuinely conserved
    # quantity stays at zero drift while a growing one accumulates
    h = ScalarField(lambda p: float(p.flat()[0]))
    traj = run(linear_field, start(), 0.01, 1.0,
               invariants={"first": h.eval,
                           "ratio": lambda p: p.flat()[0] / p.flat()[1]})
    assert traj.max_drift("ratio") <= 1e-12
    assert traj.max_drift("first") > 0.1
    assert set(traj.drift) == {"first", "ratio"}
    assert all(len(s) == len(traj.states) for s in traj.drift.values())


def test_standard_invariants_names():
    h = ScalarField(lambda p: 0.0)
    assert set(standard_invariants(h, SO3)) == {"energy", "pi_sq"}
    assert set(standard_invariants(h, lie.SE3)) == {"energy", "pi_dot_gamma",
                                                    "gamma_sq"}


# ----------------------------------------------------------------- container

def test_trajectory_rejects_ragged_grid():
    p = start()
    with pytest.raises(ValueError, match="uniform"):
        Trajectory(np.array([0.0, 0.1, 0.3]), [p, p, p], {})


def test_trajectory_rejects_length_mismatch():
    p = start()
    with pytest.raises(ValueError, match="equal length"):
        Trajectory(np.array([0.0, 0.1]), [p], {})
    with pytest.raises(ValueError, match="drift"):
        Trajectory(np.array([0.0, 0.1]), [p, p], {"x": np.zeros(3)})


def test_default_grid_uniformity_at_scale():
    # the default experiment grid stays uniform to the documented bound
    times = np.arange(10001) * 1e-3
    dev = np.max(np.abs(np.diff(times) - 1e-3))
    assert dev <= 1e-15 * max(1.0, times[-1])


# --------------------------------------------------- long physical runs

def test_rigid_body_invariants_over_long_run():
    from gyrostat.controlled import dynamical_field
    from gyrostat.systems import RigidBodyRotorParams, rigid_body_system

    sys = rigid_body_system(RigidBodyRotorParams((1.0, 2.0, 3.0),
                                                 (0.5, 0.4, 0.3)))
    p0 = reduced_point(SO3, (1.0, 0.4, -0.7), theta=(0.0, 0.0, 0.0),
                       l=(0.1, -0.2, 0.3))
    traj = run(lambda p: dynamical_field(sys, p), p0, 1e-3, 10.0,
               standard_invariants(sys.hamiltonian, SO3))
    assert traj.max_drift("pi_sq") <= 1e-8
    assert traj.max_drift("energy") <= 1e-8


def test_heavy_top_invariants_over_long_run():
    from gyrostat.controlled import dynamical_field
    from gyrostat.systems import HeavyTopRotorParams, heavy_top_system

    sys = heavy_top_system(HeavyTopRotorParams(
        (2.0, 1.5, 1.0), (0.4, 0.3), m=1.0, g=9.8, h=0.3,
        chi=(0.0, 0.0, 1.0)))
    gamma0 = np.array([0.2, -0.1, 0.97])
    gamma0 /= np.linalg.norm(gamma0)
    p0 = reduced_point(lie.SE3, (0.4, -0.2, 0.8), gamma0,
                       theta=(0.0, 0.0), l=(0.05, -0.04))
    traj = run(lambda p: dynamical_field(sys, p), p0, 1e-3, 10.0,
               standard_invariants(sys.hamiltonian, lie.SE3))
    for name in ("pi_dot_gamma", "gamma_sq", "energy"):
        assert traj.max_drift(name) <= 1e-8

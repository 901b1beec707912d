"""Material law, shape functions, field elimination, drivers, and the
second-law residuals."""

import numpy as np
import pytest

from ferrohyst import (
    MaterialParams,
    MemoryState,
    OutOfRangeError,
    PointState,
    PreisachDensity,
    RGrid,
    ShapeFunction,
    clausius_duhem_residuals,
    dielectric_displacement,
    drive_field,
    drive_stress,
    evolve_memory,
    free_energy,
    preisach_output,
    replay_inputs,
    shape_eval,
    solve_field_from_D,
    stress,
)
from ferrohyst.errors import InvalidParameterError
from ferrohyst.waveforms import piecewise_ramp, triangle


@pytest.fixture(scope="module")
def linear_params():
    return MaterialParams(f=ShapeFunction.linear())


@pytest.fixture(scope="module")
def saturated(grid):
    return evolve_memory(MemoryState.virgin(grid), 2.0)


# ---------------------------------------------------------------------------
# shape functions
# ---------------------------------------------------------------------------

def test_shape_linear_core_values():
    f = ShapeFunction.linear()
    assert shape_eval(f, 0.0) == (1.1, -1.0)
    assert shape_eval(f, 0.5) == (pytest.approx(0.6), -1.0)


def test_shape_quartic_core_values():
    f = ShapeFunction.quartic()
    assert shape_eval(f, 1.0) == (0.5, 0.0)
    assert shape_eval(f, 0.0) == (0.75, -1.0)


def test_shape_out_of_range():
    f = ShapeFunction.linear()
    with pytest.raises(OutOfRangeError):
        shape_eval(f, 1.6)
    with pytest.raises(OutOfRangeError):
        shape_eval(f, -2.0)


@pytest.mark.parametrize("variant", [ShapeFunction.linear, ShapeFunction.quartic])
def test_shape_extension_is_c1_and_positive(variant):
    f = variant()
    eps = np.linspace(-1.5, 1.5, 6001)
    vals, derivs = f.eval(eps)
    assert np.all(vals > 0.0)
    # f' is the actual derivative of f (central differences away from the kinks)
    h = eps[1] - eps[0]
    fd = (vals[2:] - vals[:-2]) / (2.0 * h)
    assert np.max(np.abs(fd - derivs[1:-1])) <= 5e-3
    # f' itself has no jumps (Lipschitz): successive differences scale with h
    assert np.max(np.abs(np.diff(derivs))) <= 20.0 * h


def test_shape_reciprocal_lipschitz():
    # eps -> 1/f and eps -> eps/f must be Lipschitz on the working range
    for f in (ShapeFunction.linear(), ShapeFunction.quartic()):
        eps = np.linspace(-1.5, 1.5, 4001)
        vals, _ = f.eval(eps)
        h = eps[1] - eps[0]
        assert np.max(np.abs(np.diff(1.0 / vals))) / h < 500.0
        assert np.max(np.abs(np.diff(eps / vals))) / h < 700.0


def test_shape_from_table():
    knots = np.linspace(-1.0, 1.0, 9)
    f = ShapeFunction.from_table(knots, 1.1 - knots)
    val, deriv = shape_eval(f, 0.25)
    assert val == pytest.approx(0.85, abs=1e-12)
    assert deriv == pytest.approx(-1.0, abs=1e-9)
    with pytest.raises(InvalidParameterError):
        ShapeFunction.from_table(knots, knots)          # not positive


# ---------------------------------------------------------------------------
# field elimination from the dielectric datum
# ---------------------------------------------------------------------------

def test_solve_field_trivial(linear_params, density, virgin):
    q, E, _ = solve_field_from_D(linear_params, 0.0, 0.0, virgin, density)
    assert q == 0.0 and E == 0.0


def test_solve_field_quadratic_case(linear_params, density, grid):
    q, E, mem = solve_field_from_D(linear_params, 0.0, 0.005,
                                   MemoryState.virgin(grid), density)
    assert q == pytest.approx(0.089603, abs=2e-3)
    assert E == pytest.approx(0.098564, abs=2.2e-3)
    assert E == pytest.approx(1.1 * q, abs=1e-15)
    # the eliminated equation e eps + kappa E + P = r holds at the solution
    residual = 0.01 * E + preisach_output(density, mem) - 0.005
    assert abs(residual) <= 1e-10


def test_solve_field_saturating_datum(linear_params, density, grid):
    # beyond saturation kappa E + P_sat = r, so E = (r - 1/2)/kappa
    r = 0.52
    q, E, mem = solve_field_from_D(linear_params, 0.0, r, MemoryState.virgin(grid),
                                   density)
    assert E == pytest.approx((r - 0.5) / 0.01, abs=1e-6)


# ---------------------------------------------------------------------------
# state functions
# ---------------------------------------------------------------------------

def test_stress_values(linear_params, density, grid, virgin, saturated):
    assert stress(linear_params, density, 0.1, 0.0, 0.0, virgin) == pytest.approx(0.1)
    sat = stress(linear_params, density, 0.0, 0.0, 0.0, saturated)
    assert sat == pytest.approx(-1.0 / 6.0, abs=2e-3)
    visc = MaterialParams(nu=0.01)
    assert stress(visc, density, 0.0, 1.0, 0.0, virgin) == pytest.approx(0.01)


def test_dielectric_displacement_values(linear_params, density, virgin, saturated):
    assert dielectric_displacement(linear_params, density, 0.1, 0.0, virgin) == 0.0
    assert dielectric_displacement(linear_params, density, 0.0, 0.0, saturated) \
        == pytest.approx(0.5, abs=2e-3)
    # virgin ramp to E = 1: D = kappa E + P(E / f(0))
    grid_fine = RGrid.uniform(m=1000, cutoff=4.0)
    q = 1.0 / 1.1
    mem = evolve_memory(MemoryState.virgin(grid_fine), q)
    d = dielectric_displacement(linear_params, density, 0.0, 1.0, mem)
    assert d == pytest.approx(0.01 + q * q / 2.0, abs=2e-3)


def test_free_energy_values(linear_params, density, virgin, saturated):
    assert free_energy(linear_params, density, 0.0, 0.0, virgin) == 0.0
    assert free_energy(linear_params, density, 0.2, 0.0, virgin) == pytest.approx(0.02)
    sat = free_energy(linear_params, density, 0.0, 0.0, saturated)
    assert sat == pytest.approx(1.1 / 6.0, abs=2.5e-3)


def test_point_state_evaluate(linear_params, density, grid):
    ps = PointState.evaluate(linear_params, density, 0.1, 0.5,
                             MemoryState.virgin(grid))
    assert ps.q * (1.1 - 0.1) == pytest.approx(ps.E, abs=1e-15)
    assert ps.D == pytest.approx(0.01 * 0.5 + ps.P, abs=1e-15)
    assert ps.F == pytest.approx(0.5 * 0.1**2 + 0.005 * 0.25 + (1.1 - 0.1) * ps.U,
                                 abs=1e-15)


# ---------------------------------------------------------------------------
# drivers
# ---------------------------------------------------------------------------

def test_drive_field_zero_everything(linear_params, density, grid):
    traj = drive_field(linear_params, density, np.zeros(10), grid=grid)
    assert np.all(traj.eps == 0.0) and np.all(traj.P == 0.0)


def test_drive_field_butterfly_identity(linear_params, density, grid):
    # with e = 0, sigma_target = 0 and linear f: c eps = U exactly per record
    t, e_series = triangle(1.0, 2, 250)
    traj = drive_field(linear_params, density, e_series, t=t, grid=grid)
    assert np.max(np.abs(traj.eps - traj.U / linear_params.c_E)) <= 1e-9
    assert traj.eps.min() >= -1e-12
    assert np.max(np.abs(traj.q * (1.1 - traj.eps) - traj.E)) <= 1e-12


def test_drive_field_loop_closure(linear_params, density, grid):
    t, e_series = triangle(1.0, 3, 250)
    traj = drive_field(linear_params, density, e_series, t=t, grid=grid)
    spp = 250
    second = slice(spp + 1, 2 * spp + 1)
    third = slice(2 * spp + 1, 3 * spp + 1)
    for col in ("P", "U", "eps", "sigma", "D"):
        assert np.max(np.abs(traj.column(col)[second] - traj.column(col)[third])) <= 1e-8


def test_drive_field_viscous_sigma_residual(density, grid):
    params = MaterialParams(nu=0.05)
    t, e_series = triangle(0.8, 1, 200)
    target = 0.02 * np.ones_like(e_series)
    traj = drive_field(params, density, e_series, target, t=t, grid=grid)
    eps_dot = np.concatenate(([0.0], np.diff(traj.eps) / np.diff(traj.t)))
    _, fp = params.f.eval(traj.eps)
    sig = params.nu * eps_dot + params.c_E * traj.eps - params.e_pz * traj.E + fp * traj.U
    assert np.max(np.abs(sig - 0.02)) <= 1e-10


def test_drive_stress_frozen_after_poling(linear_params, density, grid):
    # sigma = 0 with the datum frozen at the zero-field remanent point keeps the
    # electrical state frozen (q stays 0, P stays remanent)
    t_pol, e_pol = piecewise_ramp([0.0, 1.0, 0.0], 200)
    pol = drive_field(linear_params, density, e_pol, t=t_pol, grid=grid)
    memory = replay_inputs(MemoryState.virgin(grid), pol.q)
    traj = drive_stress(linear_params, density, np.zeros(50), pol.D[-1],
                        t=np.linspace(2.1, 3.0, 50), grid=grid,
                        initial_memory=memory, eps0=pol.eps[-1])
    assert np.max(np.abs(traj.P - pol.P[-1])) <= 1e-10
    assert np.max(np.abs(traj.q)) <= 1e-10


def test_drive_stress_linear_elastic_limit():
    params = MaterialParams(f=ShapeFunction.linear())
    zero = PreisachDensity.zero()
    grid = RGrid.uniform(m=10, cutoff=4.0)
    sig = np.linspace(0.0, -0.8, 30)
    traj = drive_stress(params, zero, sig, 0.0, grid=grid)
    assert np.max(np.abs(traj.eps - sig / params.c_E)) <= 1e-11
    assert np.all(traj.P == 0.0)


def test_drive_stress_inverse_equation_residual(linear_params, density, grid):
    t_pol, e_pol = piecewise_ramp([0.0, 1.0, 0.4], 150)
    pol = drive_field(linear_params, density, e_pol, t=t_pol, grid=grid)
    memory = replay_inputs(MemoryState.virgin(grid), pol.q)
    r_hold = pol.D[-1]
    sig = np.linspace(0.0, -1.0, 120)
    traj = drive_stress(linear_params, density, sig, r_hold,
                        t=np.linspace(2.2, 3.2, 120), grid=grid,
                        initial_memory=memory, eps0=pol.eps[-1], q_guess=pol.q[-1])
    # D-equation: e eps + kappa E + P = r to 1e-10; sigma equation to 1e-10
    assert np.max(np.abs(0.01 * traj.E + traj.P - r_hold)) <= 1e-10
    f_val, fp = linear_params.f.eval(traj.eps)
    sig_residual = traj.eps * linear_params.c_E + fp * traj.U - sig
    assert np.max(np.abs(sig_residual)) <= 1e-10
    assert np.max(np.abs(traj.q * f_val - traj.E)) <= 1e-12
    # mechanical depolarization: |P| nonincreasing along the compressive ramp
    assert np.all(np.diff(np.abs(traj.P)) <= 1e-12)


# ---------------------------------------------------------------------------
# second law
# ---------------------------------------------------------------------------

def test_clausius_duhem_constant_trajectory(linear_params, density, grid):
    traj = drive_field(linear_params, density, np.full(12, 0.3), grid=grid)
    res = clausius_duhem_residuals(traj)
    assert np.allclose(res, 0.0, atol=1e-15)


def test_clausius_duhem_field_driven(linear_params, density, grid):
    t, e_series = triangle(1.0, 2, 400)
    traj = drive_field(linear_params, density, e_series, t=t, grid=grid)
    res = clausius_duhem_residuals(traj)
    scale = 1.0 + np.max(np.abs(traj.sigma)) + np.max(np.abs(traj.E))
    assert res.min() >= -1e-8 * scale


def test_clausius_duhem_pure_elastic_identity():
    # reversible case: the right-endpoint residual is exactly the positive
    # quadratic remainder c/2 (d eps)^2 + kappa/2 (d E)^2 (no dissipation)
    params = MaterialParams()
    zero = PreisachDensity.zero()
    grid = RGrid.uniform(m=10, cutoff=4.0)
    t, e_series = triangle(0.5, 1, 100)
    traj = drive_field(params, zero, e_series, 0.1 * np.sin(t), t=t, grid=grid)
    res = clausius_duhem_residuals(traj)
    expected = 0.5 * params.c_E * np.diff(traj.eps) ** 2 \
        + 0.5 * params.kappa * np.diff(traj.E) ** 2
    assert np.max(np.abs(res - expected)) <= 1e-15
    assert res.min() >= 0.0


def test_clausius_duhem_random_programs(density):
    # reduced-size version of the verify suite, both drivers
    from ferrohyst.verify import suite_clausius_duhem

    result = suite_clausius_duhem(seed=3, cases=12)
    assert result.ok, result.summary

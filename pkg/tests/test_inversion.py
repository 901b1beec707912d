"""Per-step inversion, trajectory solves, Picard cross-check, and the
Lipschitz bounds."""

import numpy as np
import pytest

from ferrohyst import (
    CutoffViolationError,
    InvalidCoefficientError,
    InvalidParameterError,
    InversionProblem,
    MemoryState,
    PrandtlStack,
    evolve_memory,
    invert_step,
    invert_trajectory,
    lipschitz_bound_prop3,
    lipschitz_bound_theorem1,
    operator_series,
    preisach_output,
)
from ferrohyst.inversion import establish_bracket
from conftest import random_piecewise_monotone


def test_invert_step_identity_for_zero_b(density, virgin):
    q, mem = invert_step(virgin, 0.0, 0.7, density)
    assert q == 0.7
    assert mem.current_input == 0.7


def test_invert_step_prandtl_closed_form():
    stack = PrandtlStack([0.5], [1.0])
    mem = MemoryState.virgin(stack.grid(4.0))
    q1, mem = invert_step(mem, 1.0, 0.3, stack)
    assert q1 == pytest.approx(0.3, abs=1e-12)          # play not engaged: q = w
    q2, mem = invert_step(mem, 1.0, 2.0, stack)
    assert q2 == pytest.approx(1.25, abs=1e-12)         # q + (q - r) mu = w
    assert q2 + (q2 - 0.5) == pytest.approx(2.0, abs=1e-12)


def test_invert_step_field_elimination_case(density, grid):
    # b = 1/(kappa f), w = r/(kappa f) with kappa = 0.01, f = 1.1, r = 0.005;
    # virgin monotone loading gives P(q) = q^2/2, so the analytic root is
    # q = (-1 + sqrt(1 + 2 b w)) / b (quadrature shifts it by O(dr^2))
    b = 1.0 / 0.011
    w = 0.005 / 0.011
    q_analytic = (-1.0 + np.sqrt(1.0 + 2.0 * b * w)) / b
    assert q_analytic == pytest.approx(0.089603, abs=1e-6)

    q, mem = invert_step(MemoryState.virgin(grid), b, w, density)
    assert q == pytest.approx(q_analytic, abs=2e-3)
    # brute-force bisection oracle on the same scalar equation
    lo, hi = 0.0, 1.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        val = mid + b * preisach_output(density, evolve_memory(MemoryState.virgin(grid), mid))
        if val < w:
            lo = mid
        else:
            hi = mid
    assert q == pytest.approx(0.5 * (lo + hi), abs=1e-10)
    # equation residual at the returned root
    assert q + b * preisach_output(density, mem) - w == pytest.approx(0.0, abs=1e-12 * (1 + w))


def test_invert_step_rejects_negative_coefficient(density, virgin):
    with pytest.raises(InvalidCoefficientError):
        invert_step(virgin, -0.1, 0.0, density)


def test_invert_step_cutoff_violation(density, virgin):
    with pytest.raises(CutoffViolationError):
        invert_step(virgin, 0.0, 10.0, density)     # root beyond the grid cutoff


def test_monotone_bracketing(density, grid):
    rng = np.random.default_rng(21)
    for _ in range(50):
        mem = MemoryState.virgin(grid)
        for q in random_piecewise_monotone(rng, 10, amplitude=1.5):
            mem = evolve_memory(mem, q)
        b = float(rng.uniform(0.0, 2.0))
        w = float(rng.uniform(-1.5, 1.5))
        tol = 1e-12 * (1.0 + abs(w))
        lo, hi, f_lo, f_hi = establish_bracket(mem, b, w, density, tol=tol)
        assert lo <= hi
        assert f_lo <= tol and f_hi >= -tol


def test_trajectory_zero_rhs(density, grid):
    n = 20
    problem = InversionProblem(np.arange(n, dtype=float), np.linspace(0.0, 1.0, n),
                               np.zeros(n), density, MemoryState.virgin(grid))
    assert np.allclose(invert_trajectory(problem), 0.0, atol=1e-14)


def test_trajectory_shape_validation(density, grid):
    with pytest.raises(InvalidParameterError):
        InversionProblem(np.arange(3.0), np.zeros(2), np.zeros(3), density,
                         MemoryState.virgin(grid))
    with pytest.raises(InvalidCoefficientError):
        InversionProblem(np.arange(3.0), np.array([0.0, -1.0, 0.0]), np.zeros(3),
                         density, MemoryState.virgin(grid))


def test_round_trip_recovery(density, grid):
    rng = np.random.default_rng(22)
    for _ in range(20):
        n = int(rng.integers(10, 60))
        q_true = rng.uniform(-1.5, 1.5, n)
        b = rng.uniform(0.0, 1.0, n)
        p, _, _ = operator_series(density, MemoryState.virgin(grid), q_true)
        w = q_true + b * p
        problem = InversionProblem(np.arange(n, dtype=float), b, w, density,
                                   MemoryState.virgin(grid))
        q = invert_trajectory(problem)
        assert np.max(np.abs(q - q_true)) <= 1e-8


def test_residual_along_trajectory(density, grid):
    rng = np.random.default_rng(23)
    n = 60
    b = rng.uniform(0.0, 2.0, n)
    w = rng.uniform(-1.5, 1.5, n)
    problem = InversionProblem(np.arange(n, dtype=float), b, w, density,
                               MemoryState.virgin(grid))
    q = invert_trajectory(problem)
    p, _, _ = operator_series(density, MemoryState.virgin(grid), q)
    residual = np.abs(q + b * p - w)
    assert np.all(residual <= 1e-12 * (1.0 + np.abs(w)))


def test_picard_mode_agrees_with_bisection(density, grid):
    rng = np.random.default_rng(24)
    for _ in range(8):
        n = int(rng.integers(15, 40))
        b = np.interp(np.linspace(0, 1, n), np.linspace(0, 1, 5), rng.uniform(0, 1, 5))
        w = np.interp(np.linspace(0, 1, n), np.linspace(0, 1, 7), rng.uniform(-1.5, 1.5, 7))
        problem = InversionProblem(np.arange(n, dtype=float), b, w, density,
                                   MemoryState.virgin(grid))
        q_b = invert_trajectory(problem, mode="bisect")
        q_p = invert_trajectory(problem, mode="picard")
        assert np.max(np.abs(q_b - q_p)) <= 1e-8


def test_unknown_mode_rejected(density, grid):
    problem = InversionProblem(np.zeros(1), np.zeros(1), np.zeros(1), density,
                               MemoryState.virgin(grid))
    with pytest.raises(InvalidParameterError):
        invert_trajectory(problem, mode="newton")


def test_prandtl_constant_b_monotone_w_closed_form():
    # monotone loading of a one-cell stack: q = w below the engagement point,
    # then q = (w + b mu r)/(1 + b mu)
    stack = PrandtlStack([0.5], [1.0])
    grid = stack.grid(6.0)
    b = np.full(6, 1.0)
    w = np.array([0.1, 0.3, 0.5, 1.0, 2.0, 3.0])
    problem = InversionProblem(np.arange(6.0), b, w, stack, MemoryState.virgin(grid))
    q = invert_trajectory(problem)
    expected = np.where(w <= 0.5, w, (w + 0.5) / 2.0)
    assert np.allclose(q, expected, atol=1e-11)


def test_discrete_stack_bound_prop():
    # ||q1 - q2|| <= prod_j (1 + bbar mu_j) ||w1 - w2|| for discrete stacks
    rng = np.random.default_rng(25)
    bbar = 1.0
    for _ in range(30):
        k = int(rng.integers(1, 6))
        nodes = np.sort(rng.uniform(0.1, 2.0, k))
        nodes += 0.01 * np.arange(k)                      # enforce strict increase
        weights = rng.uniform(0.0, 0.8, k)
        stack = PrandtlStack(nodes, weights)
        grid = stack.grid(10.0)
        n = 40
        b = np.interp(np.linspace(0, 1, n), np.linspace(0, 1, 5),
                      rng.uniform(0, bbar, 5))
        w1 = np.interp(np.linspace(0, 1, n), np.linspace(0, 1, 6),
                       rng.uniform(-1.5, 1.5, 6))
        w2 = np.interp(np.linspace(0, 1, n), np.linspace(0, 1, 6),
                       rng.uniform(-1.5, 1.5, 6))
        q1 = invert_trajectory(InversionProblem(np.arange(n, dtype=float), b, w1,
                                                stack, MemoryState.virgin(grid)))
        q2 = invert_trajectory(InversionProblem(np.arange(n, dtype=float), b, w2,
                                                stack, MemoryState.virgin(grid)))
        rho = np.prod(1.0 + bbar * weights)
        assert np.max(np.abs(q1 - q2)) <= rho * np.max(np.abs(w1 - w2)) + 1e-8


def test_bound_formulas():
    e = float(np.exp(1.0))
    assert lipschitz_bound_theorem1(1.0, 1.0) == pytest.approx(e, rel=1e-12)
    assert lipschitz_bound_theorem1(0.0, 5.0) == 1.0
    assert lipschitz_bound_theorem1(2.0, 0.5) == pytest.approx(e, rel=1e-12)
    assert lipschitz_bound_prop3(1.0, 1.0, 1.0, 0.1, 0.0) == pytest.approx(0.1 * e, rel=1e-12)
    assert lipschitz_bound_prop3(2.0, 0.7, 1.0, 0.0, 0.0) == 0.0
    assert lipschitz_bound_prop3(1.0, 1.0, 1.0, 0.0, 0.2) == pytest.approx(0.2 * e, rel=1e-12)
    with pytest.raises(InvalidParameterError):
        lipschitz_bound_theorem1(-1.0, 1.0)
    with pytest.raises(InvalidParameterError):
        lipschitz_bound_prop3(1.0, 1.0, -1.0, 0.0, 0.0)

"""Inversion of Preisach equations with time dependent coefficients.

Solves q(t) + b(t) P[q](t) = w(t) step by step: within one sample step the
scalar map x -> x + b_k P(x; memory) is continuous and strictly increasing
(slope >= 1 for b_k >= 0 and nondecreasing densities), so each step has a
unique root.  The root is bracketed from the output bound |P| <= p_sup and
refined by regula falsi with a bisection safeguard (Illinois) until the
equation residual meets tolerance.  A block-wise fixed-point mode mirroring
the contraction construction with gamma < 1/(M L), L = 2, is provided as a
cross check; both modes solve the same discrete equations and must agree.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._roots import illinois
from .errors import CutoffViolationError, InvalidCoefficientError, InvalidParameterError
from .hysteresis import (
    MemoryState,
    RGrid,
    _evolved_xi,
    _P_raw,
    _xi_cell_values,
    evolve_memory,
)

__all__ = [
    "InversionProblem",
    "invert_step",
    "invert_step_many",
    "invert_trajectory",
    "lipschitz_bound_theorem1",
    "lipschitz_bound_prop3",
]

_MAX_ITER = 200


@dataclass
class InversionProblem:
    """Time series data for q(t) + b(t) P[q](t) = w(t)."""

    t: np.ndarray
    b: np.ndarray
    w: np.ndarray
    density: object
    initial_memory: MemoryState

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        self.b = np.asarray(self.b, dtype=float)
        self.w = np.asarray(self.w, dtype=float)
        if not (self.t.shape == self.b.shape == self.w.shape):
            raise InvalidParameterError("t, b and w must share time stamps")
        if np.any(self.b < 0.0):
            raise InvalidCoefficientError("coefficients b must be nonnegative")


def _trial_P(density, grid: RGrid, xi0: np.ndarray, x: float) -> float:
    xi = _evolved_xi(xi0, grid.nodes, x)
    return float(_P_raw(density, grid, xi))


def establish_bracket(memory: MemoryState, b_k: float, w_k: float, density,
                      q_guess: float = None, tol: float = 0.0):
    """Bracket [lo, hi] within the cutoff with phi(lo) <= w_k <= phi(hi) (up to
    the residual tolerance) for phi(x) = x + b_k P(x; memory); raises
    cutoff-violation if no such bracket exists inside [-R, R]."""
    grid = memory.grid
    R = grid.cutoff
    phi = lambda x: x + b_k * _trial_P(density, grid, memory.xi, x)

    p_bound = getattr(density, "p_sup", np.inf)
    if np.isfinite(p_bound):
        lo = max(w_k - b_k * p_bound, -R)
        hi = min(w_k + b_k * p_bound, R)
        if lo > hi:
            raise CutoffViolationError(
                f"root of w={w_k!r} lies outside the memory cutoff R={R}")
    else:
        x0 = min(max(q_guess if q_guess is not None else w_k, -R), R)
        step = 0.5 * (1.0 + abs(w_k))
        lo = hi = x0
        while phi(lo) > w_k and lo > -R:
            lo = max(lo - step, -R)
            step *= 2.0
        step = 0.5 * (1.0 + abs(w_k))
        while phi(hi) < w_k and hi < R:
            hi = min(hi + step, R)
            step *= 2.0
    f_lo = phi(lo) - w_k
    f_hi = phi(hi) - w_k
    if f_lo > tol or f_hi < -tol:
        raise CutoffViolationError(
            f"no root bracket for w={w_k!r}, b={b_k!r} within memory cutoff R={R}")
    return lo, hi, f_lo, f_hi


def invert_step(memory: MemoryState, b_k: float, w_k: float, density,
                q_guess: float = None, tol_rel: float = 1e-12):
    """Solve q_k + b_k P[evolve(memory, q_k)] = w_k; returns (q_k, evolved memory)."""
    if b_k < 0.0:
        raise InvalidCoefficientError("coefficient b must be nonnegative")
    if b_k == 0.0:
        return float(w_k), evolve_memory(memory, float(w_k))

    grid = memory.grid
    phi = lambda x: x + b_k * _trial_P(density, grid, memory.xi, x)
    tol = tol_rel * (1.0 + abs(w_k))

    lo, hi, f_lo, f_hi = establish_bracket(memory, b_k, w_k, density, q_guess, tol=tol)
    if abs(f_lo) > tol and abs(f_hi) > tol and q_guess is not None and lo < q_guess < hi:
        fg = phi(q_guess) - w_k
        if abs(fg) <= tol:
            return float(q_guess), evolve_memory(memory, float(q_guess))
        if fg > 0.0:
            hi, f_hi = q_guess, fg
        else:
            lo, f_lo = q_guess, fg
    x = illinois(lambda v: phi(v) - w_k, lo, hi, f_lo, f_hi, tol)
    return float(x), evolve_memory(memory, float(x))


def invert_step_many(xi0: np.ndarray, b: np.ndarray, w: np.ndarray, density,
                     grid: RGrid, q_guess: np.ndarray = None,
                     tol_rel: float = 1e-12) -> np.ndarray:
    """Vectorized invert_step over independent memory rows xi0 (n, m); used by
    the beam solver where every element carries its own memory."""
    b = np.asarray(b, dtype=float)
    w = np.asarray(w, dtype=float)
    if np.any(b < 0.0):
        raise InvalidCoefficientError("coefficients b must be nonnegative")
    p_bound = getattr(density, "p_sup", np.inf)
    if p_bound == 0.0:
        if np.any(np.abs(w) > grid.cutoff * (1.0 + 1e-12)):
            raise CutoffViolationError("root lies outside the memory cutoff")
        return w.copy()
    if not np.isfinite(p_bound):
        out = np.empty_like(w)
        for i in range(w.size):
            mem = MemoryState(grid, xi0[i].copy(), 0.0)
            out[i], _ = invert_step(mem, b[i], w[i], density,
                                    None if q_guess is None else q_guess[i], tol_rel)
        return out

    r = grid.nodes
    widths = grid.cell_widths
    mids = grid.cell_midpoints

    def phi(x):
        xi = _evolved_xi(xi0, r, x[:, None])
        return x + b * (density.g(mids, _xi_cell_values(xi)) @ widths)

    R = grid.cutoff
    lo = np.maximum(w - b * p_bound, -R)
    hi = np.minimum(w + b * p_bound, R)
    if np.any(lo > hi):
        raise CutoffViolationError("root lies outside the memory cutoff")
    tol = tol_rel * (1.0 + np.abs(w))
    f_lo = phi(lo) - w
    f_hi = phi(hi) - w
    if np.any(f_lo > tol) or np.any(f_hi < -tol):
        raise CutoffViolationError("no root bracket within memory cutoff")
    x_out = 0.5 * (lo + hi)
    solved = np.abs(f_lo) <= tol
    x_out = np.where(solved, lo, x_out)
    hi_ok = np.abs(f_hi) <= tol
    x_out = np.where(~solved & hi_ok, hi, x_out)
    solved |= hi_ok

    if q_guess is not None:
        xg = np.clip(q_guess, lo, hi)
        fg = phi(xg) - w
        good = ~solved & (np.abs(fg) <= tol)
        x_out = np.where(good, xg, x_out)
        solved |= good
        up = fg > 0.0
        repl_hi = ~solved & up
        repl_lo = ~solved & ~up
        hi = np.where(repl_hi, xg, hi)
        f_hi = np.where(repl_hi, fg, f_hi)
        lo = np.where(repl_lo, xg, lo)
        f_lo = np.where(repl_lo, fg, f_lo)

    side = np.zeros(w.shape, dtype=np.int8)
    for _ in range(_MAX_ITER):
        if np.all(solved):
            return x_out
        denom = f_hi - f_lo
        safe = denom > 0.0
        x = np.where(safe, (lo * f_hi - hi * f_lo) / np.where(safe, denom, 1.0),
                     0.5 * (lo + hi))
        x = np.where((lo < x) & (x < hi), x, 0.5 * (lo + hi))
        x = np.where(solved, x_out, x)
        fx = phi(x) - w
        newly = ~solved & (np.abs(fx) <= tol)
        x_out = np.where(newly, x, x_out)
        solved |= newly
        active = ~solved
        up = fx > 0.0
        f_lo = np.where(active & up & (side == 1), 0.5 * f_lo, f_lo)
        f_hi = np.where(active & ~up & (side == -1), 0.5 * f_hi, f_hi)
        hi = np.where(active & up, x, hi)
        f_hi = np.where(active & up, fx, f_hi)
        lo = np.where(active & ~up, x, lo)
        f_lo = np.where(active & ~up, fx, f_lo)
        side = np.where(active, np.where(up, 1, -1).astype(np.int8), side)
    raise RuntimeError("vector root refinement did not converge")  # pragma: no cover


def invert_trajectory(problem: InversionProblem, mode: str = "bisect",
                      tol_rel: float = 1e-12, L: float = 2.0) -> np.ndarray:
    """Solve the equation at every time stamp, threading memory; returns q_k."""
    if mode == "bisect":
        return _invert_bisect(problem, tol_rel)
    if mode == "picard":
        return _invert_picard(problem, tol_rel, L)
    raise InvalidParameterError(f"unknown inversion mode {mode!r}")


def _invert_bisect(problem: InversionProblem, tol_rel: float) -> np.ndarray:
    memory = problem.initial_memory.copy()
    q = np.empty_like(problem.w)
    guess = None
    for k in range(problem.w.size):
        q[k], memory = invert_step(memory, problem.b[k], problem.w[k],
                                   problem.density, q_guess=guess, tol_rel=tol_rel)
        guess = q[k]
    return q


def _forward_P(problem: InversionProblem, memory: MemoryState, q_series: np.ndarray) -> np.ndarray:
    from .hysteresis import preisach_output

    mem = memory.copy()
    out = np.empty_like(q_series)
    for k, qk in enumerate(q_series):
        mem = evolve_memory(mem, qk)
        out[k] = preisach_output(problem.density, mem)
    return out


def _invert_picard(problem: InversionProblem, tol_rel: float, L: float) -> np.ndarray:
    """Block fixed-point construction: freeze b at the block start value c, move
    the (b - c) P[q] term to the right-hand side, and iterate constant-coefficient
    solves.  Blocks satisfy |b - c| < gamma = 1/(2 M L), so the iteration
    contracts with factor <= 1/2."""
    M = getattr(problem.density, "M", 0.0)
    gamma = np.inf if M * L == 0.0 else 1.0 / (2.0 * M * L)

    memory = problem.initial_memory.copy()
    n = problem.w.size
    q_out = np.empty(n)
    k = 0
    while k < n:
        c = problem.b[k]
        end = k
        while end + 1 < n and abs(problem.b[end + 1] - c) < gamma:
            end += 1
        blk = slice(k, end + 1)
        w_blk = problem.w[blk]
        b_blk = problem.b[blk]

        def const_solve(rhs):
            mem = memory.copy()
            q = np.empty_like(rhs)
            guess = None
            for i, wk in enumerate(rhs):
                q[i], mem = invert_step(mem, c, wk, problem.density,
                                        q_guess=guess, tol_rel=tol_rel)
                guess = q[i]
            return q, mem

        q_iter, mem_end = const_solve(w_blk)
        for _ in range(_MAX_ITER):
            p_vals = _forward_P(problem, memory, q_iter)
            rhs = w_blk - (b_blk - c) * p_vals
            q_new, mem_end = const_solve(rhs)
            delta = float(np.max(np.abs(q_new - q_iter)))
            q_iter = q_new
            if delta <= 1e-12 * (1.0 + float(np.max(np.abs(q_new)))):
                break
        else:  # pragma: no cover
            raise RuntimeError("picard block iteration did not converge")
        q_out[blk] = q_iter
        memory = mem_end
        k = end + 1
    return q_out


def lipschitz_bound_theorem1(b_bar: float, M: float) -> float:
    """Guaranteed bound exp(b_bar * M) on ||q1 - q2|| / ||w1 - w2|| for shared b."""
    if b_bar < 0.0 or M < 0.0:
        raise InvalidParameterError("b_bar and M must be nonnegative")
    return float(np.exp(b_bar * M))


def lipschitz_bound_prop3(b_bar: float, M: float, M1: float, dw: float, db: float) -> float:
    """Bound exp(b_bar * M) (dw + M1 db) on ||q1 - q2|| for data differing in w and b."""
    if min(b_bar, M, M1, dw, db) < 0.0:
        raise InvalidParameterError("all arguments must be nonnegative")
    return float(np.exp(b_bar * M) * (dw + M1 * db))

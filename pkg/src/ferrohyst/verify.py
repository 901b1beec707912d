"""Property-verification suites exposed through the CLI.

Every suite draws deterministic random cases from a seed, checks one provable
property of the operators or the material law, and reports worst-case margins.
Suites return a :class:`SuiteResult`; the CLI writes the rows as CSV and maps
``ok`` to the exit status.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .constitutive import (
    MaterialParams,
    ShapeFunction,
    clausius_duhem_residuals,
    drive_field,
    drive_stress,
)
from .errors import InvalidParameterError
from .hysteresis import (
    MemoryState,
    PreisachDensity,
    RGrid,
    evolve_memory,
    operator_series,
    play_init,
    play_update,
    preisach_output,
    potential_output,
    replay_inputs,
)
from .inversion import (
    InversionProblem,
    invert_trajectory,
    lipschitz_bound_prop3,
    lipschitz_bound_theorem1,
)

__all__ = ["SuiteResult", "run_suite", "SUITES"]


@dataclass
class SuiteResult:
    name: str
    ok: bool
    rows: list = field(default_factory=list)
    summary: str = ""

    @property
    def columns(self):
        return list(self.rows[0].keys()) if self.rows else []


def _piecewise_linear(rng, n, knots, lo, hi):
    vals = rng.uniform(lo, hi, knots)
    x = np.linspace(0.0, 1.0, knots)
    return np.interp(np.linspace(0.0, 1.0, n), x, vals)


def _default_density_grid(m=400):
    return PreisachDensity.projection(), RGrid.uniform(m=m, cutoff=4.0)


# ---------------------------------------------------------------------------
# suites
# ---------------------------------------------------------------------------

def suite_dissipation(seed=0, cases=1000, **_) -> SuiteResult:
    """Every discrete dissipation increment q dP - dU of random piecewise
    monotone inputs is >= -1e-10 * M (1 + max|q|)."""
    rng = np.random.default_rng(seed)
    density, grid = _default_density_grid()
    rows = []
    ok = True
    for case in range(cases):
        n_seg = int(rng.integers(2, 51))
        targets = rng.uniform(-2.0, 2.0, n_seg)
        p, u, _ = operator_series(density, MemoryState.virgin(grid), targets)
        diss = targets[1:] * np.diff(p) - np.diff(u)
        first = targets[0] * p[0] - u[0]
        worst = min(float(np.min(diss)) if diss.size else 0.0, float(first))
        scale = density.M * (1.0 + float(np.max(np.abs(targets))))
        threshold = -1e-10 * scale
        ok &= worst >= threshold
        rows.append({"case": case, "min_increment": worst, "threshold": threshold})
    worst_all = min(r["min_increment"] for r in rows)
    return SuiteResult("dissipation", ok, rows,
                       f"worst increment {worst_all:.3e} over {cases} inputs")


def _solve_pair(density, grid, b, w):
    problem = InversionProblem(np.arange(w.size, dtype=float), b, w, density,
                               MemoryState.virgin(grid))
    return invert_trajectory(problem)


def suite_lipschitz(seed=0, cases=500, bbar=1.0, n_stamps=61, **_) -> SuiteResult:
    """Empirical inverse-operator bounds: shared-coefficient pairs against
    exp(bbar M), varying-coefficient pairs against exp(bbar M)(dw + M1 db)."""
    rng = np.random.default_rng(seed)
    density, grid = _default_density_grid()
    bound_shared = lipschitz_bound_theorem1(bbar, density.M)
    rows = []
    ok = True
    for pair in range(cases):
        b = _piecewise_linear(rng, n_stamps, 9, 0.0, bbar)
        w1 = _piecewise_linear(rng, n_stamps, 9, -1.8, 1.8)
        w2 = _piecewise_linear(rng, n_stamps, 9, -1.8, 1.8)
        q1 = _solve_pair(density, grid, b, w1)
        q2 = _solve_pair(density, grid, b, w2)
        dw = float(np.max(np.abs(w1 - w2)))
        if dw < 1e-6:
            continue
        ratio = float(np.max(np.abs(q1 - q2))) / dw
        ok &= ratio <= bound_shared + 1e-8
        rows.append({"pair_id": pair, "ratio": ratio, "bound": bound_shared})
    for pair in range(cases):
        b1 = _piecewise_linear(rng, n_stamps, 9, 0.0, bbar)
        b2 = _piecewise_linear(rng, n_stamps, 9, 0.0, bbar)
        w1 = _piecewise_linear(rng, n_stamps, 9, -1.8, 1.8)
        w2 = _piecewise_linear(rng, n_stamps, 9, -1.8, 1.8)
        q1 = _solve_pair(density, grid, b1, w1)
        q2 = _solve_pair(density, grid, b2, w2)
        dw = float(np.max(np.abs(w1 - w2)))
        db = float(np.max(np.abs(b1 - b2)))
        rhs = lipschitz_bound_prop3(bbar, density.M, density.M1, dw, db)
        if rhs < 1e-6:
            continue
        ratio = float(np.max(np.abs(q1 - q2))) / rhs
        ok &= ratio <= 1.0 + 1e-8
        rows.append({"pair_id": cases + pair, "ratio": ratio, "bound": 1.0})
    worst = max((r["ratio"] / r["bound"] for r in rows), default=0.0)
    return SuiteResult("lipschitz", ok, rows,
                       f"worst ratio/bound {worst:.6f} over {len(rows)} pairs")


def _play_series(values, r):
    """Play outputs along a value sequence, initialized from the first value."""
    out = np.empty(len(values))
    xi = float(play_init(values[0], r))
    out[0] = xi
    for k in range(1, len(values)):
        xi = float(play_update(xi, values[k], r))
        out[k] = xi
    return out


def suite_brokate(seed=0, cases=200, **_) -> SuiteResult:
    """Play composition: the (r2 - r1)-play of the r1-play trajectory equals the
    r2-play exactly; node values are 1-Lipschitz in the memory level."""
    rng = np.random.default_rng(seed)
    _, grid = _default_density_grid()
    rows = []
    ok = True
    worst_comp = 0.0
    worst_ord = 0.0
    for case in range(cases):
        n = int(rng.integers(3, 31))
        values = np.concatenate(([0.0], rng.uniform(-2.0, 2.0, n)))
        r1 = float(rng.uniform(0.05, 1.5))
        r2 = r1 + float(rng.uniform(0.05, 1.5))
        xi1 = _play_series(values, r1)
        xi2 = _play_series(values, r2)
        eta = _play_series(xi1, r2 - r1)
        comp_err = float(np.max(np.abs(eta - xi2)))
        mem = replay_inputs(MemoryState.virgin(grid), values[1:])
        gaps = np.diff(grid.nodes)
        ord_err = float(np.max(np.abs(np.diff(mem.xi)) - gaps))
        worst_comp = max(worst_comp, comp_err)
        worst_ord = max(worst_ord, ord_err)
        ok &= comp_err <= 1e-12 and ord_err <= 1e-12
        rows.append({"case": case, "composition_error": comp_err, "ordering_margin": ord_err})
    return SuiteResult("brokate", ok, rows,
                       f"worst composition {worst_comp:.2e}, ordering excess {worst_ord:.2e}")


def suite_madelung(seed=0, cases=200, **_) -> SuiteResult:
    """Return-point memory: closing a minor loop restores P, U and the full
    memory (corner closure a->b->a->b, and a->b->a inside the envelope)."""
    rng = np.random.default_rng(seed)
    density, grid = _default_density_grid()
    rows = []
    ok = True
    worst = 0.0
    for case in range(cases):
        n = int(rng.integers(2, 21))
        history = rng.uniform(-2.0, 2.0, n)
        lo_v, hi_v = sorted(rng.uniform(-1.8, 1.8, 2))
        if hi_v - lo_v < 0.05:
            hi_v = lo_v + 0.05
        mem = replay_inputs(MemoryState.virgin(grid), history)

        # corner closure: state at the second visit of b equals the first
        mem_b1 = evolve_memory(evolve_memory(mem, lo_v), hi_v)
        mem_b2 = evolve_memory(evolve_memory(mem_b1, lo_v), hi_v)
        err = float(np.max(np.abs(mem_b1.xi - mem_b2.xi)))
        err = max(err, abs(preisach_output(density, mem_b1) - preisach_output(density, mem_b2)))
        err = max(err, abs(potential_output(density, mem_b1) - potential_output(density, mem_b2)))

        # excursion closure: descend from c >= b to a, then a -> b -> a restores
        c = max(hi_v + 0.1, float(rng.uniform(hi_v, 2.0)))
        mem_a1 = evolve_memory(evolve_memory(mem, c), lo_v)
        mem_a2 = evolve_memory(evolve_memory(mem_a1, hi_v), lo_v)
        err2 = float(np.max(np.abs(mem_a1.xi - mem_a2.xi)))
        err2 = max(err2, abs(preisach_output(density, mem_a1) - preisach_output(density, mem_a2)))
        err2 = max(err2, abs(potential_output(density, mem_a1) - potential_output(density, mem_a2)))

        case_err = max(err, err2)
        worst = max(worst, case_err)
        ok &= case_err <= 1e-12
        rows.append({"case": case, "closure_error": case_err})
    return SuiteResult("madelung", ok, rows, f"worst loop-closure error {worst:.2e}")


def suite_rate_independence(seed=0, cases=50, **_) -> SuiteResult:
    """Reparametrizing time stamps (same ordered values) leaves solved
    trajectories bit-identical."""
    rng = np.random.default_rng(seed)
    density, grid = _default_density_grid()
    rows = []
    ok = True
    for case in range(cases):
        n = int(rng.integers(10, 60))
        w = _piecewise_linear(rng, n, 7, -1.5, 1.5)
        b = _piecewise_linear(rng, n, 5, 0.0, 1.0)
        t1 = np.linspace(0.0, 1.0, n)
        warp = np.sort(rng.uniform(0.0, 5.0, n))
        warp[0] = 0.0
        t2 = np.maximum.accumulate(warp + np.arange(n) * 1e-9)
        q1 = invert_trajectory(InversionProblem(t1, b, w, density, MemoryState.virgin(grid)))
        q2 = invert_trajectory(InversionProblem(t2, b, w, density, MemoryState.virgin(grid)))
        same = bool(np.array_equal(q1, q2))
        ok &= same
        rows.append({"case": case, "bit_identical": int(same)})
    return SuiteResult("rate-independence", ok, rows,
                       f"{sum(r['bit_identical'] for r in rows)}/{len(rows)} bit-identical")


def suite_clausius_duhem(seed=0, cases=200, **_) -> SuiteResult:
    """Random excitation programs through both drivers satisfy the discrete
    second-law residual >= -1e-8 (1 + max|sigma| + max|E|)."""
    rng = np.random.default_rng(seed)
    density, grid = _default_density_grid(m=200)
    rows = []
    ok = True
    worst_norm = np.inf
    for case in range(cases):
        shape = ShapeFunction.linear() if case % 2 == 0 else ShapeFunction.quartic()
        params = MaterialParams(f=shape)
        if case % 4 < 3:
            e_series = _piecewise_linear(rng, 400, 6, -1.0, 1.0)
            e_series[0] = 0.0
            traj = drive_field(params, density, e_series, grid=grid)
        else:
            t_pol, e_pol = np.linspace(0.0, 1.0, 151), np.linspace(0.0, 1.0, 151)
            pol = drive_field(params, density, e_pol, t=t_pol, grid=grid)
            mem = replay_inputs(MemoryState.virgin(grid), pol.q)
            sig = _piecewise_linear(rng, 301, 5, -0.8, 0.0)
            sig[0] = 0.0
            traj = drive_stress(params, density, sig, pol.D[-1] * np.ones_like(sig),
                                t=np.linspace(1.01, 2.0, 301), grid=grid,
                                initial_memory=mem, eps0=pol.eps[-1], q_guess=pol.q[-1])
        res = clausius_duhem_residuals(traj)
        scale = 1.0 + float(np.max(np.abs(traj.sigma))) + float(np.max(np.abs(traj.E)))
        worst = float(np.min(res)) / scale
        worst_norm = min(worst_norm, worst)
        ok &= worst >= -1e-8
        rows.append({"case": case, "min_residual_scaled": worst})
    return SuiteResult("clausius-duhem", ok, rows,
                       f"worst scaled residual {worst_norm:.3e} over {cases} programs")


def _regression_order(rows) -> float:
    """Least-squares slope of log2(error) against the refinement level index."""
    errs = np.array([r["error"] for r in rows])
    if np.any(errs <= 1e-14):
        return float("inf")
    k = np.arange(errs.size)
    slope = np.polyfit(k, np.log2(errs), 1)[0]
    return float(-slope)


def suite_convergence(seed=0, cases=0, levels=4, **_) -> SuiteResult:
    """Refinement orders from the convergence ladders (point quadrature, beam
    space and time), assessed by the regression slope over each ladder."""
    from .convergence import beam_spatial_convergence, beam_temporal_convergence, point_convergence

    ladders = (("point", point_convergence(levels=levels), 0.9),
               ("beam_h", beam_spatial_convergence(levels=min(levels, 4)), 0.9),
               ("beam_dt", beam_temporal_convergence(levels=min(levels, 3)), 0.6))
    rows = []
    ok = True
    notes = []
    for label, target_rows, floor in ladders:
        rows.extend(target_rows)
        for target in sorted({r["target"] for r in target_rows}):
            order = _regression_order([r for r in target_rows if r["target"] == target])
            ok &= order >= floor
            notes.append(f"{target}: order {order:.2f}")
    return SuiteResult("convergence", ok, rows, "; ".join(notes))


SUITES = {
    "dissipation": suite_dissipation,
    "lipschitz": suite_lipschitz,
    "brokate": suite_brokate,
    "madelung": suite_madelung,
    "rate-independence": suite_rate_independence,
    "clausius-duhem": suite_clausius_duhem,
    "convergence": suite_convergence,
}


def run_suite(name: str, seed: int = 0, cases: int = None, **kwargs) -> SuiteResult:
    if name not in SUITES:
        raise InvalidParameterError(
            f"unknown suite {name!r}; available: {', '.join(sorted(SUITES))}")
    defaults = {"dissipation": 1000, "lipschitz": 500, "brokate": 200, "madelung": 200,
                "rate-independence": 50, "clausius-duhem": 200, "convergence": 0}
    n = defaults[name] if cases is None else cases
    return SUITES[name](seed=seed, cases=n, **kwargs)

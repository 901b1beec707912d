"""1D longitudinal piezoelectric beam solver.

rho u_tt - (nu u_xt + c u_x + W[u_x])_x = 0 on (0, l), clamped at x = 0 and
loaded with traction s(t) at x = l, with the hysteretic stress functional

    W[eps] = -(e/kappa) (r - e eps - P[q]) + f'(eps) U[q],

where q per element follows from the spatially constant dielectric
displacement datum r(t).  Discretization: piecewise-linear finite elements
(element-constant strain, element-local hysteresis memory), backward Euler in
time, and Picard sweeps that freeze W at the previous iterate's strain,
mirroring the fixed-point construction that proves well-posedness.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import lru_cache

import numpy as np
from scipy.linalg import solve_banded

from .constitutive import MaterialParams, solve_field_from_D
from .errors import InvalidParameterError, StepDivergenceError
from .hysteresis import MemoryState, RGrid, _evolved_xi, _P_raw, _U_raw
from .inversion import invert_step_many

__all__ = [
    "BeamMesh",
    "BeamState",
    "BoundaryData",
    "StepperConfig",
    "BeamRun",
    "initial_beam_state",
    "hysteretic_stress_functional",
    "step",
    "simulate",
    "energy_audit",
]


@dataclass(frozen=True)
class BeamMesh:
    """Uniform mesh of the interval (0, length) with n_elements linear elements."""

    length: float = 1.0
    n_elements: int = 64

    def __post_init__(self):
        if self.length <= 0.0 or self.n_elements < 1:
            raise InvalidParameterError("need length > 0 and n_elements >= 1")

    @property
    def h(self) -> float:
        return self.length / self.n_elements

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(0.0, self.length, self.n_elements + 1)


@dataclass
class BoundaryData:
    """Dielectric displacement datum r(t) = D(0,t) = D(l,t) and traction s(t) = sigma(l,t)."""

    t: np.ndarray
    r: np.ndarray
    s: np.ndarray

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        self.r = np.broadcast_to(np.asarray(self.r, dtype=float), self.t.shape)
        self.s = np.broadcast_to(np.asarray(self.s, dtype=float), self.t.shape)

    @classmethod
    def constant(cls, r: float = 0.0, s: float = 0.0, T: float = 1.0) -> "BoundaryData":
        return cls(np.array([0.0, T]), np.array([r, r]), np.array([s, s]))

    def r_at(self, time: float) -> float:
        return float(np.interp(time, self.t, self.r))

    def s_at(self, time: float) -> float:
        return float(np.interp(time, self.t, self.s))


@dataclass
class StepperConfig:
    dt: float = 1e-3
    picard_tol: float = 1e-10
    picard_max: int = 50
    lumped_mass: bool = False

    def __post_init__(self):
        if self.dt <= 0.0 or self.picard_tol <= 0.0 or self.picard_max < 1:
            raise InvalidParameterError("need dt > 0, picard_tol > 0, picard_max >= 1")


@dataclass
class BeamState:
    """Beam unknowns plus per-element electrical state and hysteresis memory."""

    mesh: BeamMesh
    grid: RGrid
    t: float
    u: np.ndarray          # nodal displacements, u[0] = 0
    v: np.ndarray          # nodal velocities
    xi: np.ndarray         # (n_elements, m) play values
    q: np.ndarray          # per-element hysteresis input
    E: np.ndarray          # per-element field
    P: np.ndarray          # per-element polarization output
    U: np.ndarray          # per-element potential output
    picard_sweeps: int = 0

    @property
    def strain(self) -> np.ndarray:
        return np.diff(self.u) / self.mesh.h

    def element_memory(self, j: int) -> MemoryState:
        return MemoryState(self.grid, self.xi[j].copy(), float(self.q[j]))

    def copy(self) -> "BeamState":
        return BeamState(self.mesh, self.grid, self.t, self.u.copy(), self.v.copy(),
                         self.xi.copy(), self.q.copy(), self.E.copy(), self.P.copy(),
                         self.U.copy(), self.picard_sweeps)


def hysteretic_stress_functional(params: MaterialParams, eps_element: float,
                                 memory: MemoryState, r_k: float, density):
    """Per-element stress contribution W = -(e/kappa)(r - e eps - P) + f'(eps) U."""
    q, _E, mem = solve_field_from_D(params, eps_element, r_k, memory, density)
    p = float(_P_raw(density, mem.grid, mem.xi))
    u = float(_U_raw(density, mem.grid, mem.xi))
    _, fp = params.f.eval(eps_element)
    w_val = -(params.e_pz / params.kappa) * (r_k - params.e_pz * eps_element - p) + fp * u
    return w_val, mem


# ---------------------------------------------------------------------------
# assembly helpers (free dofs are nodes 1..N; node 0 is clamped)
# ---------------------------------------------------------------------------

@lru_cache(maxsize=32)
def _banded_matrices(mesh: BeamMesh, lumped: bool):
    n = mesh.n_elements
    h = mesh.h
    k_diag = np.full(n, 2.0 / h)
    k_diag[-1] = 1.0 / h
    k_off = np.full(n - 1, -1.0 / h)
    if lumped:
        m_diag = np.full(n, h)
        m_diag[-1] = 0.5 * h
        m_off = np.zeros(n - 1)
    else:
        m_diag = np.full(n, 2.0 * h / 3.0)
        m_diag[-1] = h / 3.0
        m_off = np.full(n - 1, h / 6.0)
    return k_diag, k_off, m_diag, m_off


def _tridiag_mul(diag, off, x):
    y = diag * x
    y[:-1] += off * x[1:]
    y[1:] += off * x[:-1]
    return y


def _internal_force(w_elements: np.ndarray) -> np.ndarray:
    """Nodal forces of the element-constant stress field: F_i = W_i - W_{i+1}
    for interior free nodes, F_N = W_N."""
    f = np.empty_like(w_elements)
    f[:-1] = w_elements[:-1] - w_elements[1:]
    f[-1] = w_elements[-1]
    return f


def _element_field_solve(params: MaterialParams, density, grid: RGrid, xi0: np.ndarray,
                         eps: np.ndarray, r_k: float, q_guess: np.ndarray):
    f_val, fp = params.f.eval(eps)
    b = 1.0 / (params.kappa * f_val)
    w = (r_k - params.e_pz * eps) * b
    q = invert_step_many(xi0, b, w, density, grid, q_guess=q_guess)
    xi = _evolved_xi(xi0, grid.nodes, q[:, None])
    p = _P_raw(density, grid, xi)
    u = _U_raw(density, grid, xi)
    E = f_val * q
    w_stress = -(params.e_pz / params.kappa) * (r_k - params.e_pz * eps - p) + fp * u
    return q, xi, p, u, E, w_stress


def initial_beam_state(mesh: BeamMesh, grid: RGrid, u0: np.ndarray, u1: np.ndarray,
                       params: MaterialParams, density, r0: float = 0.0) -> BeamState:
    """Initial state: virgin element memories brought into equilibrium with the
    initial strain and the dielectric datum r(0)."""
    u0 = np.asarray(u0, dtype=float)
    u1 = np.asarray(u1, dtype=float)
    if u0.shape != (mesh.n_elements + 1,) or u1.shape != u0.shape:
        raise InvalidParameterError("u0 and u1 must be nodal arrays")
    if abs(u0[0]) > 0.0 or abs(u1[0]) > 0.0:
        raise InvalidParameterError("initial data must satisfy the clamp u(0) = 0")
    eps = np.diff(u0) / mesh.h
    xi_virgin = np.zeros((mesh.n_elements, grid.nodes.size))
    q, xi, p, u_pot, E, _w = _element_field_solve(
        params, density, grid, xi_virgin, eps, r0, q_guess=np.zeros(mesh.n_elements))
    return BeamState(mesh, grid, 0.0, u0.copy(), u1.copy(), xi, q, E, p, u_pot)


def step(state: BeamState, boundary: BoundaryData, cfg: StepperConfig,
         params: MaterialParams, density) -> BeamState:
    """One backward-Euler step of the variational problem; W is frozen at the
    Picard iterate's strain and updated each sweep until the strain-rate
    difference of successive sweeps drops below tolerance in discrete L2."""
    mesh = state.mesh
    grid = state.grid
    n = mesh.n_elements
    h = mesh.h
    dt = cfg.dt
    t_new = state.t + dt
    r_new = boundary.r_at(t_new)
    s_new = boundary.s_at(t_new)

    k_diag, k_off, m_diag, m_off = _banded_matrices(mesh, cfg.lumped_mass)
    a_diag = (params.rho / dt) * m_diag + (params.c_E * dt + params.nu) * k_diag
    a_off = (params.rho / dt) * m_off + (params.c_E * dt + params.nu) * k_off
    ab = np.zeros((3, n))
    ab[0, 1:] = a_off
    ab[1, :] = a_diag
    ab[2, :-1] = a_off

    u_old = state.u[1:]
    v_old = state.v[1:]
    xi0 = state.xi
    base_rhs = (params.rho / dt) * _tridiag_mul(m_diag, m_off, v_old) \
        - params.c_E * _tridiag_mul(k_diag, k_off, u_old)
    base_rhs[-1] += s_new

    eps_iter = state.strain + dt * np.diff(state.v) / h   # explicit predictor
    q_guess = state.q
    eps_new = eps_iter
    converged = False
    sweeps = 0
    for sweeps in range(1, cfg.picard_max + 1):
        _q, _xi, _p, _u_pot, _E, w_stress = _element_field_solve(
            params, density, grid, xi0, eps_iter, r_new, q_guess)
        rhs = base_rhs - _internal_force(w_stress)
        v_new = solve_banded((1, 1), ab, rhs)
        u_new = u_old + dt * v_new
        eps_new = np.empty(n)
        eps_new[0] = u_new[0] / h
        eps_new[1:] = np.diff(u_new) / h
        delta = np.sqrt(h * np.sum((eps_new - eps_iter) ** 2)) / dt
        eps_iter = eps_new
        q_guess = _q
        if delta < cfg.picard_tol:
            converged = True
            break
    if not converged:
        raise StepDivergenceError(
            f"picard iteration did not converge in {cfg.picard_max} sweeps at t={t_new}"
            " (reduce dt)")

    q, xi, p, u_pot, E, _w = _element_field_solve(
        params, density, grid, xi0, eps_new, r_new, q_guess)
    u_full = np.concatenate(([0.0], u_old + dt * v_new))
    v_full = np.concatenate(([0.0], v_new))
    return BeamState(mesh, grid, t_new, u_full, v_full, xi, q, E, p, u_pot,
                     picard_sweeps=sweeps)


ENERGY_COLUMNS = ("t", "K", "F", "diss_hyst", "diss_visc", "work_boundary", "residual")


@dataclass
class BeamRun:
    """Snapshots plus the per-step energy report of one simulation."""

    snapshots: list
    energy: dict = dc_field(default_factory=dict)


def _kinetic(state: BeamState, params: MaterialParams, lumped: bool) -> float:
    _kd, _ko, m_diag, m_off = _banded_matrices(state.mesh, lumped)
    v = state.v[1:]
    return 0.5 * params.rho * float(v @ _tridiag_mul(m_diag, m_off, v))


def _stored_energy(state: BeamState, params: MaterialParams) -> float:
    eps = state.strain
    f_val, _ = params.f.eval(eps)
    dens = (0.5 * params.c_E * eps**2 + 0.5 * params.kappa * state.E**2
            + f_val * state.U)
    return state.mesh.h * float(np.sum(dens))


def simulate(u0, u1, boundary: BoundaryData, T: float, cfg: StepperConfig,
             params: MaterialParams, density, mesh: BeamMesh = None,
             grid: RGrid = None, snapshot_stride: int = 1) -> BeamRun:
    """Time-step to T; returns snapshots (every ``snapshot_stride`` steps) and a
    per-step energy report: kinetic K, stored F, hysteretic and viscous
    dissipation increments, boundary work increment (traction power plus the
    electrical work of the impressed datum), and the balance residual."""
    mesh = mesh or BeamMesh()
    grid = grid or RGrid.uniform()
    state = initial_beam_state(mesh, grid, u0, u1, params, density,
                               r0=boundary.r_at(0.0))
    n_steps = int(round(T / cfg.dt))
    h = mesh.h

    snapshots = [state.copy()]
    cols = {name: np.zeros(n_steps + 1) for name in ENERGY_COLUMNS}
    cols["K"][0] = _kinetic(state, params, cfg.lumped_mass)
    cols["F"][0] = _stored_energy(state, params)

    for k in range(1, n_steps + 1):
        prev = state
        state = step(state, boundary, cfg, params, density)
        f_val, _ = params.f.eval(state.strain)
        diss_h = h * float(np.sum(f_val * (state.q * (state.P - prev.P)
                                           - (state.U - prev.U))))
        d_eps = state.strain - prev.strain
        diss_v = params.nu * h * float(np.sum(d_eps**2)) / cfg.dt
        work = cfg.dt * boundary.s_at(state.t) * state.v[-1]
        d_r = boundary.r_at(state.t) - boundary.r_at(prev.t)
        work += d_r * h * float(np.sum(state.E))
        k_en = _kinetic(state, params, cfg.lumped_mass)
        f_en = _stored_energy(state, params)
        cols["t"][k] = state.t
        cols["K"][k] = k_en
        cols["F"][k] = f_en
        cols["diss_hyst"][k] = diss_h
        cols["diss_visc"][k] = diss_v
        cols["work_boundary"][k] = work
        cols["residual"][k] = (k_en - cols["K"][k - 1]) + (f_en - cols["F"][k - 1]) \
            + diss_h + diss_v - work
        if k % snapshot_stride == 0 or k == n_steps:
            snapshots.append(state.copy())

    return BeamRun(snapshots=snapshots, energy=cols)


def energy_audit(run: BeamRun) -> np.ndarray:
    """Per-step energy balance residuals of a simulation; the dissipation
    entries of the report must additionally be nonnegative up to round-off."""
    return run.energy["residual"][1:]

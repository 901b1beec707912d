"""Thermodynamically consistent ferroelectric/ferroelastic material law.

State variables are strain eps and electric field E; the hysteresis operator
acts on the internal variable q = E / f(eps).  Outputs:

    sigma = nu eps_t + c eps - e E + f'(eps) U[q]
    D     = e eps + kappa E + P[q]
    F     = c/2 eps^2 + kappa/2 E^2 + f(eps) U[q]

When the dielectric displacement is prescribed (D = r from the boundary
datum), the field follows from q + b P[q] = w with b = 1/(kappa f(eps)) and
w = (r - e eps)/(kappa f(eps)), solved by the inversion module.  Two
quasi-static material-point drivers produce trajectories: field-driven
(E prescribed, strain solved from the stress equation) and stress-driven
(sigma and r prescribed, strain solved with the field solve nested inside).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ._roots import expanding_root
from .errors import InvalidParameterError, OutOfRangeError, ShapeDegeneracyError
from .hysteresis import (
    MemoryState,
    RGrid,
    _evolved_xi,
    _P_raw,
    _U_raw,
    evolve_memory,
    potential_output,
    preisach_output,
)
from .inversion import invert_step

__all__ = [
    "ShapeFunction",
    "MaterialParams",
    "PointState",
    "PointTrajectory",
    "TRAJECTORY_COLUMNS",
    "shape_eval",
    "solve_field_from_D",
    "stress",
    "dielectric_displacement",
    "free_energy",
    "clausius_duhem_residuals",
    "drive_field",
    "drive_stress",
]

_F_FLOOR = 0.05          # positive floor preserved by the C1 extension
_MARGIN = 0.5            # maximal extension width beyond [-1, 1]
_WORKING_RANGE = 1.5


def _extension_width(f_edge: float, slope_out: float) -> float:
    """Width of the C1 ramp taking f' linearly to zero outside the core interval.
    A downhill ramp of width w lowers f by |slope| w / 2, so the width shrinks
    when the full margin would push f below the floor."""
    if slope_out >= 0.0:
        return _MARGIN
    room = f_edge - _F_FLOOR
    if room <= 0.0:
        return 0.0
    return min(_MARGIN, 2.0 * room / (-slope_out))


@dataclass(frozen=True, eq=False)
class ShapeFunction:
    """Positive shape function f with derivative, C1-extended beyond [-1, 1]."""

    variant: str
    core_f: Callable
    core_fp: Callable

    def __post_init__(self):
        f_r, d_r = float(self.core_f(1.0)), float(self.core_fp(1.0))
        f_l, d_l = float(self.core_f(-1.0)), float(self.core_fp(-1.0))
        object.__setattr__(self, "_right", (f_r, d_r, _extension_width(f_r, d_r)))
        object.__setattr__(self, "_left", (f_l, d_l, _extension_width(f_l, -d_l)))
        probe = np.linspace(-_WORKING_RANGE, _WORKING_RANGE, 3001)
        fmin = float(np.min(self.eval(probe)[0]))
        if fmin <= 0.0:
            raise ShapeDegeneracyError("shape function is not positive on the working range")
        object.__setattr__(self, "f_min", fmin)

    @classmethod
    def linear(cls) -> "ShapeFunction":
        return cls("linear", lambda x: 1.1 - x, lambda x: -np.ones_like(np.asarray(x, dtype=float)))

    @classmethod
    def quartic(cls) -> "ShapeFunction":
        return cls("quartic", lambda x: 0.5 + 0.25 * (np.asarray(x, dtype=float) - 1.0) ** 4,
                   lambda x: (np.asarray(x, dtype=float) - 1.0) ** 3)

    @classmethod
    def from_table(cls, knots, values) -> "ShapeFunction":
        """Monotone C1 interpolant of user samples on [-1, 1]."""
        from scipy.interpolate import PchipInterpolator

        knots = np.asarray(knots, dtype=float)
        values = np.asarray(values, dtype=float)
        if knots[0] != -1.0 or knots[-1] != 1.0:
            raise InvalidParameterError("shape table must cover [-1, 1]")
        if np.any(values <= 0.0):
            raise InvalidParameterError("shape table values must be positive")
        interp = PchipInterpolator(knots, values)
        return cls("user-table", interp, interp.derivative())

    @property
    def working_range(self) -> tuple:
        return (-_WORKING_RANGE, _WORKING_RANGE)

    def eval(self, eps):
        """(f, f') with the ramp extension; raises out-of-range beyond +-1.5."""
        eps_arr = np.asarray(eps, dtype=float)
        if np.any(np.abs(eps_arr) > _WORKING_RANGE * (1.0 + 1e-12)):
            raise OutOfRangeError(
                f"strain {eps!r} outside the extended working range +-{_WORKING_RANGE}")
        scalar = eps_arr.ndim == 0
        x = np.atleast_1d(eps_arr)
        f = np.empty_like(x)
        fp = np.empty_like(x)

        core = np.abs(x) <= 1.0
        if np.any(core):
            f[core] = self.core_f(x[core])
            fp[core] = self.core_fp(x[core])

        for sign, (f_edge, d_edge, width) in ((1.0, self._right), (-1.0, self._left)):
            out = (sign * x) > 1.0
            if not np.any(out):
                continue
            t = sign * x[out] - 1.0                       # distance beyond the edge
            d_out = sign * d_edge                         # df/dt moving outward
            if width > 0.0:
                ramp = np.minimum(t, width)
                f_ext = f_edge + d_out * (ramp - 0.5 * ramp**2 / width)
                fp_ext = np.where(t < width, d_edge * (1.0 - t / width), 0.0)
            else:
                f_ext = np.full_like(t, f_edge)
                fp_ext = np.zeros_like(t)
            f[out] = f_ext
            fp[out] = fp_ext

        if scalar:
            return float(f[0]), float(fp[0])
        return f, fp


def shape_eval(f: ShapeFunction, eps):
    """f(eps) and f'(eps); linear variant is 1.1 - eps, quartic 1/2 + (eps-1)^4/4."""
    return f.eval(eps)


@dataclass(frozen=True)
class MaterialParams:
    """Elastic/dielectric/coupling/viscosity/density constants plus the shape function."""

    c_E: float = 1.0
    e_pz: float = 0.0
    kappa: float = 0.01
    nu: float = 0.0
    rho: float = 1.0
    f: ShapeFunction = field(default_factory=ShapeFunction.linear)

    def __post_init__(self):
        if self.c_E <= 0.0 or self.kappa <= 0.0 or self.rho <= 0.0 or self.nu < 0.0:
            raise InvalidParameterError("need c_E > 0, kappa > 0, rho > 0, nu >= 0")


# ---------------------------------------------------------------------------
# constitutive relations at one state
# ---------------------------------------------------------------------------

def solve_field_from_D(params: MaterialParams, eps_k: float, r_k: float,
                       memory: MemoryState, density, q_guess: float = None):
    """Eliminate the field from the dielectric boundary datum: solve
    q + P[q]/(kappa f) = (r - e eps)/(kappa f); returns (q_k, E_k, memory')."""
    f_val, _ = params.f.eval(eps_k)
    if f_val < 0.5 * _F_FLOOR:
        raise ShapeDegeneracyError(f"shape function {f_val!r} below floor at eps={eps_k!r}")
    b_k = 1.0 / (params.kappa * f_val)
    w_k = (r_k - params.e_pz * eps_k) * b_k
    q_k, memory = invert_step(memory, b_k, w_k, density, q_guess=q_guess)
    return q_k, f_val * q_k, memory


def stress(params: MaterialParams, density, eps: float, eps_dot: float, E: float,
           memory_after: MemoryState) -> float:
    """sigma = nu eps_t + c eps - e E + f'(eps) U."""
    _, fp = params.f.eval(eps)
    u = potential_output(density, memory_after)
    return params.nu * eps_dot + params.c_E * eps - params.e_pz * E + fp * u


def dielectric_displacement(params: MaterialParams, density, eps: float, E: float,
                            memory_after: MemoryState) -> float:
    """D = e eps + kappa E + P."""
    return params.e_pz * eps + params.kappa * E + preisach_output(density, memory_after)


def free_energy(params: MaterialParams, density, eps: float, E: float,
                memory_after: MemoryState) -> float:
    """F = c/2 eps^2 + kappa/2 E^2 + f(eps) U."""
    f_val, _ = params.f.eval(eps)
    return (0.5 * params.c_E * eps * eps + 0.5 * params.kappa * E * E
            + f_val * potential_output(density, memory_after))


@dataclass
class PointState:
    """One material-point state with its derived outputs."""

    eps: float
    E: float
    memory: MemoryState
    q: float
    P: float
    U: float
    sigma: float
    D: float
    F: float

    @classmethod
    def evaluate(cls, params: MaterialParams, density, eps: float, E: float,
                 memory: MemoryState, eps_dot: float = 0.0) -> "PointState":
        """Evolve ``memory`` with q = E/f(eps) and fill the derived cache."""
        f_val, fp = params.f.eval(eps)
        q = E / f_val
        mem = evolve_memory(memory, q)
        p = preisach_output(density, mem)
        u = potential_output(density, mem)
        sig = params.nu * eps_dot + params.c_E * eps - params.e_pz * E + fp * u
        d = params.e_pz * eps + params.kappa * E + p
        f_energy = 0.5 * params.c_E * eps * eps + 0.5 * params.kappa * E * E + f_val * u
        return cls(eps=eps, E=E, memory=mem, q=q, P=p, U=u, sigma=sig, D=d, F=f_energy)


# ---------------------------------------------------------------------------
# trajectories and drivers
# ---------------------------------------------------------------------------

TRAJECTORY_COLUMNS = ("t", "eps", "E", "q", "P", "U", "sigma", "D", "F", "diss")


@dataclass
class PointTrajectory:
    """Time series of one material point; all arrays share the time stamps."""

    t: np.ndarray
    eps: np.ndarray
    E: np.ndarray
    q: np.ndarray
    P: np.ndarray
    U: np.ndarray
    sigma: np.ndarray
    D: np.ndarray
    F: np.ndarray
    diss: np.ndarray

    def __post_init__(self):
        if np.any(np.diff(self.t) <= 0.0):
            raise InvalidParameterError("time stamps must be strictly increasing")

    def column(self, name: str) -> np.ndarray:
        return getattr(self, name)

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(TRAJECTORY_COLUMNS)
            for k in range(self.t.size):
                writer.writerow(f"{self.column(c)[k]:.17g}" for c in TRAJECTORY_COLUMNS)

    @classmethod
    def read_csv(cls, path) -> "PointTrajectory":
        data = np.genfromtxt(path, delimiter=",", names=True)
        return cls(**{c: np.atleast_1d(data[c]) for c in TRAJECTORY_COLUMNS})


def clausius_duhem_residuals(traj: PointTrajectory) -> np.ndarray:
    """Per-step residual d_eps sigma_k + dD E_k - dF (right endpoint values);
    the second law requires it to be nonnegative up to discretization."""
    d_eps = np.diff(traj.eps)
    d_D = np.diff(traj.D)
    d_F = np.diff(traj.F)
    return d_eps * traj.sigma[1:] + d_D * traj.E[1:] - d_F


class _Recorder:
    def __init__(self, n):
        self.data = {c: np.zeros(n) for c in TRAJECTORY_COLUMNS}
        self._p_prev = 0.0
        self._u_prev = 0.0

    def put(self, k, t, eps, E, q, P, U, sigma, D, F):
        d = self.data
        d["t"][k] = t
        d["eps"][k] = eps
        d["E"][k] = E
        d["q"][k] = q
        d["P"][k] = P
        d["U"][k] = U
        d["sigma"][k] = sigma
        d["D"][k] = D
        d["F"][k] = F
        d["diss"][k] = 0.0 if k == 0 else q * (P - self._p_prev) - (U - self._u_prev)
        self._p_prev, self._u_prev = P, U

    def trajectory(self):
        return PointTrajectory(**self.data)


def _default_grid():
    return RGrid.uniform()


def drive_field(params: MaterialParams, density, E_series, sigma_target_series=None,
                t=None, grid: RGrid = None, initial_memory: MemoryState = None,
                eps0: float = 0.0, tol: float = 1e-12) -> PointTrajectory:
    """Quasi-static field-driven run: at each stamp solve the stress equation
    c eps - e E + f'(eps) U[E/f(eps)] (+ nu eps_t) = sigma_target for eps."""
    E_series = np.asarray(E_series, dtype=float)
    n = E_series.size
    if sigma_target_series is None:
        sigma_target_series = np.zeros(n)
    sigma_target_series = np.broadcast_to(np.asarray(sigma_target_series, dtype=float), (n,))
    t = np.arange(n, dtype=float) if t is None else np.asarray(t, dtype=float)
    if t.shape != E_series.shape:
        raise InvalidParameterError("t and E series must have equal length")

    grid = grid or _default_grid()
    memory = (initial_memory or MemoryState.virgin(grid)).copy()
    shape = params.f
    lo_lim, hi_lim = shape.working_range
    rec = _Recorder(n)
    eps_prev = eps0

    for k in range(n):
        E_k = E_series[k]
        sig_t = sigma_target_series[k]
        dt = t[k] - t[k - 1] if k > 0 else 0.0
        nu_dt = params.nu / dt if (params.nu > 0.0 and dt > 0.0) else 0.0

        def resid(eps):
            f_val, fp = shape.eval(eps)
            q = E_k / f_val
            xi = _evolved_xi(memory.xi, grid.nodes, q)
            u = float(_U_raw(density, grid, xi))
            return (nu_dt * (eps - eps_prev) + params.c_E * eps
                    - params.e_pz * E_k + fp * u - sig_t)

        eps_k = expanding_root(resid, eps_prev, lo_lim, hi_lim,
                               tol * (1.0 + abs(sig_t)), what="stress equation")
        f_val, fp = shape.eval(eps_k)
        q_k = E_k / f_val
        memory = evolve_memory(memory, q_k)
        p_k = float(_P_raw(density, grid, memory.xi))
        u_k = float(_U_raw(density, grid, memory.xi))
        eps_dot = (eps_k - eps_prev) / dt if (k > 0 and dt > 0.0) else 0.0
        sig_k = params.nu * eps_dot + params.c_E * eps_k - params.e_pz * E_k + fp * u_k
        d_k = params.e_pz * eps_k + params.kappa * E_k + p_k
        f_en = 0.5 * params.c_E * eps_k**2 + 0.5 * params.kappa * E_k**2 + f_val * u_k
        rec.put(k, t[k], eps_k, E_k, q_k, p_k, u_k, sig_k, d_k, f_en)
        eps_prev = eps_k

    return rec.trajectory()


def drive_stress(params: MaterialParams, density, sigma_series, r_series,
                 t=None, grid: RGrid = None, initial_memory: MemoryState = None,
                 eps0: float = 0.0, q_guess: float = 0.0,
                 tol: float = 1e-12) -> PointTrajectory:
    """Quasi-static stress-driven run with prescribed dielectric datum r(t):
    an outer root find on eps wraps the field solve from the D equation."""
    sigma_series = np.asarray(sigma_series, dtype=float)
    n = sigma_series.size
    r_series = np.broadcast_to(np.asarray(r_series, dtype=float), (n,))
    t = np.arange(n, dtype=float) if t is None else np.asarray(t, dtype=float)
    if t.shape != sigma_series.shape:
        raise InvalidParameterError("t and sigma series must have equal length")

    grid = grid or _default_grid()
    memory = (initial_memory or MemoryState.virgin(grid)).copy()
    shape = params.f
    lo_lim, hi_lim = shape.working_range
    rec = _Recorder(n)
    eps_prev = eps0
    q_prev = q_guess

    for k in range(n):
        sig_k = sigma_series[k]
        r_k = r_series[k]
        dt = t[k] - t[k - 1] if k > 0 else 0.0
        nu_dt = params.nu / dt if (params.nu > 0.0 and dt > 0.0) else 0.0

        def resid(eps):
            q, E, mem = solve_field_from_D(params, eps, r_k, memory, density,
                                           q_guess=q_prev)
            _, fp = shape.eval(eps)
            u = float(_U_raw(density, grid, mem.xi))
            return (nu_dt * (eps - eps_prev) + params.c_E * eps
                    - params.e_pz * E + fp * u - sig_k)

        eps_k = expanding_root(resid, eps_prev, lo_lim, hi_lim,
                               tol * (1.0 + abs(sig_k)), what="stress equation")
        q_k, E_k, memory = solve_field_from_D(params, eps_k, r_k, memory, density,
                                              q_guess=q_prev)
        f_val, fp = shape.eval(eps_k)
        p_k = float(_P_raw(density, grid, memory.xi))
        u_k = float(_U_raw(density, grid, memory.xi))
        eps_dot = (eps_k - eps_prev) / dt if (k > 0 and dt > 0.0) else 0.0
        sig_out = params.nu * eps_dot + params.c_E * eps_k - params.e_pz * E_k + fp * u_k
        d_k = params.e_pz * eps_k + params.kappa * E_k + p_k
        f_en = 0.5 * params.c_E * eps_k**2 + 0.5 * params.kappa * E_k**2 + f_val * u_k
        rec.put(k, t[k], eps_k, E_k, q_k, p_k, u_k, sig_out, d_k, f_en)
        eps_prev, q_prev = eps_k, q_k

    return rec.trajectory()

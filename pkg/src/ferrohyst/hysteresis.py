"""Scalar play operator, Preisach operator, and hysteresis potential on a
discretized memory grid.

The memory of one material point is the family of play outputs ``xi_r`` on a
grid of memory levels ``0 < r_1 < ... < r_m = R``.  Updates are exact for
piecewise monotone inputs (each sample step is treated as one monotone
segment), so all rate-independence, ordering and return-point properties hold
to round-off.  Operator outputs are midpoint-rule quadratures over the grid
cells; on the first cell, which has no left node (the r=0 play is the
identity), xi is extended constantly from the right node.  Interpolating the
first cell towards the identity play would admit slightly negative discrete
dissipation increments, while the constant extension keeps every monotone-step
increment nonnegative exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import quad

from .errors import (
    CutoffViolationError,
    InvalidDensityError,
    InvalidParameterError,
)

__all__ = [
    "RGrid",
    "MemoryState",
    "PreisachDensity",
    "PrandtlStack",
    "DiscreteWeights",
    "play_init",
    "play_update",
    "evolve_memory",
    "preisach_output",
    "potential_output",
    "dissipation_increment",
    "density_constants",
    "operator_outputs",
    "operator_series",
    "replay_inputs",
]

_CUTOFF_SLACK = 1.0 + 1e-12


# ---------------------------------------------------------------------------
# grid and memory state
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class RGrid:
    """Memory levels r_1 < ... < r_m = R (all > 0); cells are (r_{j-1}, r_j] with r_0 = 0."""

    nodes: np.ndarray

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        object.__setattr__(self, "nodes", nodes)
        if nodes.ndim != 1 or nodes.size == 0:
            raise InvalidParameterError("grid needs at least one node")
        if nodes[0] <= 0.0 or np.any(np.diff(nodes) <= 0.0):
            raise InvalidParameterError("grid nodes must be strictly increasing and > 0")
        edges = np.concatenate(([0.0], nodes))
        object.__setattr__(self, "_widths", np.diff(edges))
        object.__setattr__(self, "_midpoints", 0.5 * (edges[:-1] + edges[1:]))

    @classmethod
    def uniform(cls, m: int = 400, cutoff: float = 4.0) -> "RGrid":
        if m < 1 or cutoff <= 0.0:
            raise InvalidParameterError("need m >= 1 and cutoff > 0")
        return cls(cutoff * np.arange(1, m + 1) / m)

    @property
    def cutoff(self) -> float:
        return float(self.nodes[-1])

    @property
    def cell_widths(self) -> np.ndarray:
        return self._widths

    @property
    def cell_midpoints(self) -> np.ndarray:
        return self._midpoints

    def matches(self, other: "RGrid") -> bool:
        return self is other or np.array_equal(self.nodes, other.nodes)


@dataclass
class MemoryState:
    """Play values at every grid node plus the last input; value semantics."""

    grid: RGrid
    xi: np.ndarray
    current_input: float

    @classmethod
    def virgin(cls, grid: RGrid, q0: float = 0.0) -> "MemoryState":
        _check_cutoff(q0, grid)
        xi = np.maximum(q0 - grid.nodes, np.minimum(0.0, q0 + grid.nodes))
        return cls(grid, xi, float(q0))

    def copy(self) -> "MemoryState":
        return MemoryState(self.grid, self.xi.copy(), self.current_input)


def _check_cutoff(q, grid: RGrid):
    if abs(q) > grid.cutoff * _CUTOFF_SLACK:
        raise CutoffViolationError(
            f"input {q!r} exceeds memory cutoff R={grid.cutoff}; memory would be truncated"
        )


# ---------------------------------------------------------------------------
# play operator
# ---------------------------------------------------------------------------

def play_init(q0, r):
    """Initial play value max(q0 - r, min(0, q0 + r)) for memory level r > 0."""
    if np.any(np.asarray(r) <= 0.0):
        raise InvalidParameterError("play radius r must be positive")
    return np.maximum(q0 - r, np.minimum(0.0, q0 + r))


def play_update(xi_prev, q_new, r):
    """Exact play value after one monotone input step: min(q+r, max(q-r, xi))."""
    if np.any(np.asarray(r) <= 0.0):
        raise InvalidParameterError("play radius r must be positive")
    return np.minimum(q_new + r, np.maximum(q_new - r, xi_prev))


def evolve_memory(state: MemoryState, q_new: float) -> MemoryState:
    """Apply one monotone input step at every grid node; pure (returns a new state)."""
    _check_cutoff(q_new, state.grid)
    r = state.grid.nodes
    xi = np.minimum(q_new + r, np.maximum(q_new - r, state.xi))
    return MemoryState(state.grid, xi, float(q_new))


def _evolved_xi(xi0: np.ndarray, r: np.ndarray, q_new) -> np.ndarray:
    # trial update without building a MemoryState; q_new may be an array of
    # candidates with shape (..., 1) broadcast against r
    return np.minimum(q_new + r, np.maximum(q_new - r, xi0))


# ---------------------------------------------------------------------------
# densities
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class PreisachDensity:
    """Density g(r, v) with derivative bound mu(r), potential kernel G(r, v), and
    the constants M = int mu dr and M1 = int int dg/dv dv dr.

    ``g``, ``mu`` and ``G`` must accept numpy arrays elementwise.  ``p_sup`` is a
    bound on |P| used for root bracketing (defaults to M1), ``v_sat`` an input
    scale beyond which g no longer changes (used by quadratures), and
    ``breakpoints`` lists discontinuities of mu for adaptive integration.
    """

    g: Callable
    mu: Callable
    G: Callable
    M: float
    M1: float
    p_sup: float = None
    v_sat: float = None
    r_sup: float = None
    breakpoints: tuple = ()
    name: str = "custom"

    def __post_init__(self):
        if self.p_sup is None:
            object.__setattr__(self, "p_sup", self.M1)

    @classmethod
    def projection(cls) -> "PreisachDensity":
        """The clipped-identity density: g(r, v) = proj_[-(1-r), 1-r](v) for r <= 1, else 0."""

        def g(r, v):
            r = np.asarray(r, dtype=float)
            bound = np.maximum(1.0 - r, 0.0)
            return np.clip(v, -bound, bound)

        def mu(r):
            return (np.asarray(r, dtype=float) < 1.0).astype(float)

        def G(r, v):
            r = np.asarray(r, dtype=float)
            bound = np.maximum(1.0 - r, 0.0)
            return 0.5 * np.minimum(np.abs(v), bound) ** 2

        return cls(g=g, mu=mu, G=G, M=1.0, M1=1.0, p_sup=0.5, v_sat=1.0,
                   r_sup=1.0, breakpoints=(1.0,), name="projection")

    @classmethod
    def zero(cls) -> "PreisachDensity":
        """g identically zero: no hysteresis (the linear limit)."""

        def g(r, v):
            r_b, v_b = np.broadcast_arrays(np.asarray(r, dtype=float),
                                           np.asarray(v, dtype=float))
            return np.zeros_like(r_b)

        def mu(r):
            return np.zeros_like(np.asarray(r, dtype=float))

        return cls(g=g, mu=mu, G=g, M=0.0, M1=0.0, p_sup=0.0,
                   v_sat=1.0, r_sup=1.0, name="zero")

    @classmethod
    def from_gv(cls, g: Callable, mu: Callable, *, M: float = None, M1: float = None,
                v_sat: float = None, r_sup: float = None, breakpoints: tuple = (),
                name: str = "custom") -> "PreisachDensity":
        """Wrap a user-supplied density; G is evaluated by Gauss-Legendre quadrature
        of G(r, v) = v g(r, v) - int_0^v g(r, s) ds (integration by parts)."""

        gl_x, gl_w = np.polynomial.legendre.leggauss(64)
        gl_x = 0.5 * (gl_x + 1.0)   # nodes on [0, 1]
        gl_w = 0.5 * gl_w

        def G(r, v):
            r = np.asarray(r, dtype=float)
            v = np.asarray(v, dtype=float)
            r_b, v_b = np.broadcast_arrays(r, v)
            s = v_b[..., None] * gl_x                       # (..., 64)
            integral = np.sum(gl_w * g(r_b[..., None], s), axis=-1) * v_b
            return v_b * g(r_b, v_b) - integral

        if M is None or M1 is None:
            M_q, M1_q = _density_constants_numeric(
                cls(g=g, mu=mu, G=G, M=np.nan, M1=np.nan, p_sup=np.inf,
                    v_sat=v_sat, r_sup=r_sup, breakpoints=breakpoints, name=name))
            M = M_q if M is None else M
            M1 = M1_q if M1 is None else M1
        return cls(g=g, mu=mu, G=G, M=M, M1=M1, v_sat=v_sat, r_sup=r_sup,
                   breakpoints=breakpoints, name=name)


@dataclass(frozen=True, eq=False)
class PrandtlStack:
    """Discrete Prandtl-Ishlinskii operator: point masses mu_j at levels r_j,
    P[q] = sum_j mu_j xi_{r_j}, U[q] = sum_j mu_j xi_{r_j}^2 / 2."""

    nodes: np.ndarray
    weights: np.ndarray
    name: str = "prandtl"

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)
        if nodes.shape != weights.shape or nodes.ndim != 1:
            raise InvalidParameterError("nodes and weights must be 1d arrays of equal length")
        if nodes[0] <= 0.0 or np.any(np.diff(nodes) <= 0.0):
            raise InvalidParameterError("stack levels must be strictly increasing and > 0")
        if np.any(weights < 0.0):
            raise InvalidParameterError("stack weights must be nonnegative")

    @property
    def M(self) -> float:
        return float(np.sum(self.weights))

    @property
    def M1(self) -> float:
        return math.inf

    @property
    def p_sup(self) -> float:
        return math.inf

    def grid(self, cutoff: float = None) -> RGrid:
        """Memory grid matching the stack; an extra node at ``cutoff`` (weight 0 in
        the output sums) widens the representable input range if requested."""
        if cutoff is None or cutoff <= self.nodes[-1]:
            return RGrid(self.nodes)
        return RGrid(np.concatenate((self.nodes, [cutoff])))

    def _node_xi(self, state: MemoryState) -> np.ndarray:
        n = self.nodes.size
        grid_nodes = state.grid.nodes
        if grid_nodes.size < n or not np.array_equal(grid_nodes[:n], self.nodes):
            raise InvalidParameterError("memory grid does not contain the stack levels")
        return state.xi[:n]


@dataclass(frozen=True, eq=False)
class DiscreteWeights:
    """Cell reduction of a continuous density on a grid: weights
    mu_j = int_{cell_j} mu(r) dr and cell densities g_j(v) = int_{cell_j} g(r, v) dr.
    The node-evaluated sum P_m[q] = sum_j g_j(xi_{r_j}) is the discrete Preisach
    operator used in the grid-refinement error bound."""

    grid: RGrid
    weights: np.ndarray
    _gl_nodes: np.ndarray = field(repr=False, default=None)   # (m, k) r-quadrature nodes
    _gl_weights: np.ndarray = field(repr=False, default=None)  # (m, k)
    _g: Callable = field(repr=False, default=None)
    _G: Callable = field(repr=False, default=None)

    @classmethod
    def from_density(cls, density: PreisachDensity, grid: RGrid,
                     order: int = 8) -> "DiscreteWeights":
        x, w = np.polynomial.legendre.leggauss(order)
        edges = np.concatenate(([0.0], grid.nodes))
        lo, hi = edges[:-1], edges[1:]
        nodes = 0.5 * (hi + lo)[:, None] + 0.5 * (hi - lo)[:, None] * x
        wts = 0.5 * (hi - lo)[:, None] * w
        weights = np.sum(wts * density.mu(nodes), axis=1)
        return cls(grid=grid, weights=weights, _gl_nodes=nodes, _gl_weights=wts,
                   _g=density.g, _G=density.G)

    def cell_g(self, v: np.ndarray) -> np.ndarray:
        """g_j(v_j) for per-cell values v (shape (m,) or scalar)."""
        v = np.asarray(v, dtype=float)
        return np.sum(self._gl_weights * self._g(self._gl_nodes, v[..., None]), axis=-1)

    def cell_G(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        return np.sum(self._gl_weights * self._G(self._gl_nodes, v[..., None]), axis=-1)

    def output(self, state: MemoryState) -> float:
        if not self.grid.matches(state.grid):
            raise InvalidParameterError("state grid does not match the weight grid")
        return float(np.sum(self.cell_g(state.xi)))


# ---------------------------------------------------------------------------
# operator outputs
# ---------------------------------------------------------------------------

def _xi_cell_values(xi: np.ndarray) -> np.ndarray:
    """xi at cell midpoints: linear interpolation between nodes, constant on the
    first cell (no node at r = 0)."""
    out = np.empty_like(xi)
    out[..., 0] = xi[..., 0]
    out[..., 1:] = 0.5 * (xi[..., :-1] + xi[..., 1:])
    return out


def _quadrature_P(density: PreisachDensity, grid: RGrid, xi: np.ndarray):
    vals = density.g(grid.cell_midpoints, _xi_cell_values(xi))
    return vals @ grid.cell_widths


def _quadrature_U(density: PreisachDensity, grid: RGrid, xi: np.ndarray):
    vals = density.G(grid.cell_midpoints, _xi_cell_values(xi))
    return vals @ grid.cell_widths


def _P_raw(density, grid: RGrid, xi: np.ndarray):
    """Operator output from a raw xi array; xi may be (m,) or (n, m)."""
    if isinstance(density, PrandtlStack):
        return xi[..., : density.nodes.size] @ density.weights
    return _quadrature_P(density, grid, xi)


def _U_raw(density, grid: RGrid, xi: np.ndarray):
    if isinstance(density, PrandtlStack):
        head = xi[..., : density.nodes.size]
        return (0.5 * head * head) @ density.weights
    return _quadrature_U(density, grid, xi)


def preisach_output(density, state: MemoryState) -> float:
    """P[q](t) = int g(r, xi_r(t)) dr over (0, R], by midpoint quadrature per cell
    (node sum for a Prandtl stack)."""
    _check_cutoff(state.current_input, state.grid)
    if isinstance(density, PrandtlStack):
        return float(density.weights @ density._node_xi(state))
    return float(_quadrature_P(density, state.grid, state.xi))


def potential_output(density, state: MemoryState) -> float:
    """U[q](t) = int G(r, xi_r(t)) dr, the hysteresis potential."""
    _check_cutoff(state.current_input, state.grid)
    if isinstance(density, PrandtlStack):
        xi = density._node_xi(state)
        return float(density.weights @ (0.5 * xi * xi))
    return float(_quadrature_U(density, state.grid, state.xi))


def operator_outputs(density, grid: RGrid, xi: np.ndarray):
    """(P, U) from a raw xi array; vectorized over leading axes."""
    return _P_raw(density, grid, xi), _U_raw(density, grid, xi)


def replay_inputs(memory: MemoryState, q_series) -> MemoryState:
    """Evolve a copy of ``memory`` through a whole input sequence."""
    mem = memory.copy()
    for q in np.asarray(q_series, dtype=float):
        mem = evolve_memory(mem, q)
    return mem


def operator_series(density, memory: MemoryState, q_series):
    """(P_k, U_k, final memory) along an input sequence, threading memory."""
    q_series = np.asarray(q_series, dtype=float)
    mem = memory.copy()
    p = np.empty(q_series.size)
    u = np.empty(q_series.size)
    for k, q in enumerate(q_series):
        mem = evolve_memory(mem, q)
        p[k] = _P_raw(density, mem.grid, mem.xi)
        u[k] = _U_raw(density, mem.grid, mem.xi)
    return p, u, mem


def dissipation_increment(density, state_before: MemoryState, state_after: MemoryState,
                          q_after: float) -> float:
    """Discrete dissipated energy q_after*(P_after - P_before) - (U_after - U_before)
    of one monotone step; nonnegative up to round-off."""
    if not state_before.grid.matches(state_after.grid):
        raise InvalidParameterError("memory states live on different grids")
    p0 = preisach_output(density, state_before)
    p1 = preisach_output(density, state_after)
    u0 = potential_output(density, state_before)
    u1 = potential_output(density, state_after)
    return q_after * (p1 - p0) - (u1 - u0)


def density_constants(density: PreisachDensity, r_max: float = np.inf) -> tuple:
    """Numerical quadrature of M = int mu dr and M1 = int (g(r, +sat) - g(r, -sat)) dr."""
    M, M1 = _density_constants_numeric(density, r_max=r_max)
    if not (math.isfinite(M) and math.isfinite(M1)):
        raise InvalidDensityError("density constants did not evaluate to finite values")
    return M, M1


def _density_constants_numeric(density: PreisachDensity, r_max: float = np.inf):
    upper = r_max
    if not math.isfinite(upper):
        upper = density.r_sup if density.r_sup else 50.0
    pts = [b for b in density.breakpoints if 0.0 < b < upper]
    v_big = 10.0 * (density.v_sat if density.v_sat else 1e5)
    M, _ = quad(lambda r: float(density.mu(r)), 0.0, upper, points=pts or None, limit=200)
    M1, _ = quad(lambda r: float(density.g(r, v_big) - density.g(r, -v_big)),
                 0.0, upper, points=pts or None, limit=200)
    return M, M1

"""Refinement ladders: memory-grid quadrature for the material point, mesh and
time step for the beam.  Reference values come from independent oracles:
adaptive quadrature of the scalar play replay for the point, fine-grid or
fine-step runs for the beam."""

from __future__ import annotations

import numpy as np
from scipy.integrate import quad

from .beam import BeamMesh, BoundaryData, StepperConfig, simulate
from .constitutive import MaterialParams
from .errors import InvalidParameterError
from .hysteresis import (
    MemoryState,
    PreisachDensity,
    RGrid,
    play_init,
    play_update,
    preisach_output,
    potential_output,
    replay_inputs,
)

__all__ = [
    "exact_operator_values",
    "point_convergence",
    "beam_spatial_convergence",
    "beam_temporal_convergence",
    "run_convergence",
]


def exact_operator_values(density, inputs, cutoff=4.0, q0=0.0):
    """(P, U) by adaptive quadrature in r of the exact scalar play replay;
    independent of the grid quadrature used by the operators."""

    def xi_of(r):
        xi = float(play_init(q0, r))
        for q in inputs:
            xi = float(play_update(xi, q, r))
        return xi

    p, _ = quad(lambda r: float(density.g(r, xi_of(r))), 0.0, cutoff,
                limit=800, epsabs=1e-13, epsrel=1e-13)
    u, _ = quad(lambda r: float(density.G(r, xi_of(r))), 0.0, cutoff,
                limit=800, epsabs=1e-13, epsrel=1e-13)
    return p, u


def _orders(errors):
    out = [None]
    for a, b in zip(errors[:-1], errors[1:]):
        if a <= 1e-14 or b <= 1e-14:
            out.append(float("inf"))
        else:
            out.append(float(np.log2(a / b)))
    return out


def point_convergence(levels: int = 4, m0: int = 125, cutoff: float = 4.0):
    """Quadrature error of P and U on an irregular memory state (kinks off the
    grid) against the play-replay oracle, one row per refinement level."""
    if levels < 3:
        raise InvalidParameterError("need at least 3 refinement levels")
    density = PreisachDensity.projection()
    inputs = [1.77, -0.913, 0.401]
    p_ref, u_ref = exact_operator_values(density, inputs, cutoff)

    errs_p, errs_u, ms = [], [], []
    for k in range(levels):
        m = m0 * 2**k
        grid = RGrid.uniform(m=m, cutoff=cutoff)
        mem = replay_inputs(MemoryState.virgin(grid), inputs)
        errs_p.append(abs(preisach_output(density, mem) - p_ref))
        errs_u.append(abs(potential_output(density, mem) - u_ref))
        ms.append(m)

    rows = []
    for name, errs in (("point_P", errs_p), ("point_U", errs_u)):
        for m, err, order in zip(ms, errs, _orders(errs)):
            rows.append({"target": name, "level": m, "error": err, "order": order})
    return rows


def _linear_beam_setup():
    params = MaterialParams(nu=0.02)
    density = PreisachDensity.zero()
    T = 0.75
    t_b = np.linspace(0.0, T, 3001)
    boundary = BoundaryData(t_b, np.zeros_like(t_b), 0.1 * np.sin(2.0 * np.pi * t_b))
    return params, density, boundary, T


def beam_spatial_convergence(levels: int = 4, n0: int = 8, n_ref: int = 256,
                             dt0: float = 4e-3):
    """Final-time strain error of the linear beam (zero density) against a fine
    reference, sampled at coarse element midpoints.  The time step is refined
    with the mesh (dt proportional to h): the stepper is first order, so a
    fixed dt would floor the spatial ladder; the combined refinement measures
    the advertised first-order strain convergence."""
    if levels < 3:
        raise InvalidParameterError("need at least 3 refinement levels")
    params, density, boundary, T = _linear_beam_setup()
    grid = RGrid.uniform(m=4, cutoff=4.0)

    def final_state(n):
        mesh = BeamMesh(1.0, n)
        cfg = StepperConfig(dt=dt0 * n0 / n)
        run = simulate(np.zeros(n + 1), np.zeros(n + 1), boundary, T, cfg, params,
                       density, mesh=mesh, grid=grid, snapshot_stride=10**9)
        return run.snapshots[-1], mesh

    ref_state, _ = final_state(n_ref)
    rows = []
    errs, ns = [], []
    for k in range(levels):
        n = n0 * 2**k
        if n_ref % n != 0:
            raise InvalidParameterError("reference mesh must nest the ladder meshes")
        state, mesh = final_state(n)
        # reference strain averaged over each coarse element (meshes are nested,
        # so the average is the reference displacement difference over h)
        eps_ref_mean = np.diff(ref_state.u[:: n_ref // n]) / mesh.h
        diff = state.strain - eps_ref_mean
        errs.append(float(np.sqrt(mesh.h * np.sum(diff**2))))
        ns.append(n)
    for n, err, order in zip(ns, errs, _orders(errs)):
        rows.append({"target": "beam_strain_h", "level": n, "error": err, "order": order})
    return rows


def beam_temporal_convergence(levels: int = 3, dt0: float = 4e-3, dt_ref_factor: int = 8):
    """Final-time displacement error of the hysteretic beam against a
    fine-step reference on the same mesh (backward Euler is first order)."""
    if levels < 3:
        raise InvalidParameterError("need at least 3 refinement levels")
    params = MaterialParams(nu=0.02)
    density = PreisachDensity.projection()
    mesh = BeamMesh(1.0, 16)
    grid = RGrid.uniform(m=80, cutoff=4.0)
    T = 0.4
    t_b = np.linspace(0.0, T, 2001)
    boundary = BoundaryData(t_b, 0.3 * np.sin(2.0 * np.pi * t_b),
                            0.05 * np.sin(np.pi * t_b))

    def final_u(dt):
        cfg = StepperConfig(dt=dt)
        run = simulate(np.zeros(17), np.zeros(17), boundary, T, cfg, params,
                       density, mesh=mesh, grid=grid, snapshot_stride=10**9)
        return run.snapshots[-1].u

    dts = [dt0 / 2**k for k in range(levels)]
    u_ref = final_u(dts[-1] / dt_ref_factor)
    errs = []
    for dt in dts:
        diff = final_u(dt) - u_ref
        errs.append(float(np.sqrt(mesh.h * np.sum(diff**2))))
    rows = []
    for dt, err, order in zip(dts, errs, _orders(errs)):
        rows.append({"target": "beam_u_dt", "level": dt, "error": err, "order": order})
    return rows


def run_convergence(target: str, levels: int = 4):
    """Refinement study for 'point' or 'beam'; returns report rows."""
    if levels < 3:
        raise InvalidParameterError("need at least 3 refinement levels")
    if target == "point":
        return point_convergence(levels=levels)
    if target == "beam":
        return beam_spatial_convergence(levels=min(levels, 4)) + \
            beam_temporal_convergence(levels=min(levels, 3))
    raise InvalidParameterError("convergence target must be 'point' or 'beam'")

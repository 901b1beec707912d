"""Scenario configuration and execution.

Configurations are plain-text key/value files with sections (INI syntax, see
docs/config.md).  Built-in scenarios reproduce the qualitative figures of the
model: bipolar field sweeps (polarization loop and butterfly), compressive
stress runs after poling (mechanical depolarization and stress-strain), and a
beam demo.  All outputs are CSV files written atomically with fixed formatting
so that identical configurations produce byte-identical files.
"""

from __future__ import annotations

import configparser
import csv
import os
from dataclasses import dataclass, field

import numpy as np

from .beam import BeamMesh, BeamRun, BoundaryData, StepperConfig, simulate
from .constitutive import (
    MaterialParams,
    PointTrajectory,
    ShapeFunction,
    drive_field,
    drive_stress,
)
from .errors import InvalidParameterError
from .hysteresis import MemoryState, PrandtlStack, PreisachDensity, RGrid, replay_inputs
from .waveforms import piecewise_ramp, sine, triangle

__all__ = ["RunConfig", "run_scenario", "built_in_names", "load_config",
           "build_density", "build_params", "build_grid"]

SCENARIO_DEFAULTS = {
    "scenario": {"name": "bipolar-linear", "drive": "field"},
    "params": {"c": "1.0", "e": "0.0", "kappa": "0.01", "nu": "0.0", "rho": "1.0",
               "shape": "linear"},
    "density": {"type": "projection", "table": ""},
    "grid": {"m": "400", "cutoff": "4.0"},
    "drive": {"waveform": "triangle", "amplitude": "1.0", "periods": "3",
              "samples_per_period": "2000", "sigma_target": "0.0"},
    "stress": {"poling_amplitude": "1.0", "hold_field": "0.4",
               "samples_per_leg": "800", "sigma_max": "1.0", "sigma_samples": "800"},
    "beam": {"length": "1.0", "n_elements": "64", "dt": "0.001", "t_end": "2.0",
             "picard_tol": "1e-10", "picard_max": "50", "lumped_mass": "false",
             "r_amplitude": "0.4", "r_frequency": "1.0",
             "s_amplitude": "0.05", "s_frequency": "0.5",
             "grid_m": "200", "snapshot_stride": "100"},
    "output": {"dir": "out", "seed": "0"},
}

_BUILT_IN = {
    "bipolar-linear": {"scenario": {"drive": "field"}, "params": {"shape": "linear"}},
    "bipolar-quartic": {"scenario": {"drive": "field"}, "params": {"shape": "quartic"}},
    "stress-linear": {"scenario": {"drive": "stress"}, "params": {"shape": "linear"}},
    "stress-quartic": {"scenario": {"drive": "stress"}, "params": {"shape": "quartic"}},
    "beam-demo": {"scenario": {"drive": "beam"}, "params": {"nu": "0.01"}},
}


def built_in_names():
    return sorted(_BUILT_IN)


@dataclass
class RunConfig:
    """Merged scenario configuration (defaults < built-in < file overrides)."""

    name: str
    sections: dict = field(default_factory=dict)

    def get(self, section: str, key: str) -> str:
        return self.sections[section][key]

    def get_float(self, section: str, key: str) -> float:
        return float(self.get(section, key))

    def get_int(self, section: str, key: str) -> int:
        return int(self.get(section, key))

    def get_bool(self, section: str, key: str) -> bool:
        return self.get(section, key).strip().lower() in ("1", "true", "yes", "on")

    @property
    def seed(self) -> int:
        return self.get_int("output", "seed")


def _merge(base: dict, extra: dict) -> dict:
    out = {sec: dict(keys) for sec, keys in base.items()}
    for sec, keys in extra.items():
        out.setdefault(sec, {}).update(keys)
    return out


def load_config(name: str = None, path=None, out_dir=None) -> RunConfig:
    """Resolve a configuration from a built-in name and/or a config file."""
    sections = {sec: dict(keys) for sec, keys in SCENARIO_DEFAULTS.items()}
    if name is not None:
        if name not in _BUILT_IN:
            raise InvalidParameterError(
                f"unknown scenario {name!r}; built-ins: {', '.join(built_in_names())}")
        sections = _merge(sections, _BUILT_IN[name])
        sections["scenario"]["name"] = name
    if path is not None:
        if not os.path.exists(path):
            raise InvalidParameterError(f"config file {path!r} does not exist")
        parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
        parser.read(path)
        file_sections = {sec: dict(parser.items(sec)) for sec in parser.sections()}
        sections = _merge(sections, file_sections)
    if out_dir is not None:
        sections["output"]["dir"] = str(out_dir)
    env_dir = os.environ.get("FERROHYST_OUT")
    if env_dir:
        sections["output"]["dir"] = env_dir
    return RunConfig(name=sections["scenario"]["name"], sections=sections)


def build_density(config: RunConfig):
    kind = config.get("density", "type").strip().lower()
    if kind == "projection":
        return PreisachDensity.projection()
    if kind == "prandtl":
        pairs = [p for p in config.get("density", "table").split(",") if p.strip()]
        if not pairs:
            raise InvalidParameterError("prandtl density needs a table of r:mu pairs")
        nodes, weights = [], []
        for pair in pairs:
            r_s, mu_s = pair.split(":")
            nodes.append(float(r_s))
            weights.append(float(mu_s))
        return PrandtlStack(np.array(nodes), np.array(weights))
    raise InvalidParameterError(f"unknown density type {kind!r}")


def build_params(config: RunConfig) -> MaterialParams:
    shape_name = config.get("params", "shape").strip().lower()
    if shape_name == "linear":
        shape = ShapeFunction.linear()
    elif shape_name == "quartic":
        shape = ShapeFunction.quartic()
    else:
        raise InvalidParameterError(f"unknown shape variant {shape_name!r}")
    return MaterialParams(
        c_E=config.get_float("params", "c"),
        e_pz=config.get_float("params", "e"),
        kappa=config.get_float("params", "kappa"),
        nu=config.get_float("params", "nu"),
        rho=config.get_float("params", "rho"),
        f=shape,
    )


def build_grid(config: RunConfig, density=None) -> RGrid:
    m = config.get_int("grid", "m")
    cutoff = config.get_float("grid", "cutoff")
    if isinstance(density, PrandtlStack):
        return density.grid(cutoff)
    return RGrid.uniform(m, cutoff)


# ---------------------------------------------------------------------------
# CSV output
# ---------------------------------------------------------------------------

def _atomic_writer(path, write_fn):
    tmp = f"{path}.tmp"
    with open(tmp, "w", newline="") as fh:
        write_fn(fh)
    os.replace(tmp, path)


def write_point_csv(traj: PointTrajectory, path) -> None:
    from .constitutive import TRAJECTORY_COLUMNS

    def body(fh):
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRAJECTORY_COLUMNS)
        for k in range(traj.t.size):
            writer.writerow(f"{traj.column(c)[k]:.17g}" for c in TRAJECTORY_COLUMNS)

    _atomic_writer(path, body)


def _node_average(elem_values: np.ndarray) -> np.ndarray:
    """Map element-constant values to nodes (ends keep their single element)."""
    out = np.empty(elem_values.size + 1)
    out[0] = elem_values[0]
    out[-1] = elem_values[-1]
    out[1:-1] = 0.5 * (elem_values[:-1] + elem_values[1:])
    return out


def write_beam_csvs(run: BeamRun, params: MaterialParams, out_dir) -> dict:
    snap_path = os.path.join(out_dir, "beam_snapshots.csv")
    energy_path = os.path.join(out_dir, "beam_energy.csv")

    def snap_body(fh):
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("t", "x", "u", "v", "eps", "sigma", "E", "P"))
        prev = None
        for state in run.snapshots:
            x = state.mesh.nodes
            eps = state.strain
            f_val, fp = params.f.eval(eps)
            eps_dot = np.zeros_like(eps)
            if prev is not None and state.t > prev.t:
                eps_dot = (eps - prev.strain) / (state.t - prev.t)
            sigma = (params.nu * eps_dot + params.c_E * eps
                     - params.e_pz * state.E + fp * state.U)
            rows = zip(x, state.u, state.v, _node_average(eps), _node_average(sigma),
                       _node_average(state.E), _node_average(state.P))
            for row in rows:
                writer.writerow([f"{state.t:.17g}"] + [f"{val:.17g}" for val in row])
            prev = state

    def energy_body(fh):
        writer = csv.writer(fh, lineterminator="\n")
        names = ("t", "K", "F", "diss_hyst", "diss_visc", "work_boundary", "residual")
        writer.writerow(names)
        n = run.energy["t"].size
        for k in range(n):
            writer.writerow(f"{run.energy[c][k]:.17g}" for c in names)

    _atomic_writer(snap_path, snap_body)
    _atomic_writer(energy_path, energy_body)
    return {"snapshots": snap_path, "energy": energy_path}


# ---------------------------------------------------------------------------
# scenario execution
# ---------------------------------------------------------------------------

def _field_trajectory(config: RunConfig) -> PointTrajectory:
    params = build_params(config)
    density = build_density(config)
    grid = build_grid(config, density)
    waveform = config.get("drive", "waveform").strip().lower()
    make = {"triangle": triangle, "sine": sine}.get(waveform)
    if make is None:
        raise InvalidParameterError(f"unknown waveform {waveform!r}")
    t, e_series = make(config.get_float("drive", "amplitude"),
                       config.get_int("drive", "periods"),
                       config.get_int("drive", "samples_per_period"))
    sigma_t = config.get_float("drive", "sigma_target")
    return drive_field(params, density, e_series, sigma_t * np.ones_like(e_series),
                       t=t, grid=grid)


def _stress_trajectory(config: RunConfig) -> PointTrajectory:
    """Poling preamble (field-driven ramp to the poling amplitude and back to
    the hold field), then the compressive stress program with the dielectric
    datum frozen at its post-poling value."""
    params = build_params(config)
    density = build_density(config)
    grid = build_grid(config, density)
    n_leg = config.get_int("stress", "samples_per_leg")
    amp = config.get_float("stress", "poling_amplitude")
    hold = config.get_float("stress", "hold_field")
    t_pol, e_pol = piecewise_ramp([0.0, amp, hold], n_leg)
    pol = drive_field(params, density, e_pol, np.zeros_like(e_pol), t=t_pol, grid=grid)

    r_hold = pol.D[-1]
    memory = replay_inputs(MemoryState.virgin(grid), pol.q)
    n_sig = config.get_int("stress", "sigma_samples")
    smax = config.get_float("stress", "sigma_max")
    dt = t_pol[1] - t_pol[0]
    t_sig, sig = piecewise_ramp([0.0, -smax, 0.0], n_sig, t0=t_pol[-1] + dt, dt=dt)
    press = drive_stress(params, density, sig, r_hold * np.ones_like(sig), t=t_sig,
                         grid=grid, initial_memory=memory, eps0=pol.eps[-1],
                         q_guess=pol.q[-1])

    cols = {}
    from .constitutive import TRAJECTORY_COLUMNS

    for name in TRAJECTORY_COLUMNS:
        cols[name] = np.concatenate((pol.column(name), press.column(name)))
    return PointTrajectory(**cols)


def _beam_run(config: RunConfig):
    params = build_params(config)
    density = build_density(config)
    mesh = BeamMesh(config.get_float("beam", "length"),
                    config.get_int("beam", "n_elements"))
    grid = RGrid.uniform(config.get_int("beam", "grid_m"),
                         config.get_float("grid", "cutoff"))
    cfg = StepperConfig(dt=config.get_float("beam", "dt"),
                        picard_tol=config.get_float("beam", "picard_tol"),
                        picard_max=config.get_int("beam", "picard_max"),
                        lumped_mass=config.get_bool("beam", "lumped_mass"))
    T = config.get_float("beam", "t_end")
    t_b = np.arange(0.0, T + cfg.dt, cfg.dt)
    r_b = config.get_float("beam", "r_amplitude") * np.sin(
        2.0 * np.pi * config.get_float("beam", "r_frequency") * t_b)
    s_b = config.get_float("beam", "s_amplitude") * np.sin(
        2.0 * np.pi * config.get_float("beam", "s_frequency") * t_b)
    boundary = BoundaryData(t_b, r_b, s_b)
    u0 = np.zeros(mesh.n_elements + 1)
    u1 = np.zeros(mesh.n_elements + 1)
    stride = config.get_int("beam", "snapshot_stride")
    return simulate(u0, u1, boundary, T, cfg, params, density, mesh=mesh, grid=grid,
                    snapshot_stride=stride), params


def run_scenario(config: RunConfig) -> dict:
    """Execute a scenario and write its CSV outputs; returns paths and results."""
    out_dir = config.get("output", "dir")
    os.makedirs(out_dir, exist_ok=True)
    drive = config.get("scenario", "drive").strip().lower()
    if drive == "field":
        traj = _field_trajectory(config)
        path = os.path.join(out_dir, "point_trajectory.csv")
        write_point_csv(traj, path)
        return {"kind": "point", "trajectory": traj, "files": {"point": path}}
    if drive == "stress":
        traj = _stress_trajectory(config)
        path = os.path.join(out_dir, "point_trajectory.csv")
        write_point_csv(traj, path)
        return {"kind": "point", "trajectory": traj, "files": {"point": path}}
    if drive == "beam":
        run, params = _beam_run(config)
        files = write_beam_csvs(run, params, out_dir)
        return {"kind": "beam", "run": run, "files": files}
    raise InvalidParameterError(f"unknown drive mode {drive!r}")

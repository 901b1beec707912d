"""Excitation waveforms sampled on uniform stamps (unit period by default)."""

from __future__ import annotations

import numpy as np

from .errors import InvalidParameterError

__all__ = ["triangle", "sine", "piecewise_ramp"]


def triangle(amplitude: float = 1.0, periods: int = 3, samples_per_period: int = 2000,
             t_period: float = 1.0):
    """Bipolar triangle 0 -> +A -> -A -> 0 per period; returns (t, values)."""
    if periods < 1 or samples_per_period < 4:
        raise InvalidParameterError("need periods >= 1 and samples_per_period >= 4")
    n = periods * samples_per_period
    t = np.arange(n + 1) * (t_period / samples_per_period)
    phase = (t / t_period) % 1.0
    vals = np.where(phase < 0.25, 4.0 * phase,
                    np.where(phase < 0.75, 2.0 - 4.0 * phase, -4.0 + 4.0 * phase))
    vals = amplitude * vals
    vals[-1] = vals[0] if periods >= 1 else vals[-1]
    return t, vals


def sine(amplitude: float = 1.0, periods: int = 3, samples_per_period: int = 2000,
         t_period: float = 1.0):
    """Sine wave starting at 0; returns (t, values)."""
    if periods < 1 or samples_per_period < 4:
        raise InvalidParameterError("need periods >= 1 and samples_per_period >= 4")
    n = periods * samples_per_period
    t = np.arange(n + 1) * (t_period / samples_per_period)
    return t, amplitude * np.sin(2.0 * np.pi * t / t_period)


def piecewise_ramp(targets, samples_per_leg: int, t0: float = 0.0, dt: float = None):
    """Piecewise-linear path through ``targets`` (starting at targets[0]);
    every leg is sampled with ``samples_per_leg`` steps.  Returns (t, values)."""
    targets = np.asarray(targets, dtype=float)
    if targets.size < 2 or samples_per_leg < 1:
        raise InvalidParameterError("need at least two targets and one sample per leg")
    vals = [np.array([targets[0]])]
    for a, b in zip(targets[:-1], targets[1:]):
        vals.append(np.linspace(a, b, samples_per_leg + 1)[1:])
    values = np.concatenate(vals)
    step = dt if dt is not None else 1.0 / samples_per_leg
    t = t0 + step * np.arange(values.size)
    return t, values

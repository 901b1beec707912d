"""Bracketed scalar root refinement shared by the solvers: regula falsi with a
bisection safeguard (Illinois variant), stopping on the residual, which is the
quantity the solver contracts promise."""

from __future__ import annotations

from .errors import OutOfRangeError

_MAX_ITER = 200


def illinois(fun, lo, hi, f_lo, f_hi, tol, max_iter=_MAX_ITER):
    """Root of increasing ``fun`` on a straddling bracket; returns x with |fun(x)| <= tol."""
    if abs(f_lo) <= tol:
        return lo
    if abs(f_hi) <= tol:
        return hi
    side = 0
    for _ in range(max_iter):
        denom = f_hi - f_lo
        x = (lo * f_hi - hi * f_lo) / denom if denom > 0.0 else 0.5 * (lo + hi)
        if not (lo < x < hi):
            x = 0.5 * (lo + hi)
        fx = fun(x)
        if abs(fx) <= tol:
            return x
        if fx > 0.0:
            hi, f_hi = x, fx
            if side == +1:
                f_lo *= 0.5
            side = +1
        else:
            lo, f_lo = x, fx
            if side == -1:
                f_hi *= 0.5
            side = -1
    raise RuntimeError("root refinement did not reach tolerance")  # pragma: no cover


def expanding_root(fun, x0, lo_lim, hi_lim, tol, window=0.25, what="equation"):
    """Root of an increasing function starting from a guess: grow a bracket
    around x0 (doubling), then refine; raises out-of-range when no sign change
    exists inside [lo_lim, hi_lim]."""
    f0 = fun(x0)
    if abs(f0) <= tol:
        return x0
    step = window
    if f0 > 0.0:
        hi, f_hi = x0, f0
        lo = max(x0 - step, lo_lim)
        f_lo = fun(lo)
        while f_lo > 0.0 and lo > lo_lim:
            step *= 2.0
            lo = max(lo - step, lo_lim)
            f_lo = fun(lo)
        if f_lo > 0.0:
            raise OutOfRangeError(f"no root of the {what} within the working range")
    else:
        lo, f_lo = x0, f0
        hi = min(x0 + step, hi_lim)
        f_hi = fun(hi)
        while f_hi < 0.0 and hi < hi_lim:
            step *= 2.0
            hi = min(hi + step, hi_lim)
            f_hi = fun(hi)
        if f_hi < 0.0:
            raise OutOfRangeError(f"no root of the {what} within the working range")
    return illinois(fun, lo, hi, f_lo, f_hi, tol)

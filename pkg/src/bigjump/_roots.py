"""Safeguarded scalar root finding: bisection to a narrow bracket, then Newton."""

import math

from .errors import BracketError


def bracketed_newton(f, fprime, lo, hi, *, xtol_rel=1e-13, bisect_frac=1e-3, maxiter=60, flo=None, fhi=None):
    """Root of ``f`` on [lo, hi] given a sign change.

    Bisect until the bracket is ``bisect_frac`` of its initial width, then
    take Newton steps with analytic derivative, falling back to bisection
    whenever a step leaves the current bracket.
    """
    flo = f(lo) if flo is None else flo
    fhi = f(hi) if fhi is None else fhi
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise BracketError(f"no sign change on [{lo!r}, {hi!r}]: f={flo!r}, {fhi!r}", lo, hi)
    width0 = hi - lo
    while hi - lo > bisect_frac * width0:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
    x = 0.5 * (lo + hi)
    for _ in range(maxiter):
        fx = f(x)
        if fx == 0.0:
            return x
        if (fx > 0) == (flo > 0):
            lo, flo = x, fx
        else:
            hi, fhi = x, fx
        d = fprime(x)
        step = fx / d if d != 0.0 and math.isfinite(d) else math.inf
        x_new = x - step
        if not (lo < x_new < hi):
            x_new = 0.5 * (lo + hi)
        if abs(x_new - x) <= xtol_rel * abs(x_new) or hi - lo <= xtol_rel * abs(x):
            return x_new
        x = x_new
    return x


def expand_upward(f, lo, hi, *, factor=2.0, limit=1e300):
    """Grow ``hi`` geometrically until ``f`` changes sign relative to ``f(lo)``."""
    flo = f(lo)
    fhi = f(hi)
    while (fhi > 0) == (flo > 0):
        lo, flo = hi, fhi
        hi = hi * factor
        if hi > limit:
            raise BracketError("upward bracket expansion exceeded limit", lo, hi)
        fhi = f(hi)
    return lo, hi, flo, fhi


def scan_sign_changes(f, grid):
    """Intervals of ``grid`` across which ``f`` changes sign."""
    vals = [f(x) for x in grid]
    out = []
    for i in range(len(grid) - 1):
        if vals[i] == 0.0 or (vals[i] > 0) != (vals[i + 1] > 0):
            out.append((grid[i], grid[i + 1]))
    return out

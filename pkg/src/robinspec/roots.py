"""Bracketed scalar root finding."""

from __future__ import annotations

import math

from .spectrum import SolverError


def bisect(f, lo: float, hi: float, flo: float | None = None, fhi: float | None = None,
           rtol: float = 1e-12, maxiter: int = 200, exact: bool = True, atol: float = 0.0) -> float:
    """Root of ``f`` in ``[lo, hi]`` by bisection.

    The bracket must show a sign change (a zero at an endpoint is returned
    as-is).  With ``exact`` the loop keeps halving until the midpoint no
    longer moves, otherwise it stops once ``hi - lo <= rtol * |mid|``.
    """
    if flo is None:
        flo = f(lo)
    if fhi is None:
        fhi = f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if math.copysign(1.0, flo) == math.copysign(1.0, fhi):
        raise SolverError(f"no sign change on bracket [{lo!r}, {hi!r}]: f = ({flo:.3g}, {fhi:.3g})")
    for _ in range(maxiter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            return mid
        if not exact and hi - lo <= rtol * abs(mid) + atol:
            return mid
        fmid = f(mid)
        if fmid == 0.0:
            return mid
        if math.copysign(1.0, fmid) == math.copysign(1.0, flo):
            lo, flo = mid, fmid
        else:
            hi, fhi = mid, fmid
    mid = 0.5 * (lo + hi)
    if hi - lo <= rtol * abs(mid) + atol:
        return mid
    raise SolverError(f"bisection did not converge in {maxiter} steps; bracket [{lo!r}, {hi!r}]")


def bracket_above_zero(f, hi: float, fhi: float | None = None, f0: float | None = None) -> tuple:
    """Shrink ``[0, hi]`` to ``[x, 2x]`` (or ``[0, x]`` if x underflows) around a root.

    For roots many orders of magnitude below ``hi`` plain bisection from 0
    needs over a thousand halvings; halving the right end until ``f`` takes
    the sign of ``f(0)`` gives a bracket of relative width one instead.
    Returns ``(lo, hi, f(lo), f(hi))``.
    """
    f0 = f(0.0) if f0 is None else f0
    fhi = f(hi) if fhi is None else fhi
    x = hi
    while True:
        half = 0.5 * x
        if half == 0.0:
            return 0.0, x, f0, fhi
        fh = f(half)
        if fh == 0.0 or math.copysign(1.0, fh) == math.copysign(1.0, f0):
            return half, x, fh, fhi
        x, fhi = half, fh

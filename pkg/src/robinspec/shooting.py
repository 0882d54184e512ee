"""First Robin eigenvalue of the p-Laplacian on an N-ball by radial shooting.

The radial problem is integrated as a first-order system in the eigenfunction
``u`` and the flux ``w = |u'|^(p-2) u'``::

    u' = |w|^(1/(p-1)) sign(w)
    w' = -lam |u|^(p-2) u - (N-1)/r * w

from ``r = eps`` (series start, ``u(0) = 1``) to ``r = R`` with a fixed-step
classical Runge-Kutta scheme.  The boundary mismatch is
``F(lam) = w(R) + alpha |u(R)|^(p-2) u(R)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit
from scipy.integrate import simpson

from .roots import bisect
from .spectrum import SolverError

P_MIN, P_MAX = 1.2, 6.0
EPS_FRACTION = 1e-6
DEFAULT_STEPS = 4096


@njit(cache=True)
def _phi(s, q):
    # |s|^(q-2) s
    if s == 0.0:
        return 0.0
    return math.copysign(abs(s) ** (q - 1.0), s)


@njit(cache=True)
def _rhs(r, u, w, lam, N, p, pc):
    du = _phi(w, pc)
    dw = -lam * _phi(u, p) - (N - 1.0) / r * w
    return du, dw


@njit(cache=True)
def _start(lam, N, p, eps):
    u = 1.0 - (p - 1.0) / p * (lam / N) ** (1.0 / (p - 1.0)) * eps ** (p / (p - 1.0))
    w = -lam * eps / N
    return u, w


@njit(cache=True)
def _shoot(lam, N, R, alpha, p, n_steps, eps_frac, store):
    """Integrate to r = R; returns (F, u(R), w(R), crossed) and fills ``store``."""
    pc = p / (p - 1.0)
    eps = eps_frac * R
    h = (R - eps) / n_steps
    r = eps
    u, w = _start(lam, N, p, eps)
    crossed = u <= 0.0
    keep = store.shape[0] > 0
    if keep:
        store[0, 0] = r
        store[0, 1] = u
        store[0, 2] = w
    for i in range(n_steps):
        k1u, k1w = _rhs(r, u, w, lam, N, p, pc)
        k2u, k2w = _rhs(r + 0.5 * h, u + 0.5 * h * k1u, w + 0.5 * h * k1w, lam, N, p, pc)
        k3u, k3w = _rhs(r + 0.5 * h, u + 0.5 * h * k2u, w + 0.5 * h * k2w, lam, N, p, pc)
        k4u, k4w = _rhs(r + h, u + h * k3u, w + h * k3w, lam, N, p, pc)
        u = u + h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u)
        w = w + h / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w)
        r = eps + (i + 1) * h
        if u <= 0.0:
            crossed = True
        if keep:
            store[i + 1, 0] = r
            store[i + 1, 1] = u
            store[i + 1, 2] = w
    F = w + alpha * _phi(u, p)
    return F, u, w, crossed


_NO_STORE = np.zeros((0, 3))


def _indicator(lam, N, R, alpha, p, n_steps):
    """Positive below the first eigenvalue, non-positive above it.

    Values where u has a zero on (0, R] are mapped to -1: they lie past the
    first eigenvalue, beyond the first Dirichlet value of the ball.
    """
    F, _, _, crossed = _shoot(lam, float(N), R, alpha, p, n_steps, EPS_FRACTION, _NO_STORE)
    return -1.0 if crossed else F


def _validate(N, R, alpha, p):
    if int(N) != N or N < 1:
        raise ValueError(f"N must be a positive integer, got {N!r}")
    if not R > 0:
        raise ValueError(f"R must be positive, got {R!r}")
    if not alpha > 0:
        raise ValueError(f"shooting needs alpha > 0, got {alpha!r}")
    if not (P_MIN <= p <= P_MAX):
        raise ValueError(f"p={p!r} outside the supported range [{P_MIN}, {P_MAX}]")


def lambda1_bracket_scan(N: int, R: float, alpha: float, p: float, lam_max: float,
                         n_steps: int = DEFAULT_STEPS, ratio: float = 2.0) -> tuple:
    """First sign-change bracket of the boundary mismatch on a geometric grid.

    The grid starts well below alpha N / R, the Rayleigh quotient of the
    constant function and hence an upper bound for the first eigenvalue.
    """
    _validate(N, R, alpha, p)
    lo = min(alpha * N / R, lam_max) * 1e-10
    g_lo = _indicator(lo, N, R, alpha, p, n_steps)
    tries = 0
    while g_lo <= 0.0:
        lo *= 1e-4
        tries += 1
        if tries > 20:
            raise SolverError("boundary mismatch is non-positive at every starting value")
        g_lo = _indicator(lo, N, R, alpha, p, n_steps)
    while lo < lam_max:
        hi = min(lo * ratio, lam_max)
        g_hi = _indicator(hi, N, R, alpha, p, n_steps)
        if g_hi <= 0.0:
            return lo, hi
        lo = hi
    raise SolverError(f"no sign change of the boundary mismatch below lam_max={lam_max:g}")


@dataclass
class ShootingResult:
    lambda1: float
    residual: float
    steps: int
    err: float
    r: np.ndarray = field(repr=False, default=None)
    u: np.ndarray = field(repr=False, default=None)
    du: np.ndarray = field(repr=False, default=None)


def _solve(N, R, alpha, p, n_steps, lam_max):
    lo, hi = lambda1_bracket_scan(N, R, alpha, p, lam_max, n_steps)
    g = lambda lam: _indicator(lam, N, R, alpha, p, n_steps)  # noqa: E731
    return bisect(g, lo, hi)


def ball_lambda1(N: int, R: float, alpha: float, p: float = 2.0,
                 n_steps: int = DEFAULT_STEPS, lam_max: float | None = None) -> ShootingResult:
    """Smallest Robin eigenvalue of the p-Laplacian on the N-ball of radius R.

    The value is computed with ``n_steps`` and ``2 * n_steps`` RK4 steps; the
    finer one is returned and their difference is the error estimate.
    """
    N, R, alpha, p = int(N), float(R), float(alpha), float(p)
    _validate(N, R, alpha, p)
    if n_steps < DEFAULT_STEPS:
        raise ValueError(f"at least {DEFAULT_STEPS} steps are required")
    if lam_max is None:
        lam_max = alpha * N / R * (1.0 + 1e-9)
    coarse = _solve(N, R, alpha, p, n_steps, lam_max)
    fine_steps = 2 * n_steps
    lam = _solve(N, R, alpha, p, fine_steps, lam_max)

    store = np.empty((fine_steps + 1, 3))
    F, uR, wR, crossed = _shoot(lam, float(N), R, alpha, p, fine_steps, EPS_FRACTION, store)
    scale = abs(wR) + alpha * abs(uR) ** (p - 1.0)
    residual = abs(F) / scale if scale > 0 else abs(F)
    if crossed or residual > 1e-6:
        raise SolverError(
            f"shooting bracket collapsed onto an interior zero of u (lam={lam:.6g}, "
            f"relative mismatch {residual:.2e})"
        )
    r, u, w = store[:, 0], store[:, 1], store[:, 2]
    du = np.sign(w) * np.abs(w) ** (1.0 / (p - 1.0))
    return ShootingResult(lam, residual, fine_steps, abs(lam - coarse), r, u, du)


def radial_rayleigh(N: int, R: float, alpha: float, p: float, r, u, du=None) -> float:
    """Rayleigh quotient of a radial function sampled at radii ``r`` (ending at R).

    ``du`` defaults to a second-order finite-difference derivative.  The
    sphere-area factor is common to every term and dropped.
    """
    r, u = np.asarray(r, dtype=float), np.asarray(u, dtype=float)
    if du is None:
        du = np.gradient(u, r, edge_order=2)
    weight = r ** (N - 1)
    num = simpson(np.abs(du) ** p * weight, x=r) + alpha * abs(u[-1]) ** p * R ** (N - 1)
    den = simpson(np.abs(u) ** p * weight, x=r)
    if den == 0.0:
        raise ZeroDivisionError("test function vanishes identically")
    return float(num / den)

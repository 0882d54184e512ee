"""Semianalytic Laplacian spectra (p = 2) on intervals, rectangles and disks.

Robin eigenvalues are bracketed between consecutive Dirichlet values and
located by bisection; every bracket is sign-checked and a failed check is an
error, never a skipped mode.  Negative alpha is rejected here (the FEM
solvers accept it).
"""

from __future__ import annotations

import math

import numpy as np

from .bessel import bessel_pair, bessel_prime_zeros, bessel_zeros
from .domain import Ball, Disk, DomainError, Interval, Rectangle
from .roots import bisect, bracket_above_zero
from .spectrum import Spectrum, group_values

REL_ERR = 1e-12
_MAX_ORDER = 5000


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not alpha >= 0.0:
        raise ValueError(f"analytic solvers need alpha >= 0 (got {alpha!r}); use the FEM solver")
    return alpha


def _check_k(k: int) -> int:
    if int(k) != k or k < 1:
        raise ValueError(f"k must be a positive integer, got {k!r}")
    return int(k)


def secular(omega: float, L: float, alpha: float) -> float:
    """(w^2 - a^2) sin(wL) - 2 a w cos(wL) for the Robin interval [0, L]."""
    return (omega**2 - alpha**2) * math.sin(omega * L) - 2.0 * alpha * omega * math.cos(omega * L)


def _secular_reduced(omega: float, L: float, alpha: float) -> float:
    # secular(omega)/omega, finite at omega = 0 where it equals -a^2 L - 2a
    if omega == 0.0:
        return -alpha * alpha * L - 2.0 * alpha
    return (omega**2 - alpha**2) * math.sin(omega * L) / omega - 2.0 * alpha * math.cos(omega * L)


def interval_robin_root(n: int, L: float, alpha: float) -> float:
    """n-th positive frequency of the Robin interval, in ((n-1)pi/L, n pi/L)."""
    lo, hi = (n - 1) * math.pi / L, n * math.pi / L
    f = lambda w: _secular_reduced(w, L, alpha)  # noqa: E731
    # exact values at multiples of pi/L, where sin vanishes: -2 alpha cos(n pi)
    sign = 1.0 if n % 2 else -1.0
    f_lo, f_hi = -2.0 * alpha * sign, 2.0 * alpha * sign
    if n == 1:
        return bisect(f, *bracket_above_zero(f, hi, f_hi))
    return bisect(f, lo, hi, f_lo, f_hi)


def interval_spectrum(L: float, alpha: float, k: int) -> Spectrum:
    """First ``k`` Robin eigenvalues of the interval of length ``L``."""
    L = float(L)
    if not L > 0:
        raise DomainError("L must be positive")
    alpha, k = _check_alpha(alpha), _check_k(k)
    if alpha == 0.0:
        vals = [((n - 1) * math.pi / L) ** 2 for n in range(1, k + 1)]
        solver = "closed-form"
    else:
        vals = [interval_robin_root(n, L, alpha) ** 2 for n in range(1, k + 1)]
        solver = "secular"
    return group_values(vals, solver, modes=[f"n={n}" for n in range(1, k + 1)],
                        err=[REL_ERR * v for v in vals])


def _interval_dirichlet(L: float, k: int) -> list:
    return [(n * math.pi / L) ** 2 for n in range(1, k + 1)]


def _tensor(va, vb, k: int, solver: str) -> Spectrum:
    va, vb = np.asarray(va), np.asarray(vb)
    sums = (va[:, None] + vb[None, :]).ravel()
    idx = [(i + 1, j + 1) for i in range(len(va)) for j in range(len(vb))]
    order = np.argsort(sums, kind="stable")
    vals = sums[order]
    modes = [f"({idx[o][0]},{idx[o][1]})" for o in order]
    err = REL_ERR * np.abs(vals)
    return group_values(vals, solver, modes=modes, err=err).first(k)


def rectangle_spectrum(a: float, b: float, alpha: float, k: int) -> Spectrum:
    """First ``k`` Robin eigenvalues of the a x b rectangle as sums of side spectra."""
    alpha, k = _check_alpha(alpha), _check_k(k)
    va = interval_spectrum(a, alpha, k).values()
    vb = interval_spectrum(b, alpha, k).values()
    solver = "closed-form" if alpha == 0.0 else "secular-tensor"
    return _tensor(va, vb, k, solver)


def disk_robin_root(m: int, s: int, R: float, alpha: float) -> float:
    """s-th positive root of x J_m'(x) + alpha R J_m(x).

    The root lies between consecutive zeros of J_m (with the left end of the
    first bracket at m, where J_m and J_m' are both still positive).
    """
    aR = alpha * R
    zeros = bessel_zeros(m, s)
    lo = zeros[s - 2] if s >= 2 else float(m)
    hi = zeros[s - 1]

    def f(x):
        j, dj = bessel_pair(m, x)
        return x * dj + aR * j

    if lo == 0.0:
        return bisect(f, *bracket_above_zero(f, hi))
    return bisect(f, lo, hi)


def _disk_modes(R: float, k: int, root, solver: str) -> Spectrum:
    """Collect (x/R)^2 over angular orders until no order can contribute.

    Every root of order m exceeds j'_{m,1} >= m, so once (m/R)^2 passes the
    current k-th candidate the scan stops.
    """
    vals, mults, modes = [], [], []

    def kth():
        if sum(mults) < k:
            return math.inf
        expanded = sorted(v for v, mu in zip(vals, mults) for _ in range(mu))
        return expanded[k - 1]

    m = 0
    while True:
        if m > _MAX_ORDER:
            raise RuntimeError("disk mode scan did not terminate")
        if m >= 1 and (m / R) ** 2 > kth():
            break
        s = 1
        while True:
            value = (root(m, s) / R) ** 2
            if value > kth():
                break
            vals.append(value)
            mults.append(1 if m == 0 else 2)
            modes.append(f"m={m},s={s}")
            s += 1
        m += 1
    raw, labels = [], []
    for v, mu, lab in zip(vals, mults, modes):
        raw.extend([v] * mu)
        labels.extend([lab] * mu)
    return group_values(raw, solver, modes=labels, err=[REL_ERR * v for v in raw]).first(k)


def disk_spectrum(R: float, alpha: float, k: int) -> Spectrum:
    """First ``k`` Robin eigenvalues of the disk of radius ``R``."""
    R = float(R)
    if not R > 0:
        raise DomainError("R must be positive")
    alpha, k = _check_alpha(alpha), _check_k(k)
    if alpha == 0.0:
        return _disk_modes(R, k, lambda m, s: bessel_prime_zeros(m, s)[s - 1], "bessel-closed-form")
    return _disk_modes(R, k, lambda m, s: disk_robin_root(m, s, R, alpha), "bessel")


def disk_dirichlet(R: float, k: int) -> Spectrum:
    return _disk_modes(float(R), _check_k(k), lambda m, s: bessel_zeros(m, s)[s - 1], "bessel-closed-form")


def closed_form_dirichlet_neumann(d, condition: str, k: int) -> Spectrum:
    """Dirichlet or Neumann eigenvalues of an interval, rectangle or disk."""
    k = _check_k(k)
    condition = condition.lower()
    if condition not in ("dirichlet", "neumann"):
        raise ValueError(f"condition must be 'dirichlet' or 'neumann', got {condition!r}")
    if isinstance(d, Ball) and d.N in (1, 2):
        d = Interval(2 * d.R) if d.N == 1 else Disk(d.R)
    if isinstance(d, Interval):
        if condition == "neumann":
            return interval_spectrum(d.L, 0.0, k)
        vals = _interval_dirichlet(d.L, k)
        return group_values(vals, "closed-form", modes=[f"n={n}" for n in range(1, k + 1)],
                            err=[REL_ERR * v for v in vals])
    if isinstance(d, Rectangle):
        if condition == "neumann":
            return rectangle_spectrum(d.a, d.b, 0.0, k)
        return _tensor(_interval_dirichlet(d.a, k), _interval_dirichlet(d.b, k), k, "closed-form")
    if isinstance(d, Disk):
        return disk_spectrum(d.R, 0.0, k) if condition == "neumann" else disk_dirichlet(d.R, k)
    raise DomainError(f"no closed form for {type(d).__name__}")

"""Bessel functions of the first kind of integer order, and their zeros.

J_m is evaluated by its power series for small arguments and by Miller's
backward recurrence, normalised with J_0 + 2 sum J_2j = 1, otherwise.
"""

from __future__ import annotations

import math

from .roots import bisect

_SERIES_MAX_X = 6.0
_RESCALE = 1e200


def _check(m: int, x: float) -> tuple:
    if int(m) != m or m < 0:
        raise ValueError(f"order must be a non-negative integer, got {m!r}")
    x = float(x)
    if not (x >= 0.0 and math.isfinite(x)):
        raise ValueError(f"argument must be finite and non-negative, got {x!r}")
    if x > 1e4:
        raise OverflowError("argument beyond the supported range (x <= 1e4)")
    return int(m), x


def _series(m: int, x: float) -> float:
    h = 0.5 * x
    if h == 0.0:
        # x is subnormal: only the leading term of J_0 survives
        return 1.0 if m == 0 else 0.0
    log_h = math.log(h)
    log_t0 = m * log_h - math.lgamma(m + 1.0)
    if log_t0 < -745.0:
        return 0.0
    term = math.exp(log_t0)
    total = term
    q = -h * h
    k = 0
    while True:
        k += 1
        term *= q / (k * (k + m))
        total += term
        if abs(term) <= 1e-17 * abs(total) and k > 2:
            return total


def _miller(m: int, x: float) -> tuple:
    """(J_m(x), J_{m+1}(x)) by backward recurrence."""
    top = max(m + 1, int(x)) + 20 + int(math.sqrt(40.0 * max(m + 1, x)))
    top += top % 2
    j_next, j_cur = 0.0, 1e-300
    norm = 0.0
    want_m = want_m1 = 0.0
    two_over_x = 2.0 / x
    for n in range(top, 0, -1):
        # j_cur holds J_n, j_next J_{n+1}
        if n == m + 1:
            want_m1 = j_cur
        if n == m:
            want_m = j_cur
        if n % 2 == 0:
            norm += 2.0 * j_cur
        j_prev = n * two_over_x * j_cur - j_next
        j_next, j_cur = j_cur, j_prev
        if abs(j_cur) > _RESCALE:
            j_cur /= _RESCALE
            j_next /= _RESCALE
            norm /= _RESCALE
            want_m /= _RESCALE
            want_m1 /= _RESCALE
    # j_cur is now J_0
    if m == 0:
        want_m = j_cur
    norm += j_cur
    return want_m / norm, want_m1 / norm


def _pair(m: int, x: float) -> tuple:
    if x == 0.0:
        return (1.0 if m == 0 else 0.0), 0.0
    if x <= _SERIES_MAX_X:
        return _series(m, x), _series(m + 1, x)
    return _miller(m, x)


def bessel_j(m: int, x: float) -> float:
    """J_m(x) for integer ``m >= 0`` and ``0 <= x <= 1e4``."""
    m, x = _check(m, x)
    return _pair(m, x)[0]


def bessel_j_prime(m: int, x: float) -> float:
    """Derivative J_m'(x) = (J_{m-1}(x) - J_{m+1}(x)) / 2, with J_0' = -J_1."""
    m, x = _check(m, x)
    if m == 0:
        return -_pair(0, x)[1]
    jm1 = _pair(m - 1, x)
    jp1 = _pair(m + 1, x)[0]
    return 0.5 * (jm1[0] - jp1)


def bessel_pair(m: int, x: float) -> tuple:
    """(J_m(x), J_m'(x)) from one evaluation, using J_m' = (m/x) J_m - J_{m+1}."""
    m, x = _check(m, x)
    jm, jm1 = _pair(m, x)
    if x == 0.0:
        return jm, 0.5 if m == 1 else 0.0
    if x < 1.0 and m > 0:
        # m/x overflows or cancels for tiny x; use the symmetric identity
        return jm, 0.5 * (_pair(m - 1, x)[0] - jm1)
    return jm, m / x * jm - jm1


_ZEROS: dict = {}
_PRIME_ZEROS: dict = {}


def _extend_zeros(cache: dict, key: int, f, start: float, count: int, step: float = 0.5) -> tuple:
    # the scan position is cached with the zeros so that results do not depend
    # on the order in which counts are requested
    state = cache.setdefault(key, {"zeros": [], "a": start})
    zeros, a = state["zeros"], state["a"]
    fa = f(a)
    while len(zeros) < count:
        b = a + step
        fb = f(b)
        if fa == 0.0:
            zeros.append(a)
        elif fa * fb < 0.0:
            zeros.append(bisect(f, a, b, fa, fb))
        a, fa = b, fb
    state["a"] = a
    return tuple(zeros[:count])


def bessel_zeros(m: int, count: int) -> tuple:
    """First ``count`` positive zeros j_{m,1} < j_{m,2} < ... of J_m.

    Consecutive zeros are more than 2.5 apart, so a 0.5 scan starting below
    the first zero (which exceeds m) cannot skip one.
    """
    return _extend_zeros(_ZEROS, m, lambda x: bessel_j(m, x), max(float(m), 0.5), count)


def bessel_prime_zeros(m: int, count: int) -> tuple:
    """First ``count`` non-negative zeros of J_m', with 0 listed first for m = 0.

    For m >= 1 the first zero exceeds m, where the scan starts.
    """
    if count <= 0:
        return ()
    if m == 0:
        return (0.0,) + bessel_zeros(1, count - 1)
    return _extend_zeros(_PRIME_ZEROS, m, lambda x: bessel_pair(m, x)[1], float(m), count)

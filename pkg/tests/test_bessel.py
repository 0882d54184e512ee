import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import special

from robinspec.bessel import bessel_j, bessel_j_prime, bessel_pair, bessel_prime_zeros, bessel_zeros
from robinspec.roots import bisect


def test_values_at_zero():
    assert bessel_j(0, 0.0) == 1.0
    assert bessel_j(1, 0.0) == 0.0
    assert bessel_j(3, 0.0) == 0.0
    assert bessel_j_prime(1, 0.0) == 0.5
    assert bessel_j_prime(0, 0.0) == 0.0


@pytest.mark.parametrize("m", [0, 1, 2, 3, 5, 10, 25])
def test_against_reference(m):
    x = np.concatenate([np.linspace(0.0, 10.0, 101), np.linspace(10.0, 200.0, 381)])
    ours = np.array([bessel_j(m, xi) for xi in x])
    ref = special.jv(m, x)
    # ten significant digits, measured against the local envelope of |J_m|
    assert np.max(np.abs(ours - ref)) < 1e-10
    dours = np.array([bessel_j_prime(m, xi) for xi in x])
    assert np.max(np.abs(dours - special.jvp(m, x))) < 1e-10


@given(m=st.integers(1, 30), x=st.floats(0.01, 200.0))
def test_recurrence(m, x):
    lhs = bessel_j(m + 1, x)
    rhs = 2 * m / x * bessel_j(m, x) - bessel_j(m - 1, x)
    assert abs(lhs - rhs) < 1e-8


@given(m=st.integers(0, 20), x=st.floats(0.0, 150.0))
def test_pair_consistent(m, x):
    j, dj = bessel_pair(m, x)
    assert j == bessel_j(m, x)
    assert dj == pytest.approx(bessel_j_prime(m, x), rel=1e-13, abs=1e-15)


@pytest.mark.parametrize("m", [0, 1, 2, 7])
def test_zeros(m):
    z = bessel_zeros(m, 6)
    assert np.allclose(z, special.jn_zeros(m, 6), rtol=1e-13)
    zp = bessel_prime_zeros(m, 6)
    ref = special.jnp_zeros(m, 6 if m else 5)
    if m == 0:
        assert zp[0] == 0.0
        ref = np.concatenate([[0.0], ref])
    assert np.allclose(zp, ref, rtol=1e-13)


def test_zero_of_j0_from_own_bisection():
    j01 = bisect(lambda x: bessel_j(0, x), 2.0, 3.0)
    assert abs(bessel_j(0, j01)) < 1e-10
    assert j01 == pytest.approx(bessel_zeros(0, 1)[0], rel=1e-14)


def test_zero_cache_order_independent():
    a = bessel_zeros(4, 3)
    b = bessel_zeros(4, 9)[:3]
    assert a == b


def test_guards():
    with pytest.raises(ValueError):
        bessel_j(-1, 1.0)
    with pytest.raises(ValueError):
        bessel_j(0, -1.0)
    with pytest.raises(OverflowError):
        bessel_j(0, 1e6)

import threading

import numpy as np
import pytest

from robinspec import solve
from robinspec.domain import Disk, Rectangle, ball_radius, make_dk
from robinspec.wentzell import (EigencurveProvider, NeedsSignedAlpha, auto_provider, constant_provider,
                                fixed_point, spectrum_provider, transfer_check, transfer_providers,
                                wentzell_eigs, wentzell_fixed_points)

UNIT_AREA_DISK = Disk(ball_radius(2, 1.0))


def test_flat_curves():
    levels = [0.25, 0.5, 0.9]
    pts = wentzell_fixed_points(constant_provider(levels), 2.0, 1.0, 3)
    for fp, c in zip(pts, levels):
        assert fp.alpha == pytest.approx((1.0 - c) / 2.0, rel=1e-14)
        assert fp.Lambda == pytest.approx(c, rel=1e-14)
    spec = wentzell_eigs(constant_provider(levels), 2.0, 1.0, 3)
    assert list(spec.values()) == pytest.approx(levels)


def test_flat_curve_above_gamma():
    fp = fixed_point(constant_provider([3.0]), 1, 1.0, 1.0)
    assert fp.alpha == pytest.approx(-2.0) and fp.Lambda == pytest.approx(3.0)


def test_unit_disk():
    prov = spectrum_provider(Disk(1.0), 1)
    fp = fixed_point(prov, 1, 1.0, 1.0)
    assert 0 < fp.alpha < 1
    assert fp.residual < 1e-10
    g = (1.0 - solve.lambda_k(Disk(1.0), fp.alpha, 1)[0]) / 1.0
    assert abs(g - fp.alpha) < 1e-10
    assert fp.Lambda == pytest.approx(1 - fp.alpha) and fp.Lambda < 1.0


@pytest.mark.parametrize("k", [1, 2, 3])
@pytest.mark.parametrize("bg", [(1.0, 1.0), (2.0, 0.5), (0.5, 2.0), (0.1, 5.0)])
def test_dk_below_gamma(k, bg):
    beta, gamma = bg
    dk = make_dk(1.0, k, 2)
    pts = wentzell_fixed_points(auto_provider(dk, k, beta, gamma), beta, gamma, k)
    assert pts[-1].Lambda < gamma
    # all k curves coincide with the single-ball curve
    assert np.ptp([p.Lambda for p in pts]) < 1e-12


def test_consistency_identity():
    beta, gamma = 0.5, 2.0
    prov = auto_provider(Rectangle(1, 1), 3, beta, gamma)
    for fp in wentzell_fixed_points(prov, beta, gamma, 3):
        lam = solve.lambda_k(Rectangle(1, 1), fp.alpha, fp.n, solver="fem")[0]
        assert fp.Lambda == pytest.approx(lam, rel=1e-10)
        assert fp.residual < 1e-10


def test_nondecreasing_and_signed_fallback():
    prov = auto_provider(UNIT_AREA_DISK, 4, 1.0, 1.0)
    assert prov.signed
    vals = [fp.Lambda for fp in wentzell_fixed_points(prov, 1.0, 1.0, 4)]
    assert vals[0] < 1.0
    assert np.all(np.diff(vals) >= -1e-12)


def test_needs_signed_alpha():
    prov = spectrum_provider(UNIT_AREA_DISK, 2, solver="auto")
    with pytest.raises(NeedsSignedAlpha, match="needs signed-alpha solver"):
        fixed_point(prov, 2, 1.0, 1.0)


def test_bad_parameters():
    with pytest.raises(ValueError):
        fixed_point(constant_provider([1.0]), 1, 0.0, 1.0)
    with pytest.raises(ValueError):
        fixed_point(constant_provider([1.0]), 1, 1.0, -1.0)


def test_memo_is_shared_and_thread_safe():
    calls = []

    def fn(a):
        calls.append(a)
        return np.array([a + 1.0, a + 2.0]), np.zeros(2)

    prov = EigencurveProvider(fn, 2, True)
    threads = [threading.Thread(target=prov.lambda_n, args=(1 + i % 2, 0.5)) for i in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert prov.lambda_n(2, 0.5) == 2.5
    assert len(prov._memo) == 1


def test_transfer_same_domain():
    pu, pv = transfer_providers(UNIT_AREA_DISK, UNIT_AREA_DISK, 1, 1.0, 1.0)
    rep = transfer_check(pu, pv, 1.0, 1.0, 1)
    assert rep.verdict == "holds-equal"
    assert rep.robin_margin == 0.0 and rep.wentzell_margin == 0.0


def test_transfer_square_vs_d2():
    pu, pv = transfer_providers(Rectangle(1, 1), make_dk(1, 2, 2), 2, 1.0, 1.0)
    rep = transfer_check(pu, pv, 1.0, 1.0, 2)
    assert rep.robin_u > rep.robin_v
    assert rep.wentzell_u > rep.wentzell_v
    assert rep.verdict == "holds"


def test_transfer_crossover_d3_vs_disk():
    # large gamma/beta puts alpha* past the Robin crossover, where D_3 loses
    beta, gamma = 1.0, 100.0
    pu, pv = transfer_providers(make_dk(1, 3, 2), UNIT_AREA_DISK, 3, beta, gamma)
    rep = transfer_check(pu, pv, beta, gamma, 3)
    assert rep.alpha_star > 20
    assert rep.robin_u > rep.robin_v
    assert rep.wentzell_u > rep.wentzell_v
    assert rep.verdict == "holds"


def test_transfer_premise_false():
    pu, pv = transfer_providers(make_dk(1, 2, 2), Rectangle(1, 1), 2, 1.0, 20.0)
    assert transfer_check(pu, pv, 1.0, 20.0, 2).verdict == "premise-false"

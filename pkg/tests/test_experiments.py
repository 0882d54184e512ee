import numpy as np
import pytest

from robinspec import experiments as ex
from robinspec.domain import Disk, Interval, Rectangle, Union, ball_radius, make_dk, parse_domain
from robinspec.solve import UnsupportedProblem

DISK = Disk(ball_radius(2, 1.0))
UNEQUAL = Union((Disk(ball_radius(2, 0.4)), Disk(ball_radius(2, 0.6))))


def test_margin_verdict():
    assert ex.margin_verdict(2.0, 1.0, 0.1, 0.1)[0] == ex.HOLDS
    assert ex.margin_verdict(1.0, 2.0, 0.1, 0.1)[0] == ex.VIOLATED
    assert ex.margin_verdict(1.0, 1.2, 0.1, 0.1)[0] == ex.INCONCLUSIVE
    assert ex.margin_verdict(2.0, 1.0, float("nan"), 0.0)[0] == ex.INCONCLUSIVE


def test_faber_krahn():
    rep = ex.check_faber_krahn(Rectangle(1, 1), [1.0])
    assert rep.verdict == ex.HOLDS and rep.cases[0].lhs > rep.cases[0].rhs
    rep = ex.check_faber_krahn(DISK, [1.0])
    assert rep.verdict == ex.INCONCLUSIVE and "extremal" in rep.reason
    rep = ex.check_faber_krahn(Union((Disk(0.5), Disk(0.8))), [0.5])
    assert rep.verdict == ex.HOLDS


def test_faber_krahn_p3_ball():
    rep = ex.check_faber_krahn(UNEQUAL, [1.0], p=3.0)
    assert rep.verdict == ex.HOLDS


def test_two_balls():
    rep = ex.check_two_balls(DISK, [5.0])
    assert rep.verdict == ex.HOLDS
    rep = ex.check_two_balls(make_dk(1, 2, 2), [1.0])
    assert rep.verdict == ex.INCONCLUSIVE and "extremal" in rep.reason
    rep = ex.check_two_balls(UNEQUAL, [1.0])
    assert rep.verdict == ex.HOLDS


def test_two_balls_fem_stability():
    rep = ex.check_two_balls(DISK, [1.0], solver="fem")
    assert rep.verdict == ex.HOLDS
    assert all(c.margin > c.tol for c in rep.cases)


def test_two_balls_p3_restriction():
    with pytest.raises(UnsupportedProblem):
        ex.check_two_balls(DISK, [1.0], p=3.0)
    assert ex.check_two_balls(UNEQUAL, [1.0], p=3.0).verdict == ex.HOLDS


def test_crossover_disk():
    rep = ex.crossover(DISK, 3, 1e-2, 1e3, 11)
    star = rep.extra["alpha_star"]
    assert star is not None and 1 < star < 100
    assert rep.cases[0].margin > 0 and rep.cases[-1].margin < 0
    assert rep.verdict == ex.HOLDS


def test_crossover_degenerate_and_none():
    rep = ex.crossover(make_dk(1, 3, 2), 3, 1e-2, 1e3, 5)
    assert "degenerate" in rep.reason and rep.extra["alpha_star"] is None
    rep = ex.crossover(Rectangle(1, 1), 2, 1e-2, 1e3, 11)
    assert rep.extra["alpha_star"] is None and rep.reason == "no sign change in range"
    assert all(c.margin > 0 for c in rep.cases)


def test_sweeps():
    sw = ex.sweep_alpha(Interval(np.pi), 3, np.linspace(0, 20, 20))
    assert all(sw.monotone.values())
    assert np.all(np.diff(sw.values, axis=0) >= 0)
    sw = ex.sweep_volume(2, np.linspace(0.2, 4, 20), 1.0)
    assert sw.monotone["lambda_1"]
    sw = ex.sweep_alpha(parse_domain("union:[disk:R=1;disk:R=0.5]"), 3, [0.0, 0.5, 1.0])
    assert sw.values[0, 0] == 0.0 and sw.values[0, 1] == 0.0 and sw.values[0, 2] > 0


def test_wentzell_report():
    rep = ex.wentzell_check(Rectangle(1, 1), make_dk(1, 2, 2), 1.0, 1.0, 2)
    assert rep.verdict == ex.HOLDS
    assert rep.cases[1].lhs > rep.cases[1].rhs
    rep = ex.wentzell_check(DISK, DISK, 1.0, 1.0, 1)
    assert rep.verdict == ex.INCONCLUSIVE and "equality" in rep.reason

"""Inequality checks, eigencurve sweeps and the crossover search.

Every inequality check compares a left-hand eigenvalue with a right-hand one
and only claims ``holds`` when the margin beats twice the combined error
estimate; anything closer is ``inconclusive``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import solve, wentzell
from .domain import (components, describe, is_ball_union, make_ball, make_dk, same_domain,
                     volume)
from .solve import UnsupportedProblem

HOLDS, VIOLATED, INCONCLUSIVE = "holds", "violated", "inconclusive"
REL_FLOOR = 1e-9


@dataclass
class Case:
    domain: str
    param: str
    k: int
    lhs: float
    rhs: float
    lhs_err: float
    rhs_err: float
    margin: float
    tol: float
    verdict: str
    note: str = ""


@dataclass
class ExperimentReport:
    experiment: str
    inputs: dict
    cases: list = field(default_factory=list)
    verdict: str = INCONCLUSIVE
    reason: str = ""
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "inputs": self.inputs,
            "cases": [asdict(c) for c in self.cases],
            "verdict": self.verdict,
            "reason": self.reason,
            "extra": self.extra,
        }


def combined_tol(lhs, rhs, lhs_err, rhs_err) -> float:
    """Twice the summed error estimates, never below a relative floor."""
    scale = max(abs(lhs), abs(rhs), 1.0)
    return max(2.0 * (lhs_err + rhs_err), REL_FLOOR * scale)


def margin_verdict(lhs, rhs, lhs_err, rhs_err) -> tuple:
    """(verdict, tol) for the claim lhs > rhs."""
    if not (math.isfinite(lhs_err) and math.isfinite(rhs_err)):
        return INCONCLUSIVE, math.nan
    tol = combined_tol(lhs, rhs, lhs_err, rhs_err)
    margin = lhs - rhs
    if margin > tol:
        return HOLDS, tol
    if margin < -tol:
        return VIOLATED, tol
    return INCONCLUSIVE, tol


def _overall(cases) -> str:
    verdicts = {c.verdict for c in cases}
    if VIOLATED in verdicts:
        return VIOLATED
    if INCONCLUSIVE in verdicts or not cases:
        return INCONCLUSIVE
    return HOLDS


def _uses_fem(spec) -> bool:
    return any("fem" in e.solver for e in spec.entries)


def _kth(domain, alpha, k, p, solver, refine):
    spec = solve.robin_spectrum(domain, alpha, k, p=p, solver=solver, refine=refine)
    e = spec.entry_at(k)
    return e.value, e.err, _uses_fem(spec)


def _comparison_case(domain, alpha, k, p, solver, refine, lhs_fn, rhs_fn, extremal, stability):
    lhs, lhs_err, fem_l = lhs_fn(refine)
    rhs, rhs_err, fem_r = rhs_fn(refine)
    verdict, tol = margin_verdict(lhs, rhs, lhs_err, rhs_err)
    note = ""
    if extremal:
        verdict, note = INCONCLUSIVE, "extremal case"
    elif not math.isfinite(tol):
        note = "error estimate unavailable"
    elif verdict == HOLDS and stability and (fem_l or fem_r):
        # one more refinement must not flip the verdict
        l2, le2, _ = lhs_fn(refine + 1)
        r2, re2, _ = rhs_fn(refine + 1)
        if margin_verdict(l2, r2, le2, re2)[0] != HOLDS:
            verdict, note = INCONCLUSIVE, "verdict not stable under refinement"
    return Case(describe(domain), f"alpha={alpha:g},p={p:g}", k, lhs, rhs, lhs_err, rhs_err,
                lhs - rhs, tol, verdict, note)


def _finish(report, extremal_reason=""):
    report.verdict = _overall(report.cases)
    if extremal_reason and all(c.note == "extremal case" for c in report.cases):
        report.reason = extremal_reason
    elif report.verdict == INCONCLUSIVE:
        notes = sorted({c.note for c in report.cases if c.note})
        report.reason = "; ".join(notes) or "margin inside error bars"
    elif report.verdict == VIOLATED:
        report.reason = "margin below minus the combined error"
    else:
        report.reason = "margin exceeds twice the combined error"
    return report


def check_faber_krahn(domain, alphas, p: float = 2.0, solver: str = "auto", refine: int = 1,
                      stability: bool = True) -> ExperimentReport:
    """lambda_1(domain) against lambda_1 of the ball with the same volume."""
    N, M = domain.dim, volume(domain)
    ball = make_ball(N, M)
    extremal = same_domain(domain, ball)
    report = ExperimentReport("check-faber-krahn", {
        "domain": describe(domain), "alpha": list(alphas), "p": p, "solver": solver,
        "refine": refine, "ball": describe(ball)})
    for a in alphas:
        report.cases.append(_comparison_case(
            domain, a, 1, p, solver, refine,
            lambda r, a=a: _kth(domain, a, 1, p, solver, r),
            lambda r, a=a: _kth(ball, a, 1, p, "auto", r),
            extremal, stability))
    return _finish(report, "extremal case: the domain is the ball")


def check_two_balls(domain, alphas, p: float = 2.0, solver: str = "auto", refine: int = 1,
                    stability: bool = True) -> ExperimentReport:
    """lambda_2(domain) against lambda_2(D_2) = lambda_1 of the half-volume ball."""
    if p != 2.0 and not (is_ball_union(domain) and len(components(domain)) >= 2):
        raise UnsupportedProblem("for p != 2 the two-balls check needs a union of at least two balls")
    N, M = domain.dim, volume(domain)
    half = make_ball(N, M / 2.0)
    d2 = make_dk(M, 2, N)
    extremal = same_domain(domain, d2)
    report = ExperimentReport("check-two-balls", {
        "domain": describe(domain), "alpha": list(alphas), "p": p, "solver": solver,
        "refine": refine, "D2": describe(d2)})
    for a in alphas:
        report.cases.append(_comparison_case(
            domain, a, 2, p, solver, refine,
            lambda r, a=a: _kth(domain, a, 2, p, solver, r),
            lambda r, a=a: _kth(half, a, 1, p, "auto", r),
            extremal, stability))
    return _finish(report, "extremal case: the domain is D_2")


# ---------------------------------------------------------------------------
# crossover
# ---------------------------------------------------------------------------

def crossover(domain, k: int, alpha_min: float, alpha_max: float, steps: int = 13,
              solver: str = "auto", refine: int = 1, digits: int = 3) -> ExperimentReport:
    """Locate the sign change of Delta(alpha) = lambda_k(domain) - lambda_k(D_k).

    The scan runs over a logarithmic grid; the first sign change is refined by
    bisection in log(alpha) until alpha* is fixed to ``digits`` significant
    digits.  D_k always uses the default (exact) solver.
    """
    if not 0 < alpha_min < alpha_max:
        raise ValueError("need 0 < alpha_min < alpha_max")
    if steps < 2:
        raise ValueError("need at least two grid points")
    N, M = domain.dim, volume(domain)
    dk = make_dk(M, k, N)
    report = ExperimentReport("crossover", {
        "domain": describe(domain), "k": k, "alpha_min": alpha_min, "alpha_max": alpha_max,
        "steps": steps, "solver": solver, "refine": refine, "Dk": describe(dk)})
    if same_domain(domain, dk):
        report.reason = "degenerate: the domain is D_k, Delta vanishes identically"
        report.extra["alpha_star"] = None
        return report

    def delta(a):
        lv, le, _ = _kth(domain, a, k, 2.0, solver, refine)
        rv, re_, _ = _kth(dk, a, k, 2.0, "auto", refine)
        return lv, rv, le, re_

    grid = np.geomspace(alpha_min, alpha_max, steps)
    signs = []
    for a in grid:
        lv, rv, le, re_ = delta(a)
        verdict, tol = margin_verdict(lv, rv, le, re_)
        report.cases.append(Case(describe(domain), f"alpha={a:.6g}", k, lv, rv, le, re_, lv - rv, tol, verdict))
        signs.append(lv - rv)
    alpha_star = None
    for i in range(len(grid) - 1):
        if signs[i] > 0 >= signs[i + 1] or signs[i] < 0 <= signs[i + 1]:
            lo, hi, s_lo = grid[i], grid[i + 1], signs[i]
            while hi / lo - 1.0 > 0.5 * 10.0 ** (1 - digits):
                mid = math.sqrt(lo * hi)
                lv, rv, _, _ = delta(mid)
                if (lv - rv > 0) == (s_lo > 0):
                    lo = mid
                else:
                    hi = mid
            alpha_star = float(f"{math.sqrt(lo * hi):.{digits}g}")
            break
    report.extra["alpha_star"] = alpha_star
    first = report.cases[0]
    if alpha_star is None:
        report.reason = "no sign change in range"
    else:
        report.reason = f"sign change at alpha* = {alpha_star:.{digits}g}"
    # small-alpha dominance of D_k: Delta should start out positive
    report.verdict = HOLDS if first.verdict == HOLDS else INCONCLUSIVE
    if report.verdict == INCONCLUSIVE:
        report.reason += "; Delta not clearly positive at alpha_min"
    return report


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------

@dataclass
class Sweep:
    param_name: str
    params: list
    values: np.ndarray
    errors: np.ndarray
    monotone: dict
    direction: str


def _monotone(col, errs, direction):
    slack = 2.0 * (errs[:-1] + errs[1:])
    slack = np.where(np.isfinite(slack), slack, 0.0)
    d = np.diff(col)
    if direction == "nondecreasing":
        return bool(np.all(d >= -slack))
    return bool(np.all(d < 0.0))


def sweep_alpha(domain, k: int, alphas, p: float = 2.0, solver: str = "auto",
                refine: int = 1) -> Sweep:
    """lambda_1..lambda_k along an alpha grid; columns should be nondecreasing."""
    vals, errs = [], []
    for a in alphas:
        spec = solve.robin_spectrum(domain, a, k, p=p, solver=solver, refine=refine)
        vals.append(spec.values()[:k])
        errs.append(spec.errors()[:k])
    vals, errs = np.array(vals), np.array(errs)
    mono = {f"lambda_{j + 1}": _monotone(vals[:, j], errs[:, j], "nondecreasing") for j in range(k)}
    return Sweep("alpha", [float(a) for a in alphas], vals, errs, mono, "nondecreasing")


def sweep_volume(N: int, volumes, alpha: float, k: int = 1, p: float = 2.0,
                 solver: str = "auto") -> Sweep:
    """lambda_1..lambda_k of N-balls along a volume grid; should strictly decrease."""
    vals, errs = [], []
    for v in volumes:
        spec = solve.robin_spectrum(make_ball(N, v), alpha, k, p=p, solver=solver)
        vals.append(spec.values()[:k])
        errs.append(spec.errors()[:k])
    vals, errs = np.array(vals), np.array(errs)
    mono = {f"lambda_{j + 1}": _monotone(vals[:, j], errs[:, j], "decreasing") for j in range(k)}
    return Sweep("volume", [float(v) for v in volumes], vals, errs, mono, "decreasing")


# ---------------------------------------------------------------------------
# Wentzell
# ---------------------------------------------------------------------------

def wentzell_check(U, V, beta: float, gamma: float, k: int, refine: int = 1) -> ExperimentReport:
    """Transfer of lambda_k(U, alpha*) >= lambda_k(V, alpha*) to Lambda_k(U) >= Lambda_k(V)."""
    pu, pv = wentzell.transfer_providers(U, V, k, beta, gamma, refine)
    tr = wentzell.transfer_check(pu, pv, beta, gamma, k)
    report = ExperimentReport("wentzell-check", {
        "U": describe(U), "V": describe(V), "beta": beta, "gamma": gamma, "k": k, "refine": refine})
    w_verdict = {"holds": HOLDS, "violated": VIOLATED}.get(tr.verdict, INCONCLUSIVE)
    a = tr.alpha_star
    report.cases = [
        Case(describe(U), f"alpha*={a:.12g}", k, tr.robin_u, tr.robin_v, pu.error_n(k, a), pv.error_n(k, a),
             tr.robin_margin, tr.tol, HOLDS if tr.robin_margin > tr.tol else INCONCLUSIVE,
             "Robin premise lambda_k(U) >= lambda_k(V)"),
        Case(describe(U), f"beta={beta:g},gamma={gamma:g}", k, tr.wentzell_u, tr.wentzell_v,
             pu.error_n(k, a), pv.error_n(k, wentzell.fixed_point(pv, k, beta, gamma).alpha), tr.wentzell_margin, tr.tol, w_verdict, "Wentzell conclusion Lambda_k(U) >= Lambda_k(V)"),
    ]
    report.verdict = w_verdict
    report.reason = {
        "holds": "strict Robin premise carried over to a strict Wentzell inequality",
        "holds-equal": "equality case: both sides agree within tolerance",
        "premise-false": "Robin premise fails at alpha*, nothing to transfer",
        "violated": "Robin premise holds but the Wentzell inequality fails",
        "inconclusive": "margins inside error bars",
    }[tr.verdict]
    report.extra = {"alpha_star": tr.alpha_star, "transfer_verdict": tr.verdict,
                    "u_below_gamma": tr.u_below_gamma}
    return report

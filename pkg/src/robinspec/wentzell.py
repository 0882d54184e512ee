"""Generalised-Wentzell eigenvalues from Robin eigencurves.

For fixed beta, gamma > 0 the n-th Wentzell eigenvalue is
``Lambda_n = gamma - beta * alpha_n`` where ``alpha_n`` is the unique fixed
point of ``g_n(alpha) = (gamma - lambda_n(alpha)) / beta``; ``lambda_n`` is
the n-th Robin eigenvalue counted with multiplicity.  Each ``g_n`` is
nonincreasing, so ``h = g_n - id`` is strictly decreasing and bisection
finds its root once a bracket is known.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import numpy as np

from . import solve
from .domain import describe
from .roots import bisect
from .spectrum import Entry, SolverError, Spectrum

MAX_BISECTIONS = 60
MAX_EXTENSIONS = 40


class NeedsSignedAlpha(SolverError):
    """The fixed point lies at alpha < 0 but the eigencurve provider cannot go there."""

    def __init__(self, n: int, name: str):
        if n:
            what = f"curve {n} has lambda_{n}(0) >= gamma, so its fixed point is negative"
        else:
            what = "an eigencurve is needed at alpha < 0"
        super().__init__(f"needs signed-alpha solver: {what}; provider {name!r} only handles alpha >= 0")


class EigencurveProvider:
    """Memoised alpha -> (lambda_1, ..., lambda_k, errors) map.

    ``fn(alpha)`` must return the first ``k`` eigenvalues (with multiplicity)
    and their error estimates.  Lookups are shared across curve indices since
    one solve yields every curve at that alpha.
    """

    def __init__(self, fn, k: int, signed: bool, name: str = "custom"):
        self._fn = fn
        self.k = k
        self.signed = signed
        self.name = name
        self._memo: dict = {}
        self._lock = threading.Lock()
        self.solves = 0

    def evaluate(self, alpha: float) -> tuple:
        alpha = float(alpha)
        with self._lock:
            hit = self._memo.get(alpha)
        if hit is not None:
            return hit
        if alpha < 0 and not self.signed:
            raise NeedsSignedAlpha(0, self.name)
        vals, errs = self._fn(alpha)
        vals = np.asarray(vals, dtype=float)[: self.k]
        errs = np.asarray(errs, dtype=float)[: self.k]
        with self._lock:
            self.solves += 1
            return self._memo.setdefault(alpha, (vals, errs))

    def lambda_n(self, n: int, alpha: float) -> float:
        return float(self.evaluate(alpha)[0][n - 1])

    def error_n(self, n: int, alpha: float) -> float:
        return float(self.evaluate(alpha)[1][n - 1])


def spectrum_provider(domain, k: int, solver: str = "auto", refine: int = 1,
                      richardson: bool = True) -> EigencurveProvider:
    """Eigencurves of ``domain`` from :func:`robinspec.solve.robin_spectrum`.

    The analytic solvers only accept alpha >= 0; the FEM solver accepts any
    sign, so ``solver="fem"`` yields a signed provider.
    """

    def fn(alpha):
        spec = solve.robin_spectrum(domain, alpha, k, solver=solver, refine=refine, richardson=richardson)
        return spec.values(), spec.errors()

    signed = solver == "fem"
    return EigencurveProvider(fn, k, signed, f"{describe(domain)}/{solver}")


def auto_provider(domain, k: int, beta: float, gamma: float, refine: int = 1,
                  richardson: bool = True, signed: bool = False) -> EigencurveProvider:
    """Analytic eigencurves when every fixed point is positive, FEM otherwise.

    All fixed points are positive exactly when lambda_k(domain, 0) < gamma.
    ``signed`` forces the FEM provider.
    """
    try:
        neumann_k = solve.robin_spectrum(domain, 0.0, k)[k]
        analytic_ok = True
    except (solve.UnsupportedProblem, ValueError):
        analytic_ok = False
    if analytic_ok and neumann_k < gamma and not signed:
        return spectrum_provider(domain, k, "auto")
    return spectrum_provider(domain, k, "fem", refine, richardson)


def transfer_providers(U, V, k: int, beta: float, gamma: float, refine: int = 1,
                       richardson: bool = True) -> tuple:
    """Providers for :func:`transfer_check`; V is signed whenever U is, since
    V is then evaluated at a negative alpha*."""
    pu = auto_provider(U, k, beta, gamma, refine, richardson)
    pv = auto_provider(V, k, beta, gamma, refine, richardson, signed=pu.signed)
    return pu, pv


def constant_provider(levels) -> EigencurveProvider:
    """Flat eigencurves lambda_n(alpha) = levels[n-1] (test double)."""
    levels = np.sort(np.asarray(levels, dtype=float))
    return EigencurveProvider(lambda a: (levels, np.zeros_like(levels)), len(levels), True, "constant")


@dataclass(frozen=True)
class FixedPoint:
    n: int
    alpha: float
    Lambda: float
    residual: float
    err: float


def _check_params(beta, gamma):
    if not (beta > 0 and gamma > 0 and math.isfinite(beta) and math.isfinite(gamma)):
        raise ValueError(f"beta and gamma must be positive, got beta={beta!r}, gamma={gamma!r}")


def fixed_point(provider: EigencurveProvider, n: int, beta: float, gamma: float) -> FixedPoint:
    """Unique alpha with (gamma - lambda_n(alpha)) / beta = alpha."""
    _check_params(beta, gamma)

    def h(a):
        return (gamma - provider.lambda_n(n, a)) / beta - a

    hi = gamma / beta
    h_hi = h(hi)
    if h_hi >= 0.0:
        raise SolverError(f"curve {n}: lambda_{n}(gamma/beta) <= 0, no bracket on the right")
    lo, h_lo = 0.0, h(0.0)
    if h_lo <= 0.0:
        if h_lo == 0.0:
            lo = hi = 0.0
        elif not provider.signed:
            raise NeedsSignedAlpha(n, provider.name)
        else:
            for j in range(MAX_EXTENSIONS + 1):
                cand = -(2.0**j) * gamma / beta
                h_c = h(cand)
                if h_c > 0.0:
                    lo, h_lo = cand, h_c
                    break
                hi, h_hi = cand, h_c
            else:
                raise SolverError(f"curve {n}: no sign change down to alpha = {cand:g}")
    if lo == hi:
        alpha = lo
    else:
        alpha = bisect(h, lo, hi, h_lo, h_hi, rtol=1e-15, atol=1e-15 * gamma / beta, maxiter=MAX_BISECTIONS)
    residual = abs(h(alpha))
    Lambda = gamma - beta * alpha
    return FixedPoint(n, alpha, Lambda, residual, provider.error_n(n, alpha))


def wentzell_fixed_points(provider: EigencurveProvider, beta: float, gamma: float, k: int) -> list:
    if k > provider.k:
        raise ValueError(f"provider only tracks {provider.k} curves, asked for {k}")
    return [fixed_point(provider, n, beta, gamma) for n in range(1, k + 1)]


def wentzell_eigs(provider: EigencurveProvider, beta: float, gamma: float, k: int) -> Spectrum:
    """First ``k`` Wentzell eigenvalues, one per Robin eigencurve."""
    points = wentzell_fixed_points(provider, beta, gamma, k)
    return Spectrum(tuple(
        Entry(fp.Lambda, 1, 0, f"alpha_{fp.n}={fp.alpha:.12g}", f"fixed-point/{provider.name}", fp.err)
        for fp in points
    ))


@dataclass
class TransferReport:
    k: int
    beta: float
    gamma: float
    alpha_star: float
    robin_u: float
    robin_v: float
    wentzell_u: float
    wentzell_v: float
    tol: float
    verdict: str
    u_below_gamma: bool = True

    @property
    def robin_margin(self) -> float:
        return self.robin_u - self.robin_v

    @property
    def wentzell_margin(self) -> float:
        return self.wentzell_u - self.wentzell_v


def _tol(*errs, floor):
    finite = [e for e in errs if math.isfinite(e)]
    return max(floor, 2.0 * sum(finite))


def transfer_check(provider_u: EigencurveProvider, provider_v: EigencurveProvider,
                   beta: float, gamma: float, k: int, rel_floor: float = 1e-9) -> TransferReport:
    """Check that a Robin inequality at alpha* carries over to the Wentzell eigenvalues.

    With ``alpha* = (gamma - Lambda_k(U)) / beta``: lambda_k(U, alpha*) >=
    lambda_k(V, alpha*) must imply Lambda_k(U) >= Lambda_k(V), strictly when
    the premise is strict.  Verdicts: ``holds``, ``holds-equal`` (both sides
    equal within tolerance), ``premise-false`` (Robin inequality fails, nothing
    to check), ``inconclusive`` and ``violated``.

    The implication only uses monotonicity of the eigencurves, which holds
    for every real alpha, so Lambda_k(U) >= gamma (alpha* <= 0) is checked
    too when the providers are signed; ``u_below_gamma`` records which case
    was run.
    """
    fu = fixed_point(provider_u, k, beta, gamma)
    a_star = fu.alpha
    ru, rv = provider_u.lambda_n(k, a_star), provider_v.lambda_n(k, a_star)
    fv = fixed_point(provider_v, k, beta, gamma)
    scale = max(abs(ru), abs(rv), abs(fu.Lambda), abs(fv.Lambda), 1.0)
    tol = _tol(provider_u.error_n(k, a_star), provider_v.error_n(k, a_star), fu.err, fv.err,
               floor=rel_floor * scale)
    r_margin, w_margin = ru - rv, fu.Lambda - fv.Lambda
    if r_margin < -tol:
        verdict = "premise-false"
    elif w_margin < -tol:
        verdict = "violated"
    elif r_margin > tol and w_margin <= tol:
        # strict premise with a non-strict conclusion
        verdict = "violated" if w_margin < 0 else "inconclusive"
    elif abs(r_margin) <= tol and abs(w_margin) <= tol:
        verdict = "holds-equal"
    else:
        verdict = "holds"
    return TransferReport(k, beta, gamma, a_star, ru, rv, fu.Lambda, fv.Lambda, tol, verdict,
                          fu.Lambda < gamma)

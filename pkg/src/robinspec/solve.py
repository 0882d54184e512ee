"""Route eigenvalue requests to the analytic, shooting or FEM solvers.

A union is solved piece by piece and the pieces merged; identical pieces
are solved once.
"""

from __future__ import annotations

import math
import threading

import numpy as np

from . import analytic, fem, shooting
from .domain import Ball, Disk, Interval, MeshDomain, Rectangle, canonical_form, components, make_ball
from .spectrum import Entry, Spectrum, merge_spectra

SOLVERS = ("auto", "analytic", "fem", "shooting")
RECT_BASE_CELLS = 4
DISK_BASE_RINGS = 4
INTERVAL_BASE_ELEMENTS = 64


class UnsupportedProblem(ValueError):
    """No solver handles this combination of shape, exponent and condition."""


def _as_basic(piece):
    # 1- and 2-balls are handled as intervals and disks
    if isinstance(piece, Ball) and piece.N == 1:
        return Interval(2.0 * piece.R)
    if isinstance(piece, Ball) and piece.N == 2:
        return Disk(piece.R)
    return piece


def _ball_params(piece):
    if isinstance(piece, Interval):
        return 1, piece.L / 2.0
    if isinstance(piece, Disk):
        return 2, piece.R
    if isinstance(piece, Ball):
        return piece.N, piece.R
    return None


# ---------------------------------------------------------------------------
# FEM meshes, cached per piece and refinement level
# ---------------------------------------------------------------------------

_PENCILS: dict = {}
_PENCIL_LOCK = threading.Lock()


def base_mesh(piece) -> fem.Mesh:
    if isinstance(piece, Rectangle):
        h = min(piece.a, piece.b) / RECT_BASE_CELLS
        return fem.generate_rect_mesh(piece.a, piece.b, max(1, round(piece.a / h)), max(1, round(piece.b / h)))
    if isinstance(piece, Disk):
        return fem.generate_disk_mesh(piece.R, DISK_BASE_RINGS)
    if isinstance(piece, MeshDomain):
        return piece.mesh
    raise UnsupportedProblem(f"no 2-D mesh for {type(piece).__name__}")


def pencil_for(piece, level: int) -> fem.FemPencil:
    key = (id(piece.mesh),) if isinstance(piece, MeshDomain) else canonical_form(piece, 15)
    key = key + (level,)
    with _PENCIL_LOCK:
        hit = _PENCILS.get(key)
    if hit is not None:
        return hit
    pencil = fem.assemble(fem.refine_times(base_mesh(piece), level))
    with _PENCIL_LOCK:
        _PENCILS.setdefault(key, pencil)
        return _PENCILS[key]


def _fem_values(piece, alpha, k, level, dirichlet, tol):
    if isinstance(piece, Interval):
        if dirichlet:
            raise UnsupportedProblem("1-D FEM supports Robin/Neumann only; Dirichlet has a closed form")
        return fem.interval_fem_eigs(piece.L, alpha, k, INTERVAL_BASE_ELEMENTS * 2**level, tol)
    pencil = pencil_for(piece, level)
    if dirichlet:
        return fem.dirichlet_eigenpairs(pencil.mesh, k, tol, pencil)[0]
    return fem.robin_eigenpairs(pencil.mesh, alpha, k, tol, pencil)[0]


def fem_piece_spectrum(piece, alpha: float, k: int, refine: int = 1, richardson: bool = True,
                       dirichlet: bool = False, tol: float = fem.DEFAULT_TOL) -> Spectrum:
    """FEM eigenvalues of one piece at refinement level ``refine``.

    With ``richardson`` the levels ``refine - 1`` and ``refine`` are combined
    and the Richardson estimate is reported as the error; otherwise the error
    is left as NaN (unknown).
    """
    piece = _as_basic(piece)
    if isinstance(piece, Ball):
        raise UnsupportedProblem("FEM covers dimensions 1 and 2 only")
    fine = _fem_values(piece, alpha, k, refine, dirichlet, tol)
    if richardson:
        if refine < 1:
            raise ValueError("Richardson extrapolation needs refine >= 1")
        coarse = _fem_values(piece, alpha, k, refine - 1, dirichlet, tol)
        vals = fem.richardson(coarse, fine)
        err = fem.estimate_error(coarse, fine)
        solver = "fem-p1+richardson"
    else:
        vals, err = fine, np.full(k, math.nan)
        solver = "fem-p1"
    if dirichlet:
        solver += "-dirichlet"
    return Spectrum(tuple(
        Entry(float(v), 1, 0, f"fem#{i + 1}", solver, float(e)) for i, (v, e) in enumerate(zip(vals, err))
    ))


# ---------------------------------------------------------------------------
# per-piece dispatch
# ---------------------------------------------------------------------------

def _shooting_piece(piece, alpha, k, p):
    params = _ball_params(piece)
    if params is None:
        raise UnsupportedProblem(f"shooting handles balls only, not {type(piece).__name__}")
    if not alpha > 0:
        raise UnsupportedProblem("shooting needs alpha > 0")
    N, R = params
    res = shooting.ball_lambda1(N, R, alpha, p)
    entry = Entry(res.lambda1, 1, 0, "radial-1", "shooting", max(res.err, 1e-12 * res.lambda1))
    if k == 1:
        return Spectrum((entry,))
    # higher eigenvalues of a ball are bounded below by the first eigenvalue
    # of the ball of half its volume (two-balls bound for connected domains)
    half = shooting.ball_lambda1(N, R * 0.5 ** (1.0 / N), alpha, p).lambda1
    return Spectrum((entry,), rest_bound=half)


def piece_spectrum(piece, alpha: float, k: int, p: float = 2.0, solver: str = "auto", refine: int = 1,
                   richardson: bool = True, dirichlet: bool = False,
                   tol: float = fem.DEFAULT_TOL) -> Spectrum:
    if solver not in SOLVERS:
        raise ValueError(f"unknown solver {solver!r}; choose from {SOLVERS}")
    piece = _as_basic(piece)
    if p != 2.0:
        if dirichlet:
            raise UnsupportedProblem("Dirichlet eigenvalues are only available for p = 2")
        if solver not in ("auto", "shooting"):
            raise UnsupportedProblem(f"p = {p} needs the shooting solver")
        return _shooting_piece(piece, alpha, k, p)
    if solver == "shooting":
        if dirichlet:
            raise UnsupportedProblem("shooting computes Robin eigenvalues only")
        return _shooting_piece(piece, alpha, k, p)
    analytic_ok = isinstance(piece, (Interval, Rectangle, Disk)) and (dirichlet or alpha >= 0.0)
    if solver == "analytic" or (solver == "auto" and analytic_ok):
        if not analytic_ok:
            raise UnsupportedProblem(
                f"no analytic solver for {type(piece).__name__} with alpha={alpha!r}")
        if dirichlet:
            return analytic.closed_form_dirichlet_neumann(piece, "dirichlet", k)
        if isinstance(piece, Interval):
            return analytic.interval_spectrum(piece.L, alpha, k)
        if isinstance(piece, Rectangle):
            return analytic.rectangle_spectrum(piece.a, piece.b, alpha, k)
        return analytic.disk_spectrum(piece.R, alpha, k)
    if solver == "auto" and isinstance(piece, Ball):
        if dirichlet:
            raise UnsupportedProblem("Dirichlet eigenvalues of N-balls with N >= 3 are not supported")
        return _shooting_piece(piece, alpha, k, p)
    return fem_piece_spectrum(piece, alpha, k, refine, richardson, dirichlet, tol)


def robin_spectrum(domain, alpha: float, k: int, p: float = 2.0, solver: str = "auto", refine: int = 1,
                   richardson: bool = True, tol: float = fem.DEFAULT_TOL) -> Spectrum:
    """First ``k`` Robin eigenvalues of ``domain`` (alpha = 0 gives Neumann)."""
    return _spectrum(domain, float(alpha), k, float(p), solver, refine, richardson, False, tol)


def dirichlet_spectrum(domain, k: int, solver: str = "auto", refine: int = 1,
                       richardson: bool = True, tol: float = fem.DEFAULT_TOL) -> Spectrum:
    """First ``k`` Dirichlet eigenvalues of ``domain`` (p = 2)."""
    return _spectrum(domain, math.inf, k, 2.0, solver, refine, richardson, True, tol)


def _spectrum(domain, alpha, k, p, solver, refine, richardson, dirichlet, tol):
    if int(k) != k or k < 1:
        raise ValueError(f"k must be a positive integer, got {k!r}")
    k = int(k)
    pieces = components(domain)
    memo: dict = {}
    parts = []
    for piece in pieces:
        key = ("mesh", id(piece.mesh)) if isinstance(piece, MeshDomain) else canonical_form(piece, 15)
        if key not in memo:
            memo[key] = piece_spectrum(piece, alpha, k, p, solver, refine, richardson, dirichlet, tol)
        parts.append(memo[key])
    return merge_spectra(parts, k)


def lambda_k(domain, alpha: float, k: int, **kw) -> tuple:
    """(value, error estimate) of the k-th Robin eigenvalue."""
    spec = robin_spectrum(domain, alpha, k, **kw)
    e = spec.entry_at(k)
    return e.value, e.err


def mu_k(domain, k: int, **kw) -> tuple:
    spec = dirichlet_spectrum(domain, k, **kw)
    e = spec.entry_at(k)
    return e.value, e.err


def ball_lambda1_by_volume(N: int, vol: float, alpha: float, p: float = 2.0, solver: str = "auto") -> tuple:
    """(lambda_1, error) of the N-ball with volume ``vol``."""
    return lambda_k(make_ball(N, vol), alpha, 1, p=p, solver=solver)


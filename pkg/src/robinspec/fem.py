"""P1 finite elements for Robin, Neumann and Dirichlet Laplacian eigenvalues.

The discrete problem is the symmetric pencil ``(K + alpha B) v = lam M v``
with exact element integrals: ``K`` the stiffness matrix, ``M`` the mass
matrix and ``B`` the boundary mass matrix (alpha factored out).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.sparse.linalg import eigsh

from .spectrum import SolverError, Spectrum, group_values

DENSE_MAX_NODES = 600
DEFAULT_TOL = 1e-8


class MeshError(ValueError):
    pass


@dataclass
class Mesh:
    """Triangulated planar domain.

    ``circle`` is ``(cx, cy, R)`` when the boundary approximates a circle;
    refinement then moves new boundary nodes onto it.
    """

    nodes: np.ndarray
    triangles: np.ndarray
    boundary_edges: np.ndarray
    circle: tuple | None = None

    def __post_init__(self):
        self.nodes = np.ascontiguousarray(self.nodes, dtype=float).reshape(-1, 2)
        self.triangles = np.ascontiguousarray(self.triangles, dtype=np.int64).reshape(-1, 3)
        self.boundary_edges = np.ascontiguousarray(self.boundary_edges, dtype=np.int64).reshape(-1, 2)

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    def signed_areas(self) -> np.ndarray:
        p = self.nodes[self.triangles]
        d1, d2 = p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]
        return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])

    def area(self) -> float:
        return float(math.fsum(self.signed_areas()))

    def boundary_length(self) -> float:
        e = self.nodes[self.boundary_edges]
        return float(math.fsum(np.hypot(*(e[:, 1] - e[:, 0]).T)))

    def boundary_nodes(self) -> np.ndarray:
        return np.unique(self.boundary_edges)

    def scaled(self, t: float) -> "Mesh":
        circle = None
        if self.circle is not None:
            cx, cy, R = self.circle
            circle = (cx * t, cy * t, R * t)
        return Mesh(self.nodes * t, self.triangles.copy(), self.boundary_edges.copy(), circle)

    def validate(self) -> None:
        """Raise MeshError unless indices, orientation and boundary are consistent."""
        n = self.n_nodes
        for name, arr in (("triangles", self.triangles), ("boundary_edges", self.boundary_edges)):
            if arr.size and (arr.min() < 0 or arr.max() >= n):
                raise MeshError(f"{name} reference nodes outside 0..{n - 1}")
        if np.any(self.signed_areas() <= 0.0):
            raise MeshError("triangles must be counterclockwise with positive area")
        count: dict = {}
        for tri in self.triangles:
            for a, b in ((tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])):
                key = (min(a, b), max(a, b))
                count[key] = count.get(key, 0) + 1
        free = {key for key, c in count.items() if c == 1}
        given = {(min(a, b), max(a, b)) for a, b in self.boundary_edges}
        if len(given) != len(self.boundary_edges):
            raise MeshError("duplicate boundary edges")
        if given != free:
            raise MeshError("boundary_edges must list exactly the edges owned by one triangle")
        degree = np.bincount(self.boundary_edges.ravel(), minlength=n)
        if np.any(degree[self.boundary_nodes()] != 2):
            raise MeshError("boundary edges do not form closed loops")


# ---------------------------------------------------------------------------
# generators and refinement
# ---------------------------------------------------------------------------

def _orient(nodes: np.ndarray, tris: np.ndarray) -> np.ndarray:
    p = nodes[tris]
    d1, d2 = p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]
    neg = (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]) < 0
    tris = tris.copy()
    tris[neg] = tris[neg][:, [0, 2, 1]]
    return tris


def generate_rect_mesh(a: float, b: float, nx: int, ny: int) -> Mesh:
    """Crossed-triangle mesh of [0, a] x [0, b]: each cell is cut into 4 by its centre."""
    if nx < 1 or ny < 1:
        raise ValueError("nx, ny must be >= 1")
    xs, ys = np.linspace(0.0, a, nx + 1), np.linspace(0.0, b, ny + 1)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    corners = np.column_stack([X.ravel(), Y.ravel()])
    cx, cy = np.meshgrid(0.5 * (xs[1:] + xs[:-1]), 0.5 * (ys[1:] + ys[:-1]), indexing="ij")
    centres = np.column_stack([cx.ravel(), cy.ravel()])
    nodes = np.vstack([corners, centres])
    nc = len(corners)

    def v(i, j):
        return i * (ny + 1) + j

    tris = []
    for i in range(nx):
        for j in range(ny):
            c = nc + i * ny + j
            sw, se, ne, nw = v(i, j), v(i + 1, j), v(i + 1, j + 1), v(i, j + 1)
            tris += [(sw, se, c), (se, ne, c), (ne, nw, c), (nw, sw, c)]
    edges = [(v(i, 0), v(i + 1, 0)) for i in range(nx)]
    edges += [(v(nx, j), v(nx, j + 1)) for j in range(ny)]
    edges += [(v(i + 1, ny), v(i, ny)) for i in reversed(range(nx))]
    edges += [(v(0, j + 1), v(0, j)) for j in reversed(range(ny))]
    return Mesh(nodes, np.array(tris), np.array(edges))


def generate_disk_mesh(R: float, rings: int, center=(0.0, 0.0)) -> Mesh:
    """Polar mesh of the disk: ring i carries 6 i nodes at radius i R / rings."""
    if rings < 1:
        raise ValueError("rings must be >= 1")
    cx, cy = center
    nodes = [(cx, cy)]
    ring_ids = [[0]]
    ring_ang = [np.zeros(1)]
    for i in range(1, rings + 1):
        n = 6 * i
        ang = 2.0 * np.pi * np.arange(n) / n
        r = R * i / rings
        start = len(nodes)
        nodes += [(cx + r * math.cos(t), cy + r * math.sin(t)) for t in ang]
        ring_ids.append(list(range(start, start + n)))
        ring_ang.append(ang)
    tris = []
    for i in range(1, rings + 1):
        A, B = ring_ids[i - 1], ring_ids[i]
        aa, bb = ring_ang[i - 1], ring_ang[i]
        nA, nB = len(A), len(B)
        if nA == 1:
            tris += [(A[0], B[j], B[(j + 1) % nB]) for j in range(nB)]
            continue
        p = q = 0
        while p < nA or q < nB:
            next_a = aa[p + 1] if p + 1 < nA else 2 * np.pi
            next_b = bb[q + 1] if q + 1 < nB else 2 * np.pi
            if q < nB and (p >= nA or next_b <= next_a):
                tris.append((A[p % nA], B[q], B[(q + 1) % nB]))
                q += 1
            else:
                tris.append((A[p], B[q % nB], A[(p + 1) % nA]))
                p += 1
    nodes = np.array(nodes)
    tris = _orient(nodes, np.array(tris))
    outer = ring_ids[-1]
    edges = np.array([(outer[j], outer[(j + 1) % len(outer)]) for j in range(len(outer))])
    return Mesh(nodes, tris, edges, circle=(cx, cy, float(R)))


def refine(mesh: Mesh) -> Mesh:
    """Uniform midpoint refinement; each triangle becomes four.

    New boundary nodes are projected onto ``mesh.circle`` when it is set.
    """
    nodes = [tuple(p) for p in mesh.nodes]
    mid: dict = {}

    def midpoint(a, b):
        key = (min(a, b), max(a, b))
        if key not in mid:
            mid[key] = len(nodes)
            nodes.append(tuple(0.5 * (mesh.nodes[a] + mesh.nodes[b])))
        return mid[key]

    tris = []
    for a, b, c in mesh.triangles:
        ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
        tris += [(a, ab, ca), (ab, b, bc), (ca, bc, c), (ab, bc, ca)]
    edges = []
    for a, b in mesh.boundary_edges:
        m = midpoint(a, b)
        edges += [(a, m), (m, b)]
    nodes = np.array(nodes)
    if mesh.circle is not None:
        cx, cy, R = mesh.circle
        bmid = np.array([mid[(min(a, b), max(a, b))] for a, b in mesh.boundary_edges])
        d = nodes[bmid] - (cx, cy)
        nodes[bmid] = (cx, cy) + d * (R / np.hypot(d[:, 0], d[:, 1]))[:, None]
    return Mesh(nodes, np.array(tris), np.array(edges), mesh.circle)


def refine_times(mesh: Mesh, times: int) -> Mesh:
    for _ in range(times):
        mesh = refine(mesh)
    return mesh


# ---------------------------------------------------------------------------
# assembly
# ---------------------------------------------------------------------------

@dataclass
class FemPencil:
    K: sp.csr_matrix
    M: sp.csr_matrix
    B: sp.csr_matrix
    mesh: Mesh = field(repr=False, default=None)

    def operator(self, alpha: float) -> sp.csr_matrix:
        return (self.K + alpha * self.B).tocsr()


_MASS_REF = np.array([[2.0, 1.0, 1.0], [1.0, 2.0, 1.0], [1.0, 1.0, 2.0]]) / 12.0
_EDGE_REF = np.array([[2.0, 1.0], [1.0, 2.0]]) / 6.0


def assemble(mesh: Mesh) -> FemPencil:
    """Stiffness, mass and boundary-mass matrices of the P1 space on ``mesh``."""
    n = mesh.n_nodes
    tri = mesh.triangles
    p = mesh.nodes[tri]
    area = mesh.signed_areas()
    if np.any(area <= 0.0):
        bad = int(np.argmin(area))
        raise MeshError(f"degenerate or clockwise triangle {bad} (area {area[bad]:.3g})")
    # gradients of barycentric coordinates: grad l_i = rot90(e_i) / (2 area)
    e = np.stack([p[:, 2] - p[:, 1], p[:, 0] - p[:, 2], p[:, 1] - p[:, 0]], axis=1)
    g = np.stack([-e[..., 1], e[..., 0]], axis=-1) / (2.0 * area)[:, None, None]
    k_loc = area[:, None, None] * np.einsum("tik,tjk->tij", g, g)
    m_loc = area[:, None, None] * _MASS_REF[None]
    rows = np.repeat(tri, 3, axis=1).ravel()
    cols = np.tile(tri, (1, 3)).ravel()
    K = sp.coo_matrix((k_loc.ravel(), (rows, cols)), shape=(n, n)).tocsr()
    M = sp.coo_matrix((m_loc.ravel(), (rows, cols)), shape=(n, n)).tocsr()
    ed = mesh.boundary_edges
    length = np.hypot(*(mesh.nodes[ed[:, 1]] - mesh.nodes[ed[:, 0]]).T)
    b_loc = length[:, None, None] * _EDGE_REF[None]
    brows = np.repeat(ed, 2, axis=1).ravel()
    bcols = np.tile(ed, (1, 2)).ravel()
    B = sp.coo_matrix((b_loc.ravel(), (brows, bcols)), shape=(n, n)).tocsr()
    return FemPencil(K, M, B, mesh)


# ---------------------------------------------------------------------------
# eigensolvers
# ---------------------------------------------------------------------------

def _lower_bound(A, M, B, alpha) -> float:
    """A shift below every eigenvalue of (K + alpha B, M)."""
    if alpha >= 0.0:
        return -1.0
    # K >= 0, so lam >= alpha * lam_max(B, M)
    top = eigsh(B, k=1, M=M, which="LA", return_eigenvectors=False,
                v0=np.random.default_rng(1).standard_normal(B.shape[0]))[0]
    return alpha * top * 1.05 - 1.0


def solve_pencil(A, M, k: int, tol: float = DEFAULT_TOL, B=None, alpha: float = 0.0):
    """Smallest ``k`` eigenpairs of the symmetric pencil (A, M), ascending.

    Every pair is checked: ||A v - lam M v|| <= tol * max(1, |lam|) * ||M v||.
    """
    n = A.shape[0]
    if not 1 <= k < n:
        raise ValueError(f"k={k} must satisfy 1 <= k < number of unknowns ({n})")
    if n <= DENSE_MAX_NODES:
        vals, vecs = scipy.linalg.eigh(A.toarray(), M.toarray(), subset_by_index=[0, k - 1])
    else:
        sigma = _lower_bound(A, M, B, alpha) if B is not None else -1.0
        v0 = np.random.default_rng(0).standard_normal(n)
        try:
            vals, vecs = eigsh(A.tocsc(), k=k, M=M.tocsc(), sigma=sigma, which="LM", v0=v0)
        except Exception as exc:  # ARPACK signals non-convergence with its own types
            raise SolverError(f"eigensolver failed: {exc}") from exc
        order = np.argsort(vals)
        vals, vecs = vals[order], vecs[:, order]
    for i in range(k):
        v = vecs[:, i]
        Mv = M @ v
        res = np.linalg.norm(A @ v - vals[i] * Mv)
        if res > tol * max(1.0, abs(vals[i])) * np.linalg.norm(Mv):
            raise SolverError(f"eigenpair {i + 1} residual {res:.3e} above tolerance")
    return vals, vecs


def robin_eigenpairs(mesh: Mesh, alpha: float, k: int, tol: float = DEFAULT_TOL, pencil=None):
    pencil = pencil or assemble(mesh)
    return solve_pencil(pencil.operator(alpha), pencil.M, k, tol, B=pencil.B, alpha=alpha)


def robin_eigs(mesh: Mesh, alpha: float, k: int, tol: float = DEFAULT_TOL, pencil=None) -> Spectrum:
    """First ``k`` discrete Robin eigenvalues (any real alpha; alpha = 0 is Neumann)."""
    vals, _ = robin_eigenpairs(mesh, alpha, k, tol, pencil)
    return group_values(vals, "fem-p1", modes=[f"fem#{i + 1}" for i in range(k)], rtol=1e-12)


def dirichlet_eigenpairs(mesh: Mesh, k: int, tol: float = DEFAULT_TOL, pencil=None):
    pencil = pencil or assemble(mesh)
    interior = np.setdiff1d(np.arange(mesh.n_nodes), mesh.boundary_nodes())
    K = pencil.K[interior][:, interior]
    M = pencil.M[interior][:, interior]
    vals, sub = solve_pencil(K, M, k, tol)
    vecs = np.zeros((mesh.n_nodes, k))
    vecs[interior] = sub
    return vals, vecs


def dirichlet_eigs(mesh: Mesh, k: int, tol: float = DEFAULT_TOL, pencil=None) -> Spectrum:
    """First ``k`` discrete Dirichlet eigenvalues (boundary nodes eliminated)."""
    vals, _ = dirichlet_eigenpairs(mesh, k, tol, pencil)
    return group_values(vals, "fem-p1-dirichlet", modes=[f"fem#{i + 1}" for i in range(k)], rtol=1e-12)


def rayleigh_quotient_p2(mesh: Mesh, v, alpha: float, pencil=None) -> float:
    """(v'Kv + alpha v'Bv) / v'Mv for a nodal vector ``v``."""
    pencil = pencil or assemble(mesh)
    v = np.asarray(v, dtype=float)
    den = float(v @ (pencil.M @ v))
    if den == 0.0:
        raise ZeroDivisionError("zero vector has no Rayleigh quotient")
    return float(v @ (pencil.K @ v) + alpha * v @ (pencil.B @ v)) / den


def richardson(coarse, fine, rate: int = 2):
    """Extrapolate values at mesh sizes h and h/2 with convergence order ``rate``."""
    coarse, fine = np.asarray(coarse, dtype=float), np.asarray(fine, dtype=float)
    f = 2.0**rate
    return (f * fine - coarse) / (f - 1.0)


def estimate_error(coarse, fine, rate: int = 2):
    """Richardson estimate of the error left in the extrapolated value."""
    coarse, fine = np.asarray(coarse, dtype=float), np.asarray(fine, dtype=float)
    return np.abs(fine - coarse) / (2.0**rate - 1.0)


# ---------------------------------------------------------------------------
# 1-D P1 on an interval
# ---------------------------------------------------------------------------

def interval_fem_eigs(L: float, alpha: float, k: int, n: int = 256, tol: float = DEFAULT_TOL):
    """First ``k`` P1 Robin eigenvalues on [0, L] with ``n`` uniform elements."""
    h = L / n
    main = np.full(n + 1, 2.0 / h)
    main[[0, -1]] = 1.0 / h
    K = sp.diags([np.full(n, -1.0 / h), main, np.full(n, -1.0 / h)], [-1, 0, 1])
    mm = np.full(n + 1, 4.0 * h / 6.0)
    mm[[0, -1]] = 2.0 * h / 6.0
    M = sp.diags([np.full(n, h / 6.0), mm, np.full(n, h / 6.0)], [-1, 0, 1])
    Bd = np.zeros(n + 1)
    Bd[[0, -1]] = 1.0
    B = sp.diags(Bd)
    A = (K + alpha * B).tocsr()
    vals, _ = solve_pencil(A, M.tocsr(), k, tol, B=B.tocsr(), alpha=alpha)
    return vals


# ---------------------------------------------------------------------------
# file format
# ---------------------------------------------------------------------------

def mesh_to_dict(mesh: Mesh) -> dict:
    return {
        "nodes": mesh.nodes.tolist(),
        "triangles": mesh.triangles.tolist(),
        "boundary_edges": mesh.boundary_edges.tolist(),
    }


def save_mesh(mesh: Mesh, path) -> None:
    Path(path).write_text(json.dumps(mesh_to_dict(mesh)), encoding="utf-8")


def load_mesh(path) -> Mesh:
    """Read a JSON mesh document with ``nodes``, ``triangles`` and ``boundary_edges``."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    mesh = Mesh(np.array(data["nodes"], dtype=float), np.array(data["triangles"], dtype=np.int64),
                np.array(data["boundary_edges"], dtype=np.int64))
    mesh.validate()
    return mesh

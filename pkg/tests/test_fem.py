import math

import numpy as np
import pytest

from robinspec import analytic, fem
from robinspec.bessel import bessel_zeros
from robinspec.domain import MeshDomain, parse_domain
from robinspec.solve import robin_spectrum

PI = math.pi


def square(n=8):
    return fem.generate_rect_mesh(1.0, 1.0, n, n)


def test_generators():
    m = fem.generate_rect_mesh(1, 1, 1, 1)
    assert len(m.triangles) == 4 and m.n_nodes == 5
    d = fem.generate_disk_mesh(1.0, 1)
    assert np.all(np.any(d.triangles == 0, axis=1))  # a fan around the centre
    r = fem.generate_rect_mesh(2, 1, 20, 10)
    assert r.area() == pytest.approx(2.0, abs=1e-12)
    for mesh in (m, d, r, fem.generate_disk_mesh(2.0, 5)):
        mesh.validate()
    disk = fem.generate_disk_mesh(1.5, 4)
    b = disk.nodes[disk.boundary_nodes()]
    assert np.allclose(np.hypot(*b.T), 1.5)


def test_right_triangle_stiffness():
    mesh = fem.Mesh([[0, 0], [1, 0], [0, 1]], [[0, 1, 2]], [[0, 1], [1, 2], [2, 0]])
    K = fem.assemble(mesh).K.toarray()
    assert K[0, 0] == pytest.approx(1.0)
    assert K[1, 1] == pytest.approx(0.5)


@pytest.mark.parametrize("mesh", [square(5), fem.generate_disk_mesh(1.0, 4), fem.generate_rect_mesh(2, 0.5, 8, 2)])
def test_pencil_invariants(mesh):
    pen = fem.assemble(mesh)
    one = np.ones(mesh.n_nodes)
    assert np.max(np.abs(pen.K @ one)) < 1e-12
    assert pen.M.sum() == pytest.approx(mesh.area(), rel=1e-13)
    assert pen.B.sum() == pytest.approx(mesh.boundary_length(), rel=1e-13)
    for A in (pen.K, pen.M, pen.B):
        assert abs(A - A.T).max() < 1e-14
    assert np.linalg.eigvalsh(pen.M.toarray()).min() > 0


def test_degenerate_triangle():
    mesh = fem.Mesh([[0, 0], [1, 0], [2, 0]], [[0, 1, 2]], [[0, 1], [1, 2], [2, 0]])
    with pytest.raises(fem.MeshError):
        fem.assemble(mesh)


def test_robin_examples():
    mesh = square()
    vals, vecs = fem.robin_eigenpairs(mesh, 0.0, 1)
    assert abs(vals[0]) < 1e-10
    v = vecs[:, 0]
    assert np.allclose(v / v[0], 1.0)
    ref = analytic.rectangle_spectrum(1, 1, 1.0, 6).values()
    got = robin_spectrum(parse_domain("rect:a=1,b=1"), 1.0, 6, solver="fem", refine=2).values()
    assert np.max(np.abs(got - ref) / ref) < 5e-3
    ref = analytic.disk_spectrum(1, 1.0, 1)[1]
    assert robin_spectrum(parse_domain("disk:R=1"), 1.0, 1, solver="fem")[1] == pytest.approx(ref, rel=5e-3)


def test_dirichlet_examples():
    assert fem.dirichlet_eigs(fem.refine(square()), 1)[1] == pytest.approx(2 * PI**2, rel=1e-2)
    disk = fem.refine_times(fem.generate_disk_mesh(1.0, 4), 2)
    assert fem.dirichlet_eigs(disk, 1)[1] == pytest.approx(bessel_zeros(0, 1)[0] ** 2, rel=1e-2)
    thin = fem.dirichlet_eigs(fem.generate_rect_mesh(PI, 0.1 * PI, 40, 4), 1)[1]
    fat = fem.dirichlet_eigs(fem.generate_rect_mesh(PI, PI, 8, 8), 1)[1]
    assert thin > fat


def test_rayleigh_quotient():
    mesh = square()
    pen = fem.assemble(mesh)
    vals, vecs = fem.robin_eigenpairs(mesh, 2.0, 3, pencil=pen)
    for i in range(3):
        assert fem.rayleigh_quotient_p2(mesh, vecs[:, i], 2.0, pen) == pytest.approx(vals[i], rel=1e-8)
    one = np.ones(mesh.n_nodes)
    assert fem.rayleigh_quotient_p2(mesh, one, 0.0, pen) == pytest.approx(0.0, abs=1e-14)
    assert fem.rayleigh_quotient_p2(mesh, one, 3.0, pen) == pytest.approx(3.0 * 4.0 / 1.0)
    with pytest.raises(ZeroDivisionError):
        fem.rayleigh_quotient_p2(mesh, np.zeros(mesh.n_nodes), 1.0, pen)


def test_refine_and_richardson():
    assert len(fem.refine(fem.generate_rect_mesh(1, 1, 1, 1)).triangles) == 16
    c = fem.robin_eigs(square(4), 0.0, 2)[2]
    f = fem.robin_eigs(fem.refine(square(4)), 0.0, 2)[2]
    ext = fem.richardson(c, f)
    assert abs(ext - PI**2) < min(abs(c - PI**2), abs(f - PI**2))
    assert fem.estimate_error(c, f) == pytest.approx(abs(f - c) / 3)
    disk = fem.refine(fem.generate_disk_mesh(1.0, 3))
    b = disk.nodes[disk.boundary_nodes()]
    assert np.allclose(np.hypot(*b.T), 1.0)
    disk.validate()


def test_disk_convergence_rate():
    ref = analytic.disk_spectrum(1, 1.0, 1)[1]
    mesh = fem.generate_disk_mesh(1.0, 4)
    errs = []
    for _ in range(3):
        errs.append(abs(fem.robin_eigs(mesh, 1.0, 1)[1] - ref))
        mesh = fem.refine(mesh)
    ratios = np.array(errs[:-1]) / np.array(errs[1:])
    assert np.all((ratios > 3) & (ratios < 5))


def test_discrete_monotonicity_and_domination():
    mesh = fem.generate_disk_mesh(1.0, 5)
    pen = fem.assemble(mesh)
    mu = fem.dirichlet_eigs(mesh, 5, pencil=pen).values()
    prev = None
    for a in np.concatenate([[-2.0, -0.5], np.geomspace(1e-3, 1e3, 18)]):
        vals = fem.robin_eigs(mesh, a, 5, pencil=pen).values()
        if a >= 0:
            assert np.all(vals < mu)
        if prev is not None:
            assert np.all(vals >= prev - 1e-10)
        prev = vals


def test_large_alpha_drift():
    mesh = fem.generate_disk_mesh(1.0, 6)
    lam = fem.robin_eigs(mesh, 1e6, 1)[1]
    mu = fem.dirichlet_eigs(mesh, 1)[1]
    assert lam == pytest.approx(mu, rel=1e-2)


def test_negative_alpha():
    vals = fem.robin_eigs(fem.generate_disk_mesh(1.0, 5), -1.0, 2).values()
    assert vals[0] < 0


def test_sparse_path_matches_dense():
    mesh = fem.refine_times(fem.generate_disk_mesh(1.0, 4), 2)
    assert mesh.n_nodes > fem.DENSE_MAX_NODES
    pen = fem.assemble(mesh)
    sparse = fem.robin_eigs(mesh, -1.5, 4, pencil=pen).values()
    dense = np.sort(np.linalg.eigvals(np.linalg.solve(pen.M.toarray(), pen.operator(-1.5).toarray())).real)[:4]
    assert np.allclose(sparse, dense, rtol=1e-8)


def test_k_too_large():
    with pytest.raises(ValueError):
        fem.robin_eigs(fem.generate_rect_mesh(1, 1, 1, 1), 0.0, 5)


def test_mesh_file_roundtrip(tmp_path):
    mesh = fem.generate_rect_mesh(1, 2, 3, 4)
    path = tmp_path / "m.json"
    fem.save_mesh(mesh, path)
    dom = parse_domain(f"mesh:{path}")
    assert isinstance(dom, MeshDomain)
    assert dom.mesh.area() == pytest.approx(2.0)
    a = robin_spectrum(dom, 1.0, 3, solver="fem", refine=0, richardson=False).values()
    b = fem.robin_eigs(mesh, 1.0, 3).values()
    assert np.allclose(a, b)


def test_mesh_file_validation(tmp_path):
    bad = {"nodes": [[0, 0], [1, 0], [0, 1]], "triangles": [[0, 2, 1]], "boundary_edges": [[0, 1], [1, 2], [2, 0]]}
    path = tmp_path / "bad.json"
    path.write_text(__import__("json").dumps(bad))
    with pytest.raises(fem.MeshError):
        fem.load_mesh(path)
    bad["triangles"] = [[0, 1, 2]]
    bad["boundary_edges"] = [[0, 1], [1, 2]]
    path.write_text(__import__("json").dumps(bad))
    with pytest.raises(fem.MeshError):
        fem.load_mesh(path)

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hopftori.errors import AtPole, DegenerateCell
from hopftori.meshio import TorusMesh, discrete_curvatures, export, project_mesh, stereographic
from hopftori.report import Report

vec4 = st.lists(st.floats(-1, 1), min_size=4, max_size=4).filter(lambda v: np.linalg.norm(v) > 0.1)


def clifford(n=64):
    u = np.arange(n) * (2 * math.pi / n)
    U, V = np.meshgrid(u, u, indexing="ij")
    y = np.stack([np.cos(U), np.sin(U), np.cos(V), np.sin(V)], -1) / math.sqrt(2)
    L = 2 * math.pi / math.sqrt(2)
    return TorusMesh(y, L, L, radius=1.0)


def revolution_torus(n, R=2.0, r=0.7):
    u = np.arange(n) * (2 * math.pi / n)
    U, V = np.meshgrid(u, u, indexing="ij")
    y = np.stack([(R + r * np.cos(V)) * np.cos(U), (R + r * np.cos(V)) * np.sin(U), r * np.sin(V)], -1)
    return TorusMesh(y, 2 * math.pi, 2 * math.pi), (U, V, R, r)


def sphere_strip(n_s=64, n_t=128, R=0.5, theta0=0.3):
    th = np.linspace(theta0, math.pi - theta0, n_s)
    ph = np.arange(n_t) * (2 * math.pi / n_t)
    T, P = np.meshgrid(th, ph, indexing="ij")
    y = R * np.stack([np.sin(T) * np.cos(P), np.sin(T) * np.sin(P), np.cos(T)], -1)
    return TorusMesh(y, R * (math.pi - 2 * theta0), 2 * math.pi, s_closed=False)


@given(v=vec4)
def test_stereographic_antipode_and_equator(v):
    north = np.array([0.0, 0.0, 0.0, 1.0])
    assert np.allclose(stereographic(-north, radius=1.0), 0.0)
    p = np.asarray(v, dtype=float)
    p[3] = 0.0
    if np.linalg.norm(p) < 0.1:
        return
    p /= np.linalg.norm(p)
    assert np.allclose(stereographic(p, radius=1.0), p[:3], atol=1e-14)


@given(v=vec4)
def test_stereographic_is_conformal(v):
    p = np.asarray(v) / np.linalg.norm(v)
    if p[3] > 0.9:
        return
    # two orthonormal tangent vectors at p
    basis = np.linalg.svd(p[None, :])[2][1:3]
    h = 1e-6
    images = []
    for e in basis:
        a = stereographic(np.cos(h) * p + np.sin(h) * e, radius=1.0)
        b = stereographic(np.cos(h) * p - np.sin(h) * e, radius=1.0)
        images.append((a - b) / (2 * h))
    n1, n2 = (np.linalg.norm(x) for x in images)
    assert n1 == pytest.approx(n2, rel=1e-6)
    assert abs(images[0] @ images[1]) <= 1e-6 * n1 * n2


def test_stereographic_refuses_the_pole():
    with pytest.raises(AtPole):
        stereographic(np.array([0.0, 0.0, 0.0, 1.0]), radius=1.0)


def test_clifford_torus_is_minimal_and_flat():
    cv = discrete_curvatures(clifford(), accuracy=4)
    assert np.max(np.abs(cv.H)) <= 1e-12
    assert np.max(np.abs(cv.K_intr)) <= 5e-5


def test_sphere_strip_curvatures():
    cv = discrete_curvatures(sphere_strip(), accuracy=4)
    assert np.max(np.abs(np.abs(cv.H) - 2.0)) <= 1e-5
    assert np.max(np.abs(cv.K_ext - 4.0)) <= 1e-4


def _torus_errors(n, accuracy):
    mesh, (U, V, R, r) = revolution_torus(n)
    cv = discrete_curvatures(mesh, accuracy=accuracy)
    K = np.cos(V) / (r * (R + r * np.cos(V)))
    H = (R + 2 * r * np.cos(V)) / (2 * r * (R + r * np.cos(V)))
    return np.max(np.abs(np.abs(cv.H) - H)), np.max(np.abs(cv.K_ext - K))


def test_second_order_convergence_on_a_torus_of_revolution():
    h1, k1 = _torus_errors(64, 2)
    h2, k2 = _torus_errors(128, 2)
    assert 3.5 < h1 / h2 < 4.5
    assert 3.5 < k1 / k2 < 4.5


def test_collapsed_row_is_degenerate():
    mesh = sphere_strip(theta0=0.0)
    with pytest.raises(DegenerateCell):
        discrete_curvatures(mesh)
    cv = discrete_curvatures(mesh, allow_degenerate=True)
    assert np.isnan(cv.H[0]).all()


def test_projected_torus_has_euler_characteristic_zero():
    pm = project_mesh(clifford(16))
    assert pm.euler_characteristic() == 0
    assert pm.faces.shape == (16 * 16, 4)


def test_projection_redraws_pole_deterministically():
    mesh = clifford(32)
    mesh.vertices[0, 0] = [0.0, 0.0, 0.0, 1.0]
    a = project_mesh(mesh, seed=3)
    b = project_mesh(mesh, seed=3)
    assert not np.allclose(a.pole, [0, 0, 0, 1])
    assert np.array_equal(a.vertices, b.vertices)


def test_obj_export_counts_and_determinism(tmp_path):
    mesh = clifford(8)
    p1 = export(mesh, "obj", tmp_path / "a.obj", header={"note": "x", "h": 0.1})
    p2 = export(mesh, "obj", tmp_path / "b.obj", header={"note": "x", "h": 0.1})
    text = p1.read_text()
    assert text == p2.read_text()
    lines = text.splitlines()
    assert sum(ln.startswith("v ") for ln in lines) == 64
    assert sum(ln.startswith("f ") for ln in lines) == 64
    assert "# h=0.10000000000000001" in lines


def test_columns_and_report_export(tmp_path):
    path = export({"a": [1.0, 2.0], "b": [3.0, 4.0]}, "columns", tmp_path / "c.txt")
    rows = [ln for ln in path.read_text().splitlines() if not ln.startswith("#")]
    assert rows == ["1 3", "2 4"]
    rep = Report("demo")
    rep.add("x", 1e-9, 1e-6, "x = 0")
    assert "x" in export(rep, "report", tmp_path / "r.txt").read_text()
    with pytest.raises(ValueError):
        export(rep, "png", tmp_path / "r.png")


def test_export_error_names_the_path(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    with pytest.raises(OSError, match="file"):
        export({"a": [1.0]}, "columns", blocker / "sub" / "x.txt")

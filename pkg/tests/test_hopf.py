import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.spatial.transform import Rotation

from hopftori.curves import reconstruct
from hopftori.energy import EnergySpec
from hopftori.errors import NotClosedLift, OffSphere, ParameterError
from hopftori.hopf import hopf_project, hopf_torus, horizontal_lift, verify_vertical_geometry
from hopftori.profiles import blaschke_profile, constant_profile

unit4 = st.lists(st.floats(-1, 1), min_size=4, max_size=4).filter(lambda v: np.linalg.norm(v) > 0.1)


@given(v=unit4, t=st.floats(0, 2 * math.pi))
def test_projection_lands_on_small_sphere_and_ignores_fiber_phase(v, t):
    p = np.asarray(v) / np.linalg.norm(v)
    z, w = complex(p[0], p[1]), complex(p[2], p[3])
    e = complex(math.cos(t), math.sin(t))
    q = np.array([(e * z).real, (e * z).imag, (e * w).real, (e * w).imag])
    a, b = hopf_project(p), hopf_project(q)
    assert np.linalg.norm(a) == pytest.approx(0.5, abs=1e-12)
    assert np.allclose(a, b, atol=1e-12)


def test_projection_rejects_points_off_sphere():
    with pytest.raises(OffSphere):
        hopf_project(np.array([1.0, 1.0, 0.0, 0.0]))


def _equator():
    return reconstruct(constant_profile(EnergySpec.bending(0.0), 4.0, 0.0, n_samples=256))


def test_equator_lift_has_half_turn_holonomy():
    lift = horizontal_lift(_equator())
    assert abs(abs(lift.holonomy_per_cover) - math.pi) <= 1e-10
    assert lift.m_cover == 2


def test_lift_projects_back_and_is_horizontal(g32):
    _, _, curve = g32
    lift = horizontal_lift(curve)
    assert np.max(np.abs(hopf_project(lift.lift_points) - curve.points)) <= 1e-12
    assert lift.horizontality() <= 1e-12
    assert np.max(np.abs(np.linalg.norm(lift.tangents, axis=1) - 1.0)) <= 1e-10


def test_lift_through_pre_rotation_projects_back():
    prof = blaschke_profile(4.0, 0.0, 2.0, n_samples=256)
    # start the curve at the chart boundary A1 = -1/2
    start = np.array([[-1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0]])
    curve = reconstruct(prof, start=start)
    lift = horizontal_lift(curve)
    assert not np.allclose(lift.pre_rotation, np.eye(3))
    assert np.max(np.abs(hopf_project(lift.lift_points) - curve.points)) <= 1e-12
    assert lift.horizontality() <= 1e-12


@given(angles=st.tuples(st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3)))
def test_closed_curve_holonomy_is_rotation_invariant(g32, angles):
    _, prof, curve = g32
    R = Rotation.from_euler("xyz", angles).as_matrix()
    moved = reconstruct(prof, m_periods=curve.m, start=R.T)
    a = horizontal_lift(curve).holonomy_per_cover
    b = horizontal_lift(moved).holonomy_per_cover
    assert abs(math.remainder(a - b, 2 * math.pi)) <= 1e-9


def test_lift_needs_the_right_sphere():
    curve = reconstruct(constant_profile(EnergySpec.bending(0.0), 1.0, 0.0))
    with pytest.raises(ParameterError):
        horizontal_lift(curve)


def test_strict_torus_refuses_open_lift():
    lift = horizontal_lift(_equator())
    with pytest.raises(NotClosedLift):
        hopf_torus(lift, m_covers=1, strict=True)
    assert hopf_torus(lift, m_covers=1).seam is not None
    assert hopf_torus(lift).seam is None


def test_vertical_torus_is_flat_with_half_curvature_mean(g32):
    _, prof, curve = g32
    mesh = hopf_torus(horizontal_lift(curve), m_covers=1, n_t=64)
    rep, H, K = verify_vertical_geometry(mesh, prof, tol_H=1e-5, tol_K=1e-5)
    assert rep.passed, rep.to_text()
    assert H.shape == mesh.shape

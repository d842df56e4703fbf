import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.spatial.transform import Rotation

from hopftori.curves import (
    closure_search,
    curve_stats,
    planar_curve,
    polygon_area,
    progression_angle,
    reconstruct,
)
from hopftori.energy import EnergySpec
from hopftori.errors import DegenerateRotation, NotClosed, ParameterError
from hopftori.profiles import blaschke_profile, constant_profile


@given(rho=st.sampled_from([1.0, 4.0, 9.0]), grow=st.floats(1.1, 4.0))
def test_reconstruction_stays_on_sphere_with_orthonormal_frame(rho, grow):
    d = grow * math.sqrt(rho) / 2
    curve = reconstruct(blaschke_profile(rho, 0.0, d, n_samples=256), m_periods=2)
    r = np.linalg.norm(curve.points, axis=1)
    assert np.max(np.abs(r - 1 / math.sqrt(rho))) <= 1e-12
    F = curve.frames
    gram = np.einsum("nij,nkj->nik", F, F)
    assert np.max(np.abs(gram - np.eye(3))) <= 1e-12


def test_reconstruction_has_unit_speed_and_right_curvature():
    prof = blaschke_profile(4.0, 0.3, 3.0, n_samples=1024)
    curve = reconstruct(prof)
    h = curve.total_length / curve.s.size
    x = curve.points
    step = np.linalg.norm(np.diff(x, axis=0), axis=1)
    # chord of a unit-speed curve: h (1 - kg^2 h^2 / 24) with kg^2 = kappa^2 + rho
    assert np.max(np.abs(step / h - 1)) <= 1e-3
    acc = (x[2:] - 2 * x[1:-1] + x[:-2]) / h**2
    kg = np.einsum("ij,ij->i", acc + curve.rho * x[1:-1], curve.N[1:-1])
    assert np.max(np.abs(kg - curve.kappa[1:-1])) <= 1e-3 * np.max(np.abs(curve.kappa))


@given(angles=st.tuples(st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3)))
def test_rotated_start_rotates_the_curve(angles):
    prof = blaschke_profile(4.0, 0.0, 2.0, n_samples=128)
    R = Rotation.from_euler("xyz", angles).as_matrix()
    base = reconstruct(prof)
    moved = reconstruct(prof, start=np.eye(3) @ R.T)
    assert np.max(np.abs(moved.points - base.points @ R.T)) <= 1e-12


def test_progression_angle_of_circle_is_degenerate():
    with pytest.raises(DegenerateRotation):
        progression_angle(constant_profile(EnergySpec.bending(0.0), 4.0, 0.5))


def test_progression_angle_lies_in_open_interval():
    ang, axis = progression_angle(blaschke_profile(4.0, 0.0, 2.0, n_samples=512))
    assert 0 < ang < 2 * math.pi
    assert np.linalg.norm(axis) == pytest.approx(1.0)


def test_closure_search_rejects_non_coprime_pair():
    with pytest.raises(ParameterError):
        closure_search(EnergySpec.extended_blaschke(0.0), 4.0, 4, 2)


def test_closed_curve_statistics(g32):
    d_star, prof, curve = g32
    ang = progression_angle(prof)[0]
    assert ang == pytest.approx(4 * math.pi / 3, abs=1e-10)
    assert curve.closure_gap <= 1e-10
    stats = curve_stats(curve, prof.spec)
    assert stats.area == pytest.approx(stats.polygon_area, rel=1e-6)
    assert stats.area_over_pi == Fraction(1, 4)


def test_open_curve_raises_not_closed():
    curve = reconstruct(blaschke_profile(4.0, 0.0, 2.0, n_samples=128))
    with pytest.raises(NotClosed):
        curve_stats(curve, EnergySpec.extended_blaschke(0.0))


@pytest.mark.parametrize("theta", [0.3, 1.0, math.pi / 2, 2.5])
def test_polygon_area_of_latitude_circle(theta):
    phi = np.linspace(0, 2 * math.pi, 4000, endpoint=False)
    pts = np.stack([math.sin(theta) * np.cos(phi), math.sin(theta) * np.sin(phi), np.full_like(phi, math.cos(theta))], -1)
    area = polygon_area(pts, 1.0, pole=np.array([0.0, 0.0, 1.0]))
    assert area == pytest.approx(2 * math.pi * (1 - math.cos(theta)), rel=1e-5)


def test_planar_curve_of_constant_curvature_is_a_circle():
    prof = constant_profile(EnergySpec.bending(0.0), 0.0, 2.0, n_samples=256, period=math.pi)
    curve = planar_curve(prof)
    centre = curve.points + curve.N / 2.0
    assert np.max(np.abs(centre - centre[0])) <= 1e-12
    assert curve.closure_gap <= 1e-12
    assert np.all(curve.points[:, 2] == 0)


def test_area_fraction_is_exact_rational(g32):
    _, prof, curve = g32
    stats = curve_stats(curve, prof.spec)
    assert isinstance(stats.area_over_pi, Fraction)
    assert abs(stats.area / math.pi - float(stats.area_over_pi)) <= 1e-8

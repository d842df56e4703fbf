import math

import numpy as np
import pytest

from hopftori.curves import planar_curve, reconstruct
from hopftori.energy import EnergyKind, EnergySpec
from hopftori.errors import (
    BranchTooShort,
    CurvatureZeroCrossing,
    IsoparametricInput,
    NonPeriodicOrbit,
    PoorFit,
)
from hopftori.evolution import (
    KillingMotion,
    derived_constant,
    embed_and_fit,
    evolution_report,
    evolve,
    recover_energy,
    surface_curvatures,
    weingarten_residual,
)
from hopftori.meshio import TorusMesh
from hopftori.profiles import constant_profile, solve_profile, total_curvature_profile
from hopftori.verify import CATALOG_CASES


@pytest.fixture(scope="module")
def g32_mesh(g32):
    _, _, curve = g32
    emb, motion = embed_and_fit(curve)
    return evolve(emb, motion, curve, n_t=128)


def test_fit_is_exact_rank_two(g32):
    _, _, curve = g32
    emb, motion = embed_and_fit(curve)
    assert motion.fit_residual <= 1e-12
    assert motion.rates[1] <= 1e-9
    assert np.allclose(motion.generator, -motion.generator.T)
    assert np.allclose(motion.exp([motion.period])[0], np.eye(4), atol=1e-12)
    assert np.allclose(emb[:, 3], 0.0)


def test_fit_rejects_the_wrong_energy(g32):
    _, _, curve = g32
    with pytest.raises(PoorFit):
        embed_and_fit(curve, spec=EnergySpec.bending(0.0))


def test_fit_rejects_constant_curvature():
    curve = reconstruct(constant_profile(EnergySpec.bending(0.0), 4.0, 0.5, n_samples=128))
    with pytest.raises(IsoparametricInput):
        embed_and_fit(curve)


def test_evolution_mesh_invariants(g32_mesh):
    rep = evolution_report(g32_mesh)
    assert rep.passed, rep.to_text()
    assert np.max(np.abs(np.linalg.norm(g32_mesh.vertices, axis=-1) - 0.5)) <= 1e-12


def test_blaschke_evolution_is_minimal(g32_mesh):
    sc = surface_curvatures(g32_mesh, accuracy=4)
    assert np.max(np.abs(sc.H)) <= 1e-10
    assert np.nanmax(np.abs(sc.H_num)) <= 1e-5
    assert sc.report.passed, sc.report.to_text()


@pytest.mark.parametrize("case", CATALOG_CASES, ids=lambda c: c.name)
def test_weingarten_relation_per_family(case):
    prof = case.profile(1024)
    assert weingarten_residual(prof) <= 1e-6
    curve = reconstruct(prof, prof.rho, 1)
    emb, motion = embed_and_fit(curve)
    mesh = evolve(emb, motion, curve, n_t=16)
    sc = surface_curvatures(mesh, numeric=False)
    vals, expected, _ = derived_constant(case.spec, prof.rho, sc.kappa1, sc.kappa2)
    ok = np.isfinite(vals)
    assert np.max(np.abs(vals[ok] - expected)) <= 1e-6 * max(1.0, abs(expected))


def test_quotient_form_refuses_curvature_zero():
    prof = total_curvature_profile(4.0, 3.0, 3.5, n_samples=256)
    curve = reconstruct(prof)
    emb, motion = embed_and_fit(curve)
    mesh = evolve(emb, motion, curve, n_t=16)
    with pytest.raises(CurvatureZeroCrossing):
        surface_curvatures(mesh, numeric=False, form="quotient")
    sc = surface_curvatures(mesh, numeric=False)
    assert np.all(np.isfinite(sc.K))
    assert np.max(np.abs(sc.K - (4.0 - 3.0))) <= 1e-8


def _rotation_generator(w1, w2):
    X = np.zeros((4, 4))
    X[0, 1], X[1, 0] = -w1, w1
    X[2, 3], X[3, 2] = -w2, w2
    return X


def test_incommensurable_rates_have_no_period(g32):
    _, _, curve = g32
    motion = KillingMotion(4.0, _rotation_generator(1.0, math.sqrt(2)), 0.0, (math.sqrt(2), 1.0))
    emb = np.hstack([curve.points, np.zeros((len(curve.s), 1))])
    with pytest.raises(NonPeriodicOrbit):
        evolve(emb, motion, curve, n_t=8)
    mesh = evolve(emb, motion, curve, n_t=8, strict=False)
    assert mesh.t_length == pytest.approx(2 * math.pi / math.sqrt(2))


def test_commensurable_rates_extend_the_period(g32):
    _, _, curve = g32
    motion = KillingMotion(4.0, _rotation_generator(2.0, 1.0), 0.0, (2.0, 1.0))
    emb = np.hstack([curve.points, np.zeros((len(curve.s), 1))])
    mesh = evolve(emb, motion, curve, n_t=8)
    assert mesh.t_length == pytest.approx(2 * math.pi)


def test_screw_motion_has_no_period():
    prof = solve_profile(EnergySpec.bending(1.0), 0.0, 3.0, n_samples=256)
    curve = planar_curve(prof)
    W = np.zeros((3, 3))
    W[0, 1], W[1, 0] = -1.0, 1.0
    motion = KillingMotion(0.0, W, 0.0, (1.0, 0.0), translation=np.array([0.0, 0.0, 1.0]))
    with pytest.raises(NonPeriodicOrbit):
        evolve(curve.points, motion, curve, n_t=8)


def test_planar_elastica_sweeps_rotational_strip():
    prof = solve_profile(EnergySpec.bending(1.0), 0.0, 3.0, n_samples=1024)
    curve = planar_curve(prof)
    emb, motion = embed_and_fit(curve)
    assert motion.translation is not None
    mesh = evolve(emb, motion, curve, n_t=64)
    assert not mesh.s_closed
    assert evolution_report(mesh).passed
    sc = surface_curvatures(mesh, accuracy=4, tol=1e-3)
    assert sc.report.passed, sc.report.to_text()
    with pytest.raises(BranchTooShort):
        recover_energy(mesh)


def test_recovery_of_blaschke(g32_mesh):
    rec = recover_energy(g32_mesh)
    assert rec.spec.kind is EnergyKind.EXTENDED_BLASCHKE
    assert abs(rec.lambda_shift) <= 1e-6
    assert rec.rel_error <= 1e-6


def test_recovery_refuses_isoparametric_mesh():
    n = 64
    u = np.arange(n) * (2 * math.pi / n)
    U, V = np.meshgrid(u, u, indexing="ij")
    y = np.stack([np.cos(U), np.sin(U), np.cos(V), np.sin(V)], -1) / math.sqrt(2)
    L = 2 * math.pi / math.sqrt(2)
    with pytest.raises(IsoparametricInput):
        recover_energy(TorusMesh(y, L, L, radius=1.0))

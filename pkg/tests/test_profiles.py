import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hopftori.energy import EnergySpec
from hopftori.errors import NoOscillation, ParameterError, SingularDenominator
from hopftori.profiles import (
    blaschke_profile,
    constant_profile,
    el_residual,
    first_integral_check,
    solve_profile,
    total_curvature_profile,
)

rhos = st.sampled_from([0.5, 1.0, 4.0, 9.0])


@given(rho=rhos, lam=st.floats(-1.0, 1.0), grow=st.floats(1.05, 5.0))
def test_blaschke_closed_form_conserves_first_integral(rho, lam, grow):
    d_low = (-lam + math.sqrt(rho + lam * lam)) / 2
    d = d_low * grow
    if 4 * d * d + 4 * lam * d - rho < 0:
        return
    prof = blaschke_profile(rho, lam, d, n_samples=512)
    d_est, dev = first_integral_check(prof)
    assert abs(d_est - d) <= 1e-10 * max(1.0, d)
    assert dev <= 1e-10 * max(1.0, d)
    scale = max(1.0, float(np.max(np.abs(prof.kappa))) ** 2)
    assert el_residual(prof) <= 1e-9 * scale
    assert prof.period == pytest.approx(math.pi / math.sqrt(rho + lam * lam), rel=1e-14)


@given(rho=rhos, lam_frac=st.floats(0.05, 0.95), d_frac=st.floats(0.05, 0.95))
def test_total_curvature_closed_form_conserves_first_integral(rho, lam_frac, d_frac):
    lam = lam_frac * rho
    d = lam + d_frac * (rho - lam)
    prof = total_curvature_profile(rho, lam, d, n_samples=512)
    d_est, dev = first_integral_check(prof)
    assert abs(d_est - d) <= 1e-10 * max(1.0, d)
    assert dev <= 1e-9 * max(1.0, d)
    assert el_residual(prof) <= 1e-8
    assert prof.period == pytest.approx(2 * math.pi / math.sqrt(rho - lam), rel=1e-14)


def test_blaschke_minimum_sits_at_recorded_arc_length():
    prof = blaschke_profile(4.0, 0.3, 3.0, n_samples=1024)
    k_min = prof.kappa_at(prof.s_min)
    assert k_min == pytest.approx(prof.kappa.min(), rel=1e-6)


def test_blaschke_parameter_errors():
    with pytest.raises(ParameterError):
        blaschke_profile(0.0, 0.0, 2.0)
    with pytest.raises(ParameterError):
        blaschke_profile(4.0, 0.0, 1.0)  # d at the lower bound
    with pytest.raises(ParameterError):
        blaschke_profile(4.0, 0.0, 0.1)


def test_blaschke_lower_bound_gives_constant_when_allowed():
    prof = blaschke_profile(4.0, 0.0, 1.0, allow_constant=True)
    assert prof.constant
    assert np.ptp(prof.kappa) == 0.0


def test_total_curvature_errors():
    with pytest.raises(SingularDenominator):
        total_curvature_profile(4.0, 1.0, 4.5)
    with pytest.raises(ParameterError):
        total_curvature_profile(4.0, 5.0, 4.5)
    with pytest.raises(ParameterError):
        total_curvature_profile(4.0, 1.0, 1.0)
    with pytest.raises(ParameterError):
        total_curvature_profile(4.0, 1.0, 0.5)


@pytest.mark.parametrize(
    "rho,lam,d",
    [(4.0, 0.3, 3.0), (1.0, -0.5, 1.2), (9.0, 0.0, 4.0)],
)
def test_solver_matches_blaschke_closed_form(rho, lam, d):
    exact = blaschke_profile(rho, lam, d, n_samples=256)
    num = solve_profile(EnergySpec.extended_blaschke(lam), rho, d, n_samples=256)
    assert num.period == pytest.approx(exact.period, rel=1e-9)
    shifted = exact.kappa_at(num.s + exact.s_min)
    assert np.max(np.abs(num.kappa - shifted)) <= 1e-8 * max(1.0, exact.kappa.max())


def test_solver_matches_total_curvature_period():
    exact = total_curvature_profile(4.0, 3.0, 3.5, n_samples=256)
    num = solve_profile(EnergySpec.total_curvature(3.0, 1), 4.0, 3.5, n_samples=256)
    assert num.period == pytest.approx(exact.period, rel=1e-9)
    assert num.kappa.min() == pytest.approx(exact.kappa.min(), rel=1e-9)


def test_solver_profile_is_even_about_minimum():
    prof = solve_profile(EnergySpec.exponential(0.1), 4.0, 0.3689, n_samples=512)
    k = prof.kappa
    assert np.max(np.abs(k[1:] - k[1:][::-1])) <= 1e-10
    assert np.argmin(k) == 0
    d_est, dev = first_integral_check(prof)
    assert dev <= 1e-9


def test_solver_rejects_energy_below_every_well():
    with pytest.raises(NoOscillation):
        solve_profile(EnergySpec.extended_blaschke(0.0), 4.0, 0.4)


def test_constant_profile_closes_as_circle():
    prof = constant_profile(EnergySpec.bending(0.0), 4.0, 0.0, n_samples=64)
    assert prof.constant
    assert prof.period == pytest.approx(math.pi)
    assert el_residual(prof) == 0.0
    with pytest.raises(ParameterError):
        constant_profile(EnergySpec.bending(0.0), 0.0, 0.0)


def test_resample_keeps_the_function():
    prof = blaschke_profile(4.0, 0.0, 2.0, n_samples=64)
    fine = prof.resample(256)
    assert fine.n_samples == 256
    assert np.allclose(fine.kappa[::4], prof.kappa, rtol=0, atol=1e-14)


def test_text_export_header_and_rows():
    prof = blaschke_profile(4.0, 0.0, 2.0, n_samples=32)
    lines = prof.to_text().splitlines()
    heads = [ln for ln in lines if ln.startswith("#")]
    assert any(h.startswith("# kind=") for h in heads)
    assert "# columns: s kappa kappa_s" in heads
    rows = np.array([list(map(float, ln.split())) for ln in lines if not ln.startswith("#")])
    assert rows.shape == (32, 3)
    assert np.array_equal(rows[:, 1], prof.kappa)

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hopftori.energy import (
    EnergyKind,
    EnergySpec,
    WeingartenRelation,
    energy_from_weingarten,
    relation_of,
    weingarten_of,
)
from hopftori.errors import DomainError, ParameterError, UnsupportedRelation

lams = st.floats(-2.0, 2.0).filter(lambda x: abs(x) > 0.05)


def _specs():
    return st.one_of(
        lams.map(EnergySpec.bending),
        lams.map(EnergySpec.extended_blaschke),
        lams.filter(lambda x: x > 0).map(EnergySpec.total_curvature),
        lams.map(EnergySpec.astigmatism),
        lams.map(EnergySpec.exponential),
        st.tuples(lams, st.sampled_from([-1.5, 1 / 3, 0.75, 2.5])).map(lambda t: EnergySpec.q_elastic(*t)),
    )


def _point_in_domain(spec, u):
    lo, hi = spec.kappa_domain[-1]
    lo = max(lo, 0.05) if spec.kind is EnergyKind.ASTIGMATISM else lo
    lo = -3.0 if lo == -math.inf else lo
    hi = lo + 4.0 if hi == math.inf else hi
    return lo + (0.1 + 0.8 * u) * (hi - lo)


@given(_specs(), st.floats(0.0, 1.0))
def test_derivatives_match_finite_differences(spec, u):
    k = _point_in_domain(spec, u)
    h = 1e-5 * max(1.0, abs(k))
    P, dP, ddP, dddP = spec.derivatives(np.array([k - h, k, k + h]))
    assert dP[1] == pytest.approx((P[2] - P[0]) / (2 * h), rel=1e-5, abs=1e-7)
    assert ddP[1] == pytest.approx((dP[2] - dP[0]) / (2 * h), rel=1e-5, abs=1e-7)
    assert dddP[1] == pytest.approx((ddP[2] - ddP[0]) / (2 * h), rel=1e-4, abs=1e-6)


@given(_specs(), st.floats(0.0, 1.0), st.floats(0.1, 10.0))
def test_ratio_is_scale_free_and_matches_quotient(spec, u, mu):
    k = _point_in_domain(spec, u)
    P, dP = spec.scaled(mu).derivatives(k)[:2]
    if abs(dP) > 1e-8:
        assert spec.ratio(k) == pytest.approx(P / dP, rel=1e-10)


@given(_specs())
def test_text_round_trip(spec):
    assert EnergySpec.from_text(spec.to_text()) == spec


@given(_specs(), st.floats(0.0, 1.0))
def test_weingarten_residual_vanishes_on_locus(spec, u):
    k = _point_in_domain(spec, u)
    if abs(spec.derivatives(k)[1]) < 1e-8:
        return
    k1, k2 = -k, spec.ratio(k) - k
    assert abs(weingarten_of(spec)(k1, k2)) < 1e-9
    rel = relation_of(spec, 4.0)
    if rel is not None:
        assert abs(rel.residual(k1, k2)) < 1e-8 * max(1.0, abs(k2))


@given(_specs())
def test_weingarten_inverse_recovers_spec(spec):
    rel = relation_of(spec, rho=4.0)
    if rel is None:
        return
    back = energy_from_weingarten(rel, epsilon=spec.epsilon)
    assert back.kind == spec.kind or {back.kind, spec.kind} == {EnergyKind.Q_ELASTIC, EnergyKind.EXTENDED_BLASCHKE}
    assert back.lam == pytest.approx(spec.lam, rel=1e-12, abs=1e-12)


def test_linear_relation_inverse_parameters():
    # k1 = a k2 + b  <->  q = a/(a-1), lam = b/(a-1)
    spec = energy_from_weingarten(WeingartenRelation.linear(3.0, 1.0))
    assert spec.kind is EnergyKind.Q_ELASTIC
    assert spec.q == pytest.approx(1.5)
    assert spec.lam == pytest.approx(0.5)
    assert energy_from_weingarten(WeingartenRelation.linear(-1.0, 0.4)) == EnergySpec.extended_blaschke(-0.2)


def test_constant_skew_gives_exponential():
    spec = energy_from_weingarten(WeingartenRelation.constant_skew(-4.0))
    assert spec == EnergySpec.exponential(0.25)
    assert relation_of(spec).b == pytest.approx(-4.0)


def test_astigmatism_and_gauss_relations():
    assert energy_from_weingarten(WeingartenRelation.constant_astigmatism(2.0)) == EnergySpec.astigmatism(0.5)
    spec = energy_from_weingarten(WeingartenRelation.constant_gauss(1.0, 4.0))
    assert spec == EnergySpec.total_curvature(3.0, 1)
    neg = energy_from_weingarten(WeingartenRelation.constant_gauss(5.0, 4.0))
    assert neg.epsilon == -1 and neg.lam == -1.0


def test_unsupported_relations():
    with pytest.raises(UnsupportedRelation):
        energy_from_weingarten(WeingartenRelation.linear(1.0, 0.0))
    with pytest.raises(UnsupportedRelation):
        energy_from_weingarten(WeingartenRelation.constant_gauss(4.0, 4.0))
    with pytest.raises(ParameterError):
        WeingartenRelation.linear(0.0, 1.0)


def test_domain_errors():
    with pytest.raises(DomainError):
        EnergySpec.extended_blaschke(1.0).derivatives(0.5)
    with pytest.raises(DomainError):
        EnergySpec.astigmatism(1.0).derivatives(-1.0)
    with pytest.raises(ParameterError):
        EnergySpec.q_elastic(0.0, 1.0)
    with pytest.raises(ParameterError):
        EnergySpec.total_curvature(1.0, epsilon=-1)
    with pytest.raises(ParameterError):
        EnergySpec.exponential(0.0)


def test_total_curvature_domains():
    assert EnergySpec.total_curvature(-1.0, 1).kappa_domain == ((-math.inf, -1.0), (1.0, math.inf))
    assert EnergySpec.total_curvature(-4.0, -1).kappa_domain == ((-2.0, 2.0),)
    assert EnergySpec.total_curvature(2.0).in_domain([-5.0, 0.0, 5.0]).all()


def test_kappa_ratio_is_finite_at_zero():
    spec = EnergySpec.total_curvature(3.0)
    assert spec.kappa_ratio(np.array([0.0]))[0] == pytest.approx(3.0)
    assert EnergySpec.bending(1.0).kappa_ratio(0.0) == pytest.approx(0.5)

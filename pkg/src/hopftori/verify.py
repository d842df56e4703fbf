"""Acceptance checks shared by the test-suite and the ``verify`` command.

Each ``check_*`` function builds its inputs from scratch, runs one group of
identities and returns a :class:`Report`.  Reports contain no timings, so
repeated runs produce identical text.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .bcv import bcv_vertical_check, circle_cylinder
from .curves import SphereCurve, closure_search, curve_stats, progression_angle, reconstruct
from .energy import EnergySpec
from .errors import PoorFit
from .evolution import (
    derived_constant,
    embed_and_fit,
    evolution_report,
    evolve,
    recover_energy,
    surface_curvatures,
    weingarten_residual,
)
from .hopf import horizontal_lift, hopf_torus, verify_vertical_geometry
from .profiles import (
    CurvatureProfile,
    blaschke_profile,
    constant_profile,
    el_residual,
    first_integral_check,
    solve_profile,
    total_curvature_profile,
)
from .report import Report

__all__ = [
    "CatalogCase",
    "CATALOG_CASES",
    "closed_form_grid",
    "gamma32",
    "check_closed_forms",
    "check_solver_agreement",
    "check_gamma32",
    "check_vertical_torus",
    "check_minimal_torus",
    "check_weingarten_table",
    "check_round_trip",
    "check_bcv",
    "CHECKS",
    "run_all",
]


# ---------------------------------------------------------------------------------------
# shared inputs
# ---------------------------------------------------------------------------------------


def closed_form_grid():
    """``(rho, lam, d)`` triples covering both closed-form families.

    For each ``rho`` in ``{1, 4, 9}`` there are three ``lam`` values and three
    ``d`` values per family, all inside the admissible region.
    """
    blaschke, total = [], []
    for rho in (1.0, 4.0, 9.0):
        for lam in (-0.5, 0.0, 0.5):
            d_low = (-lam + math.sqrt(rho + lam * lam)) / 2
            for f in (1.25, 2.0, 4.0):
                blaschke.append((rho, lam, f * d_low))
        for fl in (0.2, 0.5, 0.75):
            lam = fl * rho
            for fd in (0.25, 0.5, 0.75):
                total.append((rho, lam, lam + fd * (rho - lam)))
    return blaschke, total


@lru_cache(maxsize=4)
def gamma32(n_samples: int = 2048):
    """``(d_star, profile, three-period curve)`` of the closed Blaschke curve with ``(m, n) = (3, 2)``."""
    spec = EnergySpec.extended_blaschke(0.0)
    d_star, curve = closure_search(spec, 4.0, 3, 2, n_samples=n_samples)
    return d_star, curve.profile, curve


@dataclass(frozen=True)
class CatalogCase:
    """A catalog member with parameters that give a periodic, non-constant profile."""

    name: str
    spec: EnergySpec
    rho: float
    d: float
    kappa_hint: float | None = None

    def profile(self, n_samples: int = 2048) -> CurvatureProfile:
        kind = self.spec.kind.value
        if kind == "extended_blaschke":
            return blaschke_profile(self.rho, self.spec.lam, self.d, n_samples)
        if kind == "total_curvature":
            return total_curvature_profile(self.rho, self.spec.lam, self.d, self.spec.epsilon, n_samples)
        return solve_profile(self.spec, self.rho, self.d, n_samples, kappa_hint=self.kappa_hint)


CATALOG_CASES = (
    CatalogCase("extended_blaschke", EnergySpec.extended_blaschke(0.3), 4.0, 3.0),
    CatalogCase("total_curvature", EnergySpec.total_curvature(3.0), 4.0, 3.5),
    CatalogCase("astigmatism", EnergySpec.astigmatism(0.5), 4.0, 1.76),
    CatalogCase("exponential", EnergySpec.exponential(0.1), 4.0, 0.3689),
    CatalogCase("q_elastic", EnergySpec.q_elastic(0.5, 1.0 / 3.0), 4.0, 1.1013),
    CatalogCase("bending", EnergySpec.bending(4.0), 1.0, 14.0, kappa_hint=1.4),
)


def _evolution_mesh(curve: SphereCurve, n_t: int = 256):
    emb, motion = embed_and_fit(curve)
    return evolve(emb, motion, curve, n_t)


# ---------------------------------------------------------------------------------------
# checks
# ---------------------------------------------------------------------------------------


def check_closed_forms(n_samples: int = 2048, tol_el: float = 1e-6, tol_fi: float = 1e-8) -> Report:
    """Euler-Lagrange residual and first-integral constancy of both closed forms."""
    rep = Report("closed-form criticality")
    bl, tc = closed_form_grid()
    worst_el = worst_fi = 0.0
    for make, grid in ((blaschke_profile, bl), (total_curvature_profile, tc)):
        for rho, lam, d in grid:
            p = make(rho, lam, d, n_samples=n_samples)
            d_est, dev = first_integral_check(p)
            worst_el = max(worst_el, el_residual(p))
            worst_fi = max(worst_fi, dev, abs(d_est - d))
    rep.meta.update(profiles=len(bl) + len(tc), n_samples=n_samples)
    rep.add("max_el_residual", worst_el, tol_el, "P'_ss + P'(kappa^2 + rho) - kappa P = 0")
    rep.add("max_first_integral_deviation", worst_fi, tol_fi, "P'_s^2 + (kappa P' - P)^2 + rho P'^2 = d")
    return rep


def check_solver_agreement(n_samples: int = 2048, tol: float = 1e-7) -> Report:
    """Numerical profiles against both closed forms, aligned at the curvature minimum."""
    rep = Report("solver versus closed forms")
    bl, tc = closed_form_grid()
    errs = {"extended_blaschke": 0.0, "total_curvature": 0.0}
    for name, make, grid in (("extended_blaschke", blaschke_profile, bl), ("total_curvature", total_curvature_profile, tc)):
        for rho, lam, d in grid:
            ref = make(rho, lam, d, n_samples=n_samples)
            num = solve_profile(ref.spec, rho, d, n_samples=n_samples)
            period_err = abs(num.period - ref.period)
            k_ref = ref.kappa_at(num.s + ref.s_min)
            errs[name] = max(errs[name], float(np.max(np.abs(num.kappa - k_ref))), period_err)
    for name, e in errs.items():
        rep.add(f"max_pointwise_{name}", e, tol, "numerical profile = closed form")
    return rep


def check_gamma32(tol_lambda: float = 1e-7, tol_gap: float = 1e-6) -> Report:
    """Closure of the ``(3, 2)`` Blaschke curve and its area/holonomy consistency."""
    d_star, prof, curve = gamma32()
    lam_angle, _ = progression_angle(prof)
    stats = curve_stats(curve, prof.spec)
    k = curve.kappa
    maxima = int(np.sum((k > np.roll(k, 1)) & (k >= np.roll(k, -1))))
    lift = horizontal_lift(curve)
    frac = stats.area_over_pi
    # the lift's phase after one traverse is minus twice the enclosed area
    phase_gap = abs(math.remainder(lift.holonomy_per_cover + 2 * stats.area, 2 * math.pi))
    rep = Report("closed curve (3, 2)")
    rep.meta.update(
        d_star=float(d_star), length=stats.length, energy=stats.energy, area=stats.area,
        area_over_pi=str(frac), curvature_maxima=maxima, m_cover=lift.m_cover,
    )
    rep.add("abs_progression_angle_minus_4pi_over_3", abs(lam_angle - 4 * math.pi / 3), tol_lambda, "Lambda = 2 pi n / m")
    rep.add("closure_gap", curve.closure_gap, tol_gap, "gamma(3 L) = gamma(0)")
    rep.add("curvature_maxima_minus_3", abs(maxima - 3), 0.0, "one maximum per period")
    rep.add("abs_area_minus_rational_pi", abs(stats.area - float(frac) * math.pi), 1e-6, "area = (p/q) pi")
    rep.add("abs_polygon_minus_gauss_bonnet_area", abs(stats.polygon_area - stats.area), 1e-5, "area by two methods")
    rep.add("abs_holonomy_plus_twice_area", phase_gap, 1e-6, "holonomy = -2 area")
    mc = math.inf if lift.m_cover is None else lift.m_cover
    rep.add("m_cover_minus_area_denominator", abs(mc - frac.denominator), 0.0, "lift closes after q covers")
    return rep


def _vertical(curve, n_t, profile):
    lift = horizontal_lift(curve)
    mesh = hopf_torus(lift, m_covers=1, n_t=n_t)
    rep, H, K = verify_vertical_geometry(mesh, profile=profile, accuracy=4)
    kappa = profile.kappa_fn(np.mod(mesh.s, curve.total_length))[0]
    return float(np.max(np.abs(H - 0.5 * kappa[:, None]))), float(np.max(np.abs(K))), rep


def check_vertical_torus(n_s: int = 2048, n_t: int = 256, tol: float = 1e-4, tol_clifford: float = 1e-6,
                         min_ratio: float = 4.0) -> Report:
    """``H = kappa/2`` and flatness of the Hopf torus over the ``(3, 2)`` curve, with refinement."""
    _, prof, _ = gamma32()
    errs = []
    for f in (1, 2):
        curve = reconstruct(prof, 4.0, 3, n_steps=f * n_s)
        eH, eK, _ = _vertical(curve, f * n_t, prof)
        errs.append((eH, eK))
    eq = constant_profile(EnergySpec.bending(0.0), 4.0, 0.0, n_samples=n_s)
    eq_curve = reconstruct(eq, 4.0, 1)
    lift = horizontal_lift(eq_curve)
    cliff = hopf_torus(lift, n_t=n_t)
    _, H_c, _ = verify_vertical_geometry(cliff, accuracy=4)
    (h1, k1), (h2, k2) = errs
    rep = Report("vertical torus over (3, 2)")
    rep.meta.update(n_s=n_s, n_t=n_t, accuracy=4, H_error_refined=h2, K_error_refined=k2)
    rep.add("max_abs_H_minus_half_kappa", h1, tol, "H = kappa/2")
    rep.add("max_abs_K_S", k1, tol, "vertical tori are flat")
    rep.add("H_refinement_shortfall", max(0.0, min_ratio - h1 / h2), 0.0, "error drops 4x when h halves")
    rep.add("K_refinement_shortfall", max(0.0, min_ratio - k1 / k2), 0.0, "error drops 4x when h halves")
    rep.add("max_abs_H_clifford", np.max(np.abs(H_c)), tol_clifford, "Clifford torus is minimal")
    return rep


def check_minimal_torus(n_t: int = 256, tol_analytic: float = 1e-5, tol_numeric: float = 1e-4) -> Report:
    """Mean curvature of the evolution torus over the ``(3, 2)`` curve."""
    _, _, curve = gamma32()
    mesh = _evolution_mesh(curve, n_t)
    sc = surface_curvatures(mesh, accuracy=4)
    rep = Report("minimal evolution torus")
    rep.meta.update(n_s=mesh.shape[0], n_t=n_t, accuracy=4, fit_residual=mesh.motion.fit_residual)
    rep.add("max_abs_H_analytic", np.max(np.abs(sc.H)), tol_analytic, "H = (kappa1 + kappa2)/2 = 0")
    rep.add("max_abs_H_finite_difference", np.nanmax(np.abs(sc.H_num)), tol_numeric, "H = 0")
    rep.extend(evolution_report(mesh), prefix="mesh.")
    return rep


def check_weingarten_table(n_t: int = 64, tol_res: float = 1e-6, tol_const: float = 1e-5) -> Report:
    """Weingarten residual and per-vertex derived constants for every catalog case."""
    rep = Report("Weingarten table")
    for case in CATALOG_CASES:
        prof = case.profile()
        rep.add(f"{case.name}.weingarten_residual", weingarten_residual(prof), tol_res, "kappa1 = kappa2 - P/P'")
        mesh = _evolution_mesh(reconstruct(prof, prof.rho, 1), n_t)
        sc = surface_curvatures(mesh, numeric=False)
        vals, expected, label = derived_constant(case.spec, prof.rho, sc.kappa1, sc.kappa2)
        with np.errstate(invalid="ignore"):
            dev = np.abs(vals - expected)
        # vertices where kappa = 0 carry an infinite principal curvature
        dev = dev[np.isfinite(vals)]
        rep.add(f"{case.name}.max_constant_deviation", np.max(dev), tol_const, label)
    return rep


def check_round_trip(n_t: int = 128, tol: float = 1e-3) -> Report:
    """Profile, evolution and energy recovery for each catalog case, plus a negative control."""
    rep = Report("energy recovery round trip")
    for case in CATALOG_CASES:
        prof = case.profile()
        mesh = _evolution_mesh(reconstruct(prof, prof.rho, 1), n_t)
        rec = recover_energy(mesh, tol=tol)
        ok = rec.spec is not None and rec.spec.kind is case.spec.kind
        rep.meta[f"{case.name}.recovered"] = rec.spec.label() if rec.spec else "none"
        rep.add(f"{case.name}.relative_error", rec.rel_error, tol, "P recovered up to scale")
        rep.add(f"{case.name}.misclassified", 0.0 if ok else 1.0, 0.0, "catalog classification")
        rep.add(f"{case.name}.lambda_error", abs(rec.lambda_shift - case.spec.lam), 1e-4 * max(1.0, abs(case.spec.lam)),
                "recovered lambda")
    _, _, curve = gamma32()
    try:
        embed_and_fit(curve, spec=EnergySpec.bending(0.0))
        raised = 0.0
    except PoorFit:
        raised = 1.0
    rep.add("wrong_spec_accepted", 1.0 - raised, 0.0, "mismatched energy is rejected")
    return rep


def check_bcv(a: float = 1.0, b: float = 2.0, tol: float = 1e-6) -> Report:
    """Vertical-cylinder identities of the BCV metric on coordinate circles and a sphere curve."""
    rep = Report("BCV vertical cylinders")
    rep.meta.update(a=a, b=b)
    for r0 in (0.25, 0.5, 1.0, 2.0):
        rep.extend(bcv_vertical_check(a, b, circle_cylinder(r0, a, n=32), tol=tol), prefix=f"circle_r{r0:g}.")
    prof = blaschke_profile(4 * a, 0.0, 2.0, n_samples=256)
    curve = reconstruct(prof, 4 * a, 1)
    rep.extend(bcv_vertical_check(a, b, curve, profile=prof, tol=tol), prefix="blaschke_curve.")
    return rep


CHECKS: dict[str, Callable[[], Report]] = {
    "closed_forms": check_closed_forms,
    "solver_agreement": check_solver_agreement,
    "gamma32": check_gamma32,
    "vertical_torus": check_vertical_torus,
    "minimal_torus": check_minimal_torus,
    "weingarten_table": check_weingarten_table,
    "round_trip": check_round_trip,
    "bcv": check_bcv,
}


def run_all(names=None) -> list[Report]:
    """Run the named checks (all by default) in a fixed order."""
    names = list(CHECKS) if names is None else list(names)
    return [CHECKS[n]() for n in names]

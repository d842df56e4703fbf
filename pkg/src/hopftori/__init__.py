"""Curvature energies on spheres, their critical curves and the tori built from them.

The main entry points:

* :mod:`hopftori.energy`: the energy catalog and Weingarten relations
* :mod:`hopftori.profiles`: periodic critical curvature profiles
* :mod:`hopftori.curves`: curves on ``S^2(rho)`` and closure search
* :mod:`hopftori.hopf`: horizontal lifts and vertical (Hopf) tori
* :mod:`hopftori.evolution`: rotational tori and energy recovery
* :mod:`hopftori.bcv`: vertical cylinders in the BCV metrics
* :mod:`hopftori.meshio`: projection, finite-difference curvatures, export
"""

from .curves import SphereCurve, closure_search, curve_stats, planar_curve, progression_angle, reconstruct
from .energy import EnergyKind, EnergySpec, WeingartenRelation, energy_from_weingarten, relation_of
from .errors import HopfToriError
from .evolution import (
    EvolutionTorusMesh,
    KillingMotion,
    embed_and_fit,
    evolve,
    recover_energy,
    surface_curvatures,
    weingarten_residual,
)
from .hopf import HopfLift, hopf_project, hopf_torus, horizontal_lift, verify_vertical_geometry
from .meshio import TorusMesh, discrete_curvatures, export, project_mesh, stereographic
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

__version__ = "0.1.0"

__all__ = [
    "EnergyKind",
    "EnergySpec",
    "WeingartenRelation",
    "energy_from_weingarten",
    "relation_of",
    "CurvatureProfile",
    "blaschke_profile",
    "total_curvature_profile",
    "constant_profile",
    "solve_profile",
    "el_residual",
    "first_integral_check",
    "SphereCurve",
    "reconstruct",
    "planar_curve",
    "progression_angle",
    "closure_search",
    "curve_stats",
    "HopfLift",
    "hopf_project",
    "horizontal_lift",
    "hopf_torus",
    "verify_vertical_geometry",
    "KillingMotion",
    "EvolutionTorusMesh",
    "embed_and_fit",
    "evolve",
    "surface_curvatures",
    "weingarten_residual",
    "recover_energy",
    "TorusMesh",
    "stereographic",
    "project_mesh",
    "discrete_curvatures",
    "export",
    "Report",
    "HopfToriError",
]

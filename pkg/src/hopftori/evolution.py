"""Rotational tori swept by the Killing extension of ``P'(kappa) B`` along a critical curve.

A critical curve of ``int P(kappa) ds`` on ``S^2(rho)`` is placed in the
totally geodesic sphere ``{x4 = 0}`` of ``S^3(rho)``; its binormal there is
``e4``.  The field ``P'(kappa(s)) e4`` along the curve is the restriction of
a Killing field of ``S^3(rho)``, found here as the skew matrix ``A`` that
solves ``A gamma(s) = P'(kappa(s)) e4`` in the least-squares sense.  The
torus is ``y(s, t) = exp(t A) gamma(s)``.

With ``rho = 0`` the curve lies in the plane ``z = 0`` of flat space and the
motion is a rotation about a line of that plane.

Orientation: the surface normal is ``-N`` carried by the motion, so the
principal curvature along the curve is ``-kappa``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import linalg

from ._numerics import cross4, periodic_antiderivative, spectral_derivative
from .curves import SphereCurve
from .energy import EnergyKind, EnergySpec
from .errors import (
    BranchTooShort,
    CurvatureZeroCrossing,
    IsoparametricInput,
    NonPeriodicOrbit,
    ParameterError,
    PoorFit,
)
from .meshio import TorusMesh, _d_s, _d_s_open, _with_ghosts, discrete_curvatures, metric_gauss_curvature
from .profiles import CurvatureProfile
from .report import Report

__all__ = [
    "KillingMotion",
    "EvolutionTorusMesh",
    "SurfaceCurvatures",
    "RecoveredEnergy",
    "embed_and_fit",
    "evolve",
    "surface_curvatures",
    "weingarten_residual",
    "derived_constant",
    "recover_energy",
    "evolution_report",
    "dP_ss_at",
]

FIT_TOL = 1e-5
RANK2_TOL = 1e-6


# ---------------------------------------------------------------------------------------
# Killing motion
# ---------------------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class KillingMotion:
    """Infinitesimal isometry fitted along a critical curve.

    For ``rho > 0`` ``generator`` is a skew 4x4 matrix.  For ``rho = 0`` it is
    the skew 3x3 rotation part and ``translation`` holds the screw's
    translation vector.  ``rates`` are the two rotation rates
    ``omega1 >= omega2 >= 0``.
    """

    ambient_rho: float
    generator: np.ndarray
    fit_residual: float
    rates: tuple[float, float]
    translation: np.ndarray | None = None

    @property
    def matrix(self) -> np.ndarray:
        """Linear (``rho > 0``) or homogeneous affine (``rho = 0``) generator."""
        if self.translation is None:
            return self.generator
        X = np.zeros((4, 4))
        X[:3, :3] = self.generator
        X[:3, 3] = self.translation
        return X

    @property
    def period(self) -> float:
        """Period of the orbits, ``2 pi / omega1``."""
        return 2 * math.pi / self.rates[0]

    def exp(self, t) -> np.ndarray:
        """``exp(t X)`` for each entry of ``t``, shape ``(len(t), 4, 4)``."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        X = self.matrix
        w1, w2 = self.rates
        if w2 <= RANK2_TOL:
            # X^3 = -w1^2 X for rank-2 skew and for rotations about a line
            X2 = X @ X
            a = (np.sin(w1 * t) / w1)[:, None, None]
            b = ((1 - np.cos(w1 * t)) / w1**2)[:, None, None]
            return np.eye(4) + a * X + b * X2
        return np.stack([linalg.expm(tk * X) for tk in t])


def _skew_rates(A):
    ev = np.sort(np.abs(np.linalg.eigvals(A).imag))[::-1]
    if A.shape[0] == 4:
        return float(ev[0]), float(ev[2])
    return float(ev[0]), 0.0


def _skew_from(params, n):
    A = np.zeros((n, n))
    iu = np.triu_indices(n, 1)
    A[iu] = params
    return A - A.T


def embed_and_fit(
    curve: SphereCurve,
    profile: CurvatureProfile | None = None,
    spec: EnergySpec | None = None,
    rho: float | None = None,
    tol: float = FIT_TOL,
):
    """Embed ``curve`` in ``S^3(rho)`` (or flat space) and fit the Killing motion.

    Parameters
    ----------
    curve
        Samples of the critical curve; ``curve.rho = 0`` marks a plane curve.
    profile, spec
        Curvature profile and energy; default to the curve's own.  A wrong
        ``spec`` is detected through the fit residual.
    tol
        Largest accepted per-sample defect ``|A gamma - P' e4|``.

    Returns
    -------
    embedded : ndarray, shape (n, 4) or (n, 3)
    motion : KillingMotion

    Raises
    ------
    IsoparametricInput
        For a constant-curvature profile.
    PoorFit
        When the defect exceeds ``tol``.
    """
    profile = curve.profile if profile is None else profile
    spec = profile.spec if spec is None else spec
    rho = curve.rho if rho is None else float(rho)
    if profile.constant or np.ptp(profile.kappa) < 1e-12 * max(1.0, np.abs(profile.kappa).max()):
        raise IsoparametricInput("constant curvature: the swept surface is isoparametric")
    if profile.d <= 0:
        raise ParameterError("the first integral d must be positive")
    if len(curve.s) < 64:
        raise ParameterError("the Killing fit needs at least 64 samples")
    dP = spec.derivatives(profile.kappa_at(curve.s))[1]
    n = len(curve.s)
    if rho > 0:
        emb = np.hstack([curve.points, np.zeros((n, 1))])
        # unknowns: upper-triangular entries of A; A x for basis matrices
        basis = [_skew_from(np.eye(6)[k], 4) for k in range(6)]
        M = np.stack([emb @ B.T for B in basis], axis=-1).reshape(4 * n, 6)
        rhs = np.zeros((n, 4))
        rhs[:, 3] = dP
        sol = np.linalg.lstsq(M, rhs.ravel(), rcond=None)[0]
        A = _skew_from(sol, 4)
        defect = np.linalg.norm(emb @ A.T - rhs, axis=1)
        fit = float(defect.max())
        if not fit <= tol:
            raise PoorFit(f"Killing fit defect {fit:.3e} exceeds {tol:.1e}")
        return emb, KillingMotion(rho, A, fit, _skew_rates(A))
    emb = curve.points.copy()
    basis = [_skew_from(np.eye(3)[k], 3) for k in range(3)]
    cols = [emb @ B.T for B in basis] + [np.broadcast_to(np.eye(3)[k], (n, 3)) for k in range(3)]
    M = np.stack(cols, axis=-1).reshape(3 * n, 6)
    rhs = np.zeros((n, 3))
    rhs[:, 2] = dP
    sol = np.linalg.lstsq(M, rhs.ravel(), rcond=None)[0]
    W, v = _skew_from(sol[:3], 3), sol[3:]
    defect = np.linalg.norm(emb @ W.T + v - rhs, axis=1)
    fit = float(defect.max())
    if not fit <= tol:
        raise PoorFit(f"Killing fit defect {fit:.3e} exceeds {tol:.1e}")
    return emb, KillingMotion(0.0, W, fit, _skew_rates(W), translation=v)


# ---------------------------------------------------------------------------------------
# evolution mesh
# ---------------------------------------------------------------------------------------


@dataclass(eq=False)
class EvolutionTorusMesh(TorusMesh):
    """Grid ``y(s_j, t_k) = exp(t_k A) gamma(s_j)`` with its motion and profile."""

    motion: KillingMotion | None = None
    profile: CurvatureProfile | None = None
    spec: EnergySpec | None = None
    curve: SphereCurve | None = None
    G: np.ndarray | None = None
    ref_normal: np.ndarray | None = None

    @property
    def rho(self) -> float:
        return 0.0 if self.radius is None else 1.0 / self.radius**2

    @property
    def kappa(self) -> np.ndarray:
        """Curvature of the profile at each grid row."""
        return self.profile.kappa_at(self.curve.s)

    def _field(self, name):
        if name not in self.fields:
            surface_curvatures(self, numeric=False)
        return self.fields[name]

    @property
    def kappa1(self):
        return self._field("kappa1")

    @property
    def kappa2(self):
        return self._field("kappa2")

    @property
    def H(self):
        return self._field("H")

    @property
    def K(self):
        return self._field("K")


def _frame_seam(curve: SphereCurve, tol=1e-9):
    Z0 = curve.frames[0]
    Z1 = curve.end_frame
    if np.max(np.abs(Z1 - Z0)) <= tol:
        return None
    R = Z1.T @ Z0
    S = np.eye(4)
    S[:3, :3] = R
    return S


def _orbit_period(motion: KillingMotion, strict: bool):
    w1, w2 = motion.rates
    if w1 <= RANK2_TOL:
        raise NonPeriodicOrbit("the fitted motion has no rotational part")
    if motion.translation is not None:
        axis = np.array([motion.generator[2, 1], motion.generator[0, 2], motion.generator[1, 0]])
        pitch = abs(axis @ motion.translation) / w1
        if pitch > 1e-7 and strict:
            raise NonPeriodicOrbit(f"screw motion with pitch {pitch:.3e}")
        return motion.period
    if w2 <= RANK2_TOL:
        return motion.period
    frac = Fraction(w2 / w1).limit_denominator(64)
    if abs(float(frac) - w2 / w1) <= 1e-9:
        return frac.denominator * motion.period
    if strict:
        raise NonPeriodicOrbit(f"rotation rates {w1:.6g}, {w2:.6g} are incommensurable")
    return motion.period


def evolve(embedded: np.ndarray, motion: KillingMotion, curve: SphereCurve, n_t: int = 256, strict: bool = True):
    """Sweep ``embedded`` by the motion over one orbit period.

    ``curve`` supplies the frames used for the seam, the analytic normal and
    the curvature profile.  The returned mesh closes in ``s`` through the
    curve's one-sweep rotation when the curve itself does not close.
    """
    period = _orbit_period(motion, strict)
    t = np.arange(n_t) * (period / n_t)
    E = motion.exp(t)
    flat = motion.translation is not None
    dim = 3 if flat else 4
    if flat:
        hom = np.hstack([embedded, np.ones((len(embedded), 1))])
        verts = np.einsum("kab,jb->jka", E, hom)[..., :3]
        vel = np.einsum("ab,jkb->jka", motion.matrix, np.concatenate([verts, np.ones(verts.shape[:2] + (1,))], -1))[..., :3]
        ref = np.einsum("kab,jb->jka", E[:, :3, :3], -curve.N)
    else:
        verts = np.einsum("kab,jb->jka", E, embedded)
        vel = verts @ motion.generator.T
        nrm = np.hstack([-curve.N, np.zeros((len(curve.N), 1))])
        ref = np.einsum("kab,jb->jka", E, nrm)
    G = np.linalg.norm(vel, axis=-1)
    radius = None if flat else 1.0 / math.sqrt(motion.ambient_rho)
    seam, s_closed = None, True
    if flat:
        if curve.closure_gap > 1e-9 or np.max(np.abs(curve.end_frame[1:] - curve.frames[0][1:])) > 1e-9:
            s_closed = False
    else:
        seam = _frame_seam(curve)
    return EvolutionTorusMesh(
        vertices=verts, s_length=curve.total_length if s_closed else curve.s[-1], t_length=period,
        radius=radius, seam=seam, s_closed=s_closed, motion=motion, profile=curve.profile,
        spec=curve.profile.spec, curve=curve, G=G, ref_normal=ref,
    )


# ---------------------------------------------------------------------------------------
# curvatures
# ---------------------------------------------------------------------------------------


def dP_ss_at(profile: CurvatureProfile, spec: EnergySpec, s) -> np.ndarray:
    """Second arc-length derivative of ``P'(kappa(s))`` at arbitrary ``s``.

    Closed forms use the chain rule; tabulated profiles evaluate the Fourier
    series of ``P'(kappa)`` on the profile grid.
    """
    s = np.asarray(s, dtype=float)
    if profile.constant:
        return np.zeros_like(s)
    if profile.kappa_ss_fn is not None:
        k, ks = profile.kappa_fn(s)
        _, _, ddP, dddP = spec.derivatives(k)
        return ddP * profile.kappa_ss_fn(s) + dddP * ks**2
    dP = spec.derivatives(profile.kappa)[1]
    n = dP.size
    c = np.fft.rfft(dP) / n
    freq = np.arange(c.size)
    w = 2 * math.pi * freq / profile.period
    weight = np.full(c.size, 2.0)
    weight[0] = 1.0
    if n % 2 == 0:
        weight[-1] = 1.0
    coef = -(w**2) * weight * c
    out = np.empty_like(s)
    flat = s.ravel()
    for lo in range(0, flat.size, 1024):
        chunk = flat[lo : lo + 1024]
        out.ravel()[lo : lo + 1024] = (np.exp(1j * np.outer(chunk, w)) @ coef).real
    return out


def _analytic_kappa2(kappa, spec, rho, dP, dPss, form, mask_rel=1e-3):
    with np.errstate(divide="ignore", invalid="ignore"):
        limit = spec.ratio(kappa) - kappa
        quotient = (dPss / dP + rho) / kappa
    if form == "limit":
        return limit
    if form == "quotient":
        if np.any(kappa == 0) or np.any(np.diff(np.sign(kappa)) != 0):
            raise CurvatureZeroCrossing("kappa vanishes on the grid")
        return quotient
    kd = np.abs(kappa * dP)
    return np.where(kd > mask_rel * np.max(kd), quotient, limit)


@dataclass(frozen=True, eq=False)
class SurfaceCurvatures:
    """Analytic and finite-difference curvature fields on an evolution mesh.

    Arrays are ``(n_s, n_t)``; numeric fields are NaN on rows where the
    evolution speed vanishes.
    """

    kappa1: np.ndarray
    kappa2: np.ndarray
    H: np.ndarray
    K: np.ndarray
    kappa1_num: np.ndarray | None
    kappa2_num: np.ndarray | None
    H_num: np.ndarray | None
    K_num: np.ndarray | None
    report: Report


def surface_curvatures(
    mesh: EvolutionTorusMesh,
    numeric: bool = True,
    accuracy: int = 4,
    form: str = "auto",
    tol: float = 1e-4,
) -> SurfaceCurvatures:
    """Principal curvatures of an evolution torus, analytically and by finite differences.

    Analytic: ``kappa1 = -kappa`` and
    ``kappa2 = (P'_ss / P' + rho) / kappa``.  With ``form="auto"`` rows where
    ``|kappa P'|`` is below ``1e-3`` of its maximum use the equivalent
    ``P/P' - kappa`` instead; ``form="quotient"`` raises
    :class:`CurvatureZeroCrossing` if ``kappa`` vanishes on the grid and
    ``form="limit"`` uses ``P/P' - kappa`` everywhere.

    Numeric: fundamental forms from centred differences of the given order,
    read in the adapted frame (``kappa1 = h_ss / E``, ``kappa2 = h_tt / G``);
    ``K`` is the intrinsic curvature of the difference metric.

    The analytic fields are stored in ``mesh.fields``.
    """
    spec, rho = mesh.spec, mesh.rho
    s = mesh.curve.s
    kappa = mesh.profile.kappa_at(s)
    dP = spec.derivatives(kappa)[1]
    dPss = dP_ss_at(mesh.profile, spec, s)
    k2 = _analytic_kappa2(kappa, spec, rho, dP, dPss, form)
    n_t = mesh.shape[1]
    k1 = np.repeat(-kappa[:, None], n_t, axis=1)
    k2 = np.repeat(k2[:, None], n_t, axis=1)
    H = 0.5 * (k1 + k2)
    with np.errstate(invalid="ignore"):
        K = k1 * k2 + rho
    # kappa = 0 with P' = 0: K = rho + kappa^2 - kappa P/P' stays finite
    K_limit = np.repeat((rho + kappa**2 - spec.kappa_ratio(kappa))[:, None], n_t, axis=1)
    K = np.where(np.isfinite(K), K, K_limit)
    mesh.fields.update(kappa1=k1, kappa2=k2, H=H, K=K)
    rep = Report("evolution torus curvatures")
    rep.meta.update(energy=spec.label(), rho=float(rho), d=float(mesh.profile.d), n_s=mesh.shape[0], n_t=n_t)
    if not numeric:
        return SurfaceCurvatures(k1, k2, H, K, None, None, None, None, rep)
    cv = discrete_curvatures(mesh, accuracy=accuracy, reference=mesh.ref_normal, allow_degenerate=True)
    E, F, G = np.moveaxis(cv.g, -1, 0)
    Lh, _, Nh = np.moveaxis(cv.h, -1, 0)
    speed = np.sqrt(G)
    ok = speed > 1e-6 * np.nanmax(speed)
    with np.errstate(divide="ignore", invalid="ignore"):
        k1n = np.where(ok, Lh / E, np.nan)
        k2n = np.where(ok, Nh / G, np.nan)
    Hn = np.where(ok, cv.H, np.nan)
    Kn = metric_gauss_curvature(mesh, cv.g, accuracy=accuracy)
    # only rows with a well-conditioned quotient enter the intrinsic comparison
    kd = np.abs(kappa * dP)
    ok_K = ok & (kd > 1e-3 * kd.max())[:, None]
    Kn = np.where(ok_K, Kn, np.nan)
    mesh.fields.update(kappa1_num=k1n, kappa2_num=k2n, H_num=Hn, K_num=Kn)
    rep.meta.update(accuracy=accuracy, degenerate_rows=int((~ok[:, 0]).sum()))
    rep.add("max_abs_kappa1_num_minus_analytic", np.nanmax(np.abs(k1n - k1)), tol, "kappa1 = -kappa")
    rep.add("max_abs_kappa2_num_minus_analytic", np.nanmax(np.abs(k2n - k2)), tol, "h22 = (P'_ss/P' + rho)/kappa")
    rep.add("max_abs_H_num_minus_analytic", np.nanmax(np.abs(Hn - H)), tol, "H = (kappa1 + kappa2)/2")
    rep.add("max_abs_K_num_minus_gauss_equation", np.nanmax(np.abs(Kn - K)), tol, "K = kappa1 kappa2 + rho")
    return SurfaceCurvatures(k1, k2, H, K, k1n, k2n, Hn, Kn, rep)


def weingarten_residual(profile: CurvatureProfile, spec: EnergySpec | None = None, rho: float | None = None) -> float:
    """``max |kappa1 - kappa2 + P/P'|`` over the profile samples.

    ``kappa2`` is the quotient ``(P'_ss / P' + rho) / kappa``, so the residual
    measures how well the profile solves the Euler-Lagrange equation.
    Samples where ``|kappa P'|`` is below ``1e-3`` of its maximum are skipped.
    """
    spec = profile.spec if spec is None else spec
    rho = profile.rho if rho is None else float(rho)
    kappa = profile.kappa
    P, dP = spec.derivatives(kappa)[:2]
    dPss = profile.dP_ss() if spec is profile.spec else dP_ss_at(profile, spec, profile.s)
    kd = np.abs(kappa * dP)
    ok = kd > 1e-3 * kd.max()
    k = kappa[ok]
    k1 = -k
    k2 = (dPss[ok] / dP[ok] + rho) / k
    return float(np.max(np.abs(k1 - k2 + P[ok] / dP[ok])))


def derived_constant(spec: EnergySpec, rho: float, k1, k2):
    """Per-vertex quantity that is constant on the evolution torus of ``spec``.

    Returns ``(values, expected, label)``.
    """
    lam = spec.lam
    kind = spec.kind
    with np.errstate(divide="ignore", invalid="ignore"):
        if kind is EnergyKind.EXTENDED_BLASCHKE:
            return 0.5 * (k1 + k2), -lam, "H = -lambda"
        if kind is EnergyKind.EXPONENTIAL:
            return k1 - k2, -1.0 / lam, "kappa1 - kappa2 = -1/lambda"
        if kind is EnergyKind.TOTAL_CURVATURE:
            return k1 * k2 + rho, rho - lam, "K = rho - lambda"
        if kind is EnergyKind.ASTIGMATISM:
            return 1.0 / k1 - 1.0 / k2, -1.0 / lam, "1/kappa1 - 1/kappa2 = -1/lambda"
        if kind is EnergyKind.Q_ELASTIC:
            q = spec.q
            a, b = q / (q - 1), lam / (q - 1)
            return k1 - a * k2, b, "kappa1 = a kappa2 + b, a = q/(q-1), b = lambda/(q-1)"
        return k1 * k1 - 2 * k1 * k2, lam, "kappa1^2 - 2 kappa1 kappa2 = lambda"


# ---------------------------------------------------------------------------------------
# mesh invariants
# ---------------------------------------------------------------------------------------


def evolution_report(mesh: EvolutionTorusMesh, tol_metric: float = 1e-6, tol_rigid: float = 1e-7) -> Report:
    """Sphere, metric, orbit-circle and row-congruence checks of an evolution mesh."""
    y = mesh.vertices
    curve, motion = mesh.curve, mesh.motion
    dP = mesh.spec.derivatives(mesh.kappa)[1]
    t = mesh.t
    E = motion.exp(t)
    dim = y.shape[-1]
    if dim == 4:
        ys = np.einsum("kab,jb->jka", E, np.hstack([curve.T, np.zeros((len(curve.T), 1))]))
        yt = y @ motion.generator.T
    else:
        ys = np.einsum("kab,jb->jka", E[:, :3, :3], curve.T)
        yt = y @ motion.generator.T + motion.translation
    rep = Report("evolution torus")
    rep.meta.update(energy=mesh.spec.label(), rho=float(mesh.rho), n_s=mesh.shape[0], n_t=mesh.shape[1],
                    orbit_period=float(mesh.t_length), fit_residual=float(motion.fit_residual))
    if mesh.radius is not None:
        rep.add("max_sphere_violation", np.max(np.abs(np.sum(y * y, -1) - mesh.radius**2)), 1e-9, "|y|^2 = 1/rho")
    rep.add("max_abs_G_minus_dP", np.max(np.abs(mesh.G - np.abs(dP)[:, None])), tol_metric, "G = P'(kappa)")
    rep.add("max_abs_E_minus_1", np.max(np.abs(np.sum(ys * ys, -1) - 1)), tol_metric, "<y_s, y_s> = 1")
    rep.add("max_abs_F", np.max(np.abs(np.sum(ys * yt, -1))), tol_metric, "<y_s, y_t> = 0")
    rep.add("max_abs_G2_minus_dP2", np.max(np.abs(np.sum(yt * yt, -1) - dP[:, None] ** 2)), tol_metric,
            "<y_t, y_t> = P'^2")
    # orbits: every t-column is a planar circle
    c = y.mean(axis=1, keepdims=True)
    r = np.linalg.norm(y - c, axis=-1)
    circ = np.max(np.abs(r - r.mean(axis=1, keepdims=True)))
    sv = np.linalg.svd(y - c, compute_uv=False)
    planar = np.max(sv[:, 2:]) / np.sqrt(mesh.shape[1]) if dim == 4 else np.max(sv[:, 2]) / np.sqrt(mesh.shape[1])
    rep.add("max_orbit_radius_spread", circ, tol_rigid, "orbits are Euclidean circles")
    rep.add("max_orbit_nonplanarity", planar, tol_rigid, "orbits are Euclidean circles")
    # rows: rigid copies of the first row
    ref = y[:, 0] - y[:, 0].mean(axis=0)
    worst = 0.0
    for k in range(mesh.shape[1]):
        row = y[:, k] - y[:, k].mean(axis=0)
        U, _, Vt = np.linalg.svd(row.T @ ref)
        worst = max(worst, float(np.max(np.linalg.norm(row @ (U @ Vt) - ref, axis=1))))
    rep.add("max_row_congruence_distance", worst, tol_rigid, "t-rows are congruent copies of the curve")
    return rep


# ---------------------------------------------------------------------------------------
# energy recovery
# ---------------------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class RecoveredEnergy:
    """Lagrangian read off an evolution torus.

    ``kappa`` and ``P`` tabulate the recovered Lagrangian on one monotone
    curvature branch (``P`` normalized to unit maximum).  ``spec`` is the
    best catalog match with its relative error ``rel_error`` after the best
    multiplicative constant; ``scores`` holds the error of every family.
    ``mu`` is the fitted constant of the Gauss-Codazzi relation for the
    zero-mean antiderivative used as ``Q``.
    """

    kappa: np.ndarray
    P: np.ndarray
    dP: np.ndarray
    spec: EnergySpec | None
    lambda_shift: float
    rel_error: float
    scores: dict
    mu: float
    codazzi_residual: float


def _branch(kappa):
    n = kappa.size
    j0 = int(np.argmin(kappa))
    idx = [j0]
    j = j0
    while len(idx) < n:
        nxt = (j + 1) % n
        if kappa[nxt] < kappa[j]:
            break
        idx.append(nxt)
        j = nxt
    return np.array(idx)


def _candidates(kappa, r, dQ):
    """Catalog members consistent with the ratio ``r = P/P'`` on the branch."""
    out = []
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        out.append(EnergySpec.extended_blaschke(float(np.mean(kappa - r / 2))))
        out.append(EnergySpec.bending(float(np.mean(2 * kappa * r - kappa**2))))
        lam_tc = float(np.mean(kappa * r - kappa**2))
        eps = 1 if np.mean(dQ * kappa) > 0 else -1
        out.append(("tc", lam_tc, eps))
        out.append(EnergySpec.astigmatism(float(np.mean(kappa - kappa**2 / r))))
        out.append(EnergySpec.exponential(float(1.0 / np.mean(r))))
        alpha, beta = np.polyfit(kappa, r, 1)
        out.append(("qe", alpha, beta))
    specs = []
    for c in out:
        try:
            if isinstance(c, tuple) and c[0] == "tc":
                specs.append(EnergySpec.total_curvature(c[1], c[2]))
            elif isinstance(c, tuple):
                q = 1.0 / c[1]
                specs.append(EnergySpec.q_elastic(-c[2] * q, q))
            else:
                specs.append(c)
        except (ValueError, ZeroDivisionError):
            continue
    return specs


def _match(spec, kappa, P):
    try:
        with np.errstate(all="ignore"):
            ref = spec.P(kappa)
    except ValueError:
        return math.inf
    if not np.all(np.isfinite(ref)):
        return math.inf
    c = float(ref @ P) / float(ref @ ref)
    return float(np.max(np.abs(P - c * ref)) / np.max(np.abs(P)))


def recover_energy(mesh: TorusMesh, rho: float | None = None, tol: float = 1e-3, accuracy: int = 8) -> RecoveredEnergy:
    """Recover the Lagrangian whose critical curve generates ``mesh``.

    Only the vertices (and the seam) are used.  The ``t = 0`` row is a curve in
    a totally geodesic sphere with unit normal ``n`` (sign: largest component
    positive); ``kappa`` is its geodesic curvature for the normal ``N`` with
    ``det(y, y_s, N, n) > 0`` and ``Q' = <y_t, n>``.  Then ``Q`` is the
    antiderivative of ``Q' kappa_s``, the constant ``mu`` in
    ``Q'_ss + Q'(kappa^2 + rho) - kappa Q = mu kappa`` is fitted on a
    monotone curvature branch, and ``P = Q + mu``.

    Raises
    ------
    IsoparametricInput
        If the curvature of the row is constant.
    BranchTooShort
        If the monotone branch has fewer than 16 usable samples.
    """
    if rho is None:
        rho = 0.0 if mesh.radius is None else 1.0 / mesh.radius**2
    y = mesh.vertices
    n_s, n_t = mesh.shape
    hs = mesh.h_s
    if mesh.s_closed:
        g = accuracy // 2 + 1
        ext = _with_ghosts(mesh, g)
        ys = _d_s(mesh, ext, g, 1, accuracy)[:, 0]
        yss = _d_s(mesh, ext, g, 2, accuracy)[:, 0]
    else:
        ys = _d_s_open(y[:, 0], hs, 1, accuracy)
        yss = _d_s_open(y[:, 0], hs, 2, accuracy)
    yt = spectral_derivative(y, mesh.t_length, 1, axis=1)[:, 0]
    row = y[:, 0]
    if y.shape[-1] == 4:
        n = np.linalg.svd(row, full_matrices=False)[2][-1]
    else:
        n = np.linalg.svd(row - row.mean(0), full_matrices=False)[2][-1]
    n = n * np.sign(n[np.argmax(np.abs(n))])
    sr = math.sqrt(rho)
    if y.shape[-1] == 4:
        N = cross4(sr * row, ys, np.broadcast_to(n, row.shape))
        sign = np.sign(np.linalg.det(np.stack([sr * row, ys, N, np.broadcast_to(n, row.shape)], axis=-2)))
        N = N * sign[:, None]
    else:
        N = np.cross(np.broadcast_to(n, ys.shape), ys)
    N /= np.linalg.norm(N, axis=1, keepdims=True)
    kappa = np.einsum("ij,ij->i", yss + rho * row, N)
    if np.ptp(kappa) < 1e-8 * max(1.0, np.abs(kappa).max()):
        raise IsoparametricInput("constant curvature along the generating curve")
    dQ = yt @ n
    if not mesh.s_closed:
        raise BranchTooShort("recovery needs a mesh closed in s")
    L = mesh.s_length
    kappa_s = spectral_derivative(kappa, L, 1)
    dQ_ss = spectral_derivative(dQ, L, 2)
    Q0, mean = periodic_antiderivative(dQ * kappa_s, L)
    lhs = dQ_ss + dQ * (kappa**2 + rho) - kappa * Q0
    idx = _branch(kappa)
    idx = idx[np.abs(dQ[idx]) > 1e-3 * np.abs(dQ).max()]
    if idx.size < 16:
        raise BranchTooShort(f"only {idx.size} usable samples on the monotone branch")
    kb, lb = kappa[idx], lhs[idx]
    mu = float(kb @ lb / (kb @ kb))
    codazzi = float(np.max(np.abs(lb - mu * kb)))
    P = Q0[idx] + mu
    dPb = dQ[idx]
    scale = np.max(np.abs(P))
    r = P / dPb
    scores = {}
    for cand in _candidates(kb, r, dPb):
        scores[cand] = _match(cand, kb, P)
    named = {c: e for c, e in scores.items() if c.kind is not EnergyKind.Q_ELASTIC and e <= tol}
    pool = named or scores
    best = min(pool, key=pool.get) if pool else None
    err = scores.get(best, math.inf) if best is not None else math.inf
    return RecoveredEnergy(
        kappa=kb, P=P / scale, dP=dPb / scale, spec=best, lambda_shift=float(best.lam) if best else math.nan,
        rel_error=err, scores={c.label(): e for c, e in scores.items()}, mu=mu, codazzi_residual=codazzi,
    )

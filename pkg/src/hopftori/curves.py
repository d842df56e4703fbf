"""Curves on the round sphere ``S^2(rho)`` rebuilt from their geodesic curvature.

The frame ``Z = [sqrt(rho) x, T, N]`` (rows) obeys ``Z' = A(s) Z`` with

    A = [[0, sqrt(rho), 0], [-sqrt(rho), 0, kappa], [0, -kappa, 0]],

which is integrated by a sixth-order Magnus scheme on SO(3).  Each step is an
exact rotation, followed by one Newton-Schulz polar correction that removes
accumulated rounding.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np
from scipy import optimize

from ._numerics import GAUSS3_NODES, expm_se2, expm_so3, magnus6
from .energy import EnergyKind, EnergySpec
from .errors import (
    ConstraintViolation,
    DegenerateRotation,
    IntegrationDiverged,
    NoRoot,
    NotClosed,
    ParameterError,
)
from .profiles import CurvatureProfile, blaschke_profile, solve_profile, total_curvature_profile

log = logging.getLogger(__name__)

__all__ = [
    "SphereCurve",
    "CurveStats",
    "reconstruct",
    "planar_curve",
    "progression_angle",
    "closure_search",
    "curve_stats",
    "profile_for",
    "polygon_area",
]


@dataclass(frozen=True, eq=False)
class SphereCurve:
    """Arc-length samples of a curve on the sphere of radius ``1/sqrt(rho)``.

    ``points``, ``T`` and ``N`` are ``(n, 3)``; sample ``j`` sits at ``s[j]``.
    The samples cover ``[0, total_length)`` and the endpoint at
    ``total_length`` is kept separately to measure ``closure_gap``.
    """

    rho: float
    s: np.ndarray
    points: np.ndarray
    T: np.ndarray
    N: np.ndarray
    kappa: np.ndarray
    total_length: float
    m: int
    n: int
    closure_gap: float
    profile: CurvatureProfile
    end_frame: np.ndarray

    @property
    def frames(self) -> np.ndarray:
        """Rows ``(sqrt(rho) x, T, N)`` stacked as ``(n, 3, 3)``."""
        return np.stack([math.sqrt(self.rho) * self.points, self.T, self.N], axis=1)

    def to_text(self) -> str:
        head = [
            f"# rho={self.rho:.17g}",
            f"# length={self.total_length:.17g}",
            f"# m={self.m} n={self.n}",
            f"# closure_gap={self.closure_gap:.3e}",
            "# columns: s x y z kappa",
        ]
        rows = [
            f"{s:.17g} {p[0]:.17g} {p[1]:.17g} {p[2]:.17g} {k:.17g}"
            for s, p, k in zip(self.s, self.points, self.kappa)
        ]
        return "\n".join(head + rows) + "\n"

    def to_obj(self) -> str:
        lines = [f"v {p[0]:.17g} {p[1]:.17g} {p[2]:.17g}" for p in self.points]
        idx = " ".join(str(i + 1) for i in range(len(self.points)))
        lines.append(f"l {idx} 1")
        return "\n".join(lines) + "\n"


class CurveStats(NamedTuple):
    length: float
    energy: float
    area: float
    closure_gap: float
    polygon_area: float
    area_over_pi: Fraction


def _generator(kappa, rho):
    sr = math.sqrt(rho)
    A = np.zeros(kappa.shape + (3, 3))
    A[..., 0, 1] = sr
    A[..., 1, 0] = -sr
    A[..., 1, 2] = kappa
    A[..., 2, 1] = -kappa
    return A


def _integrate_frames(profile, rho, n_steps, length, start):
    h = length / n_steps
    s0 = np.arange(n_steps) * h
    k_nodes = [profile.kappa_fn(s0 + c * h)[0] for c in GAUSS3_NODES]
    A1, A2, A3 = (_generator(k, rho) for k in k_nodes)
    steps = expm_so3(magnus6(A1, A2, A3, h))
    Z = np.empty((n_steps + 1, 3, 3))
    Z[0] = start
    cur = start.copy()
    eye = np.eye(3)
    for j in range(n_steps):
        cur = steps[j] @ cur
        drift = np.max(np.abs(cur @ cur.T - eye))
        if drift > 1e-6:
            raise IntegrationDiverged(f"frame drift {drift:.3e} at step {j}")
        cur = 1.5 * cur - 0.5 * cur @ cur.T @ cur
        Z[j + 1] = cur
    return Z


def _canonical_start():
    return np.eye(3)


def reconstruct(
    profile: CurvatureProfile,
    rho: float | None = None,
    m_periods: int = 1,
    start: np.ndarray | None = None,
    n_steps: int | None = None,
) -> SphereCurve:
    """Curve on ``S^2(rho)`` with geodesic curvature ``profile`` over ``m_periods`` periods.

    The step is the profile's grid spacing unless ``n_steps`` (over the whole
    length) is given; it need not be a multiple of ``m_periods``.  The default start is the point
    ``(1/sqrt(rho), 0, 0)`` with tangent ``(0, 1, 0)``; ``start`` may supply any
    other orthonormal frame as rows ``(sqrt(rho) x, T, N)``.
    """
    rho = profile.rho if rho is None else float(rho)
    if rho <= 0:
        raise ParameterError("reconstruction needs rho > 0")
    if m_periods < 1:
        raise ParameterError("m_periods must be positive")
    total = m_periods * profile.period
    n_total = profile.n_samples * m_periods if n_steps is None else int(n_steps)
    Z0 = _canonical_start() if start is None else np.asarray(start, dtype=float)
    Z = _integrate_frames(profile, rho, n_total, total, Z0)
    sr = math.sqrt(rho)
    s = np.arange(n_total) * (total / n_total)
    pts = Z[:-1, 0] / sr
    gap = float(np.linalg.norm(Z[-1, 0] - Z[0, 0]) / sr)
    windings = m_periods
    if not profile.constant:
        try:
            lam_angle, _ = progression_angle(profile, rho)
            windings = int(round(m_periods * lam_angle / (2 * math.pi)))
        except DegenerateRotation:
            pass
    return SphereCurve(
        rho=rho, s=s, points=pts, T=Z[:-1, 1].copy(), N=Z[:-1, 2].copy(),
        kappa=profile.kappa_fn(s)[0], total_length=total, m=m_periods, n=windings,
        closure_gap=gap, profile=profile, end_frame=Z[-1],
    )


def planar_curve(profile: CurvatureProfile, m_periods: int = 1) -> SphereCurve:
    """Plane curve with curvature ``profile`` in ``z = 0``, returned with ``rho = 0``.

    Same sixth-order Magnus scheme, on the Euclidean group of the plane.  The
    start is the origin with tangent ``(1, 0, 0)`` and normal ``(0, 1, 0)``.
    """
    n_total = profile.n_samples * m_periods
    total = m_periods * profile.period
    h = total / n_total
    s = np.arange(n_total) * h
    gens = []
    for c in GAUSS3_NODES:
        k = profile.kappa_fn(s + c * h)[0]
        X = np.zeros((n_total, 3, 3))
        X[:, 0, 1], X[:, 1, 0], X[:, 0, 2] = -k, k, 1.0
        gens.append(X)
    steps = expm_se2(magnus6(*gens, h, right=True))
    g = np.empty((n_total + 1, 3, 3))
    g[0] = np.eye(3)
    for j in range(n_total):
        g[j + 1] = g[j] @ steps[j]
    zero = np.zeros((n_total, 1))
    pts = np.hstack([g[:-1, :2, 2], zero])
    T = np.hstack([g[:-1, :2, 0], zero])
    N = np.hstack([g[:-1, :2, 1], zero])
    gap = float(np.linalg.norm(g[-1, :2, 2] - g[0, :2, 2]))
    end = np.zeros((3, 3))
    end[0, :2], end[1, :2], end[2, :2] = g[-1, :2, 2], g[-1, :2, 0], g[-1, :2, 1]
    return SphereCurve(
        rho=0.0, s=s, points=pts, T=T, N=N, kappa=profile.kappa_fn(s)[0], total_length=total,
        m=m_periods, n=0, closure_gap=gap, profile=profile, end_frame=end,
    )


def _angle_from_frames(Z0, Z1, pts):
    R = Z1.T @ Z0
    if np.max(np.abs(R - np.eye(3))) < 1e-9:
        raise DegenerateRotation("frame map after one period is the identity")
    axis = np.linalg.svd(R - np.eye(3))[2][-1]
    w = 0.5 * np.array([R[2, 1] - R[1, 2], R[0, 2] - R[2, 0], R[1, 0] - R[0, 1]])
    # orient the axis so the curve's azimuth about it increases
    e1 = np.cross(axis, [1.0, 0.0, 0.0])
    if np.linalg.norm(e1) < 0.5:
        e1 = np.cross(axis, [0.0, 1.0, 0.0])
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(axis, e1)
    phi = np.unwrap(np.arctan2(pts @ e2, pts @ e1))
    if phi[-1] < phi[0]:
        axis = -axis
    angle = math.atan2(float(axis @ w), (np.trace(R) - 1.0) / 2.0) % (2 * math.pi)
    return angle, axis


def progression_angle(profile: CurvatureProfile, rho: float | None = None):
    """Rotation angle in ``(0, 2 pi)`` and unit axis of the one-period frame map.

    The axis is oriented so that the curve travels positively around it.
    """
    if profile.constant:
        raise DegenerateRotation("constant curvature closes after one period")
    rho = profile.rho if rho is None else float(rho)
    n1 = profile.n_samples
    Z = _integrate_frames(profile, rho, n1, profile.period, _canonical_start())
    return _angle_from_frames(Z[0], Z[-1], Z[:, 0])


def profile_for(spec: EnergySpec, rho: float, d: float, n_samples: int = 2048, **kw) -> CurvatureProfile:
    """Closed form when one exists, numerical integration otherwise."""
    if spec.kind is EnergyKind.EXTENDED_BLASCHKE:
        return blaschke_profile(rho, spec.lam, d, n_samples)
    if spec.kind is EnergyKind.TOTAL_CURVATURE:
        return total_curvature_profile(rho, spec.lam, d, spec.epsilon, n_samples)
    return solve_profile(spec, rho, d, n_samples, **kw)


def _default_bracket(spec, rho):
    if spec.kind is EnergyKind.EXTENDED_BLASCHKE:
        lo = (-spec.lam + math.sqrt(rho + spec.lam**2)) / 2
        return lo * (1 + 1e-6), lo * 1e4
    if spec.kind is EnergyKind.TOTAL_CURVATURE and spec.epsilon == 1 and spec.lam > 0:
        span = rho - spec.lam
        return spec.lam + 1e-6 * span, rho - 1e-6 * span
    raise ParameterError("no default d-range for this energy; pass d_bracket")


def closure_search(
    spec: EnergySpec,
    rho: float,
    m: int,
    n: int,
    d_bracket: tuple[float, float] | None = None,
    n_samples: int = 2048,
    n_scan: int = 48,
):
    """Find ``d`` with progression angle ``2 pi n / m`` and return ``(d_star, curve)``.

    Without ``d_bracket`` the admissible ``d``-range is scanned geometrically
    for a sign change of ``Lambda(d) - 2 pi n / m``; the root is then polished
    by Brent's method.
    """
    if math.gcd(m, n) != 1:
        raise ParameterError("m and n must be coprime")
    if spec.kind is EnergyKind.EXTENDED_BLASCHKE and spec.lam == 0:
        if not (m < 2 * n < math.sqrt(2) * m):
            warnings.warn(
                f"(m, n) = ({m}, {n}) violates m < 2n < sqrt(2) m; searching anyway",
                ConstraintViolation,
                stacklevel=2,
            )
    target = 2 * math.pi * n / m

    def f(d):
        prof = profile_for(spec, rho, d, n_samples)
        return progression_angle(prof, rho)[0] - target

    if d_bracket is None:
        lo, hi = _default_bracket(spec, rho)
        grid = np.geomspace(lo, hi, n_scan) if lo > 0 else np.linspace(lo, hi, n_scan)
        vals = []
        found = None
        for d in grid:
            try:
                vals.append((d, f(d)))
            except DegenerateRotation:
                continue
            if len(vals) > 1 and np.sign(vals[-1][1]) != np.sign(vals[-2][1]) and abs(vals[-1][1] - vals[-2][1]) < math.pi:
                found = (vals[-2][0], vals[-1][0])
                break
        if found is None:
            raise NoRoot(f"no d in [{lo!r}, {hi!r}] gives progression angle 2 pi {n}/{m}")
        d_bracket = found
    a, b = d_bracket
    fa, fb = f(a), f(b)
    if np.sign(fa) == np.sign(fb):
        raise NoRoot("bracket does not straddle the target progression angle")
    d_star = optimize.brentq(f, a, b, xtol=1e-15, rtol=1e-15, maxiter=200)
    prof = profile_for(spec, rho, d_star, n_samples)
    resid = abs(progression_angle(prof, rho)[0] - target)
    if resid > 1e-10:
        log.warning("closure residual %.3e exceeds 1e-10", resid)
    curve = reconstruct(prof, rho, m)
    return d_star, curve


def polygon_area(points: np.ndarray, rho: float, pole: np.ndarray | None = None) -> float:
    """Signed area swept by a closed spherical polygon, by a triangle fan from ``pole``.

    Each fan triangle uses the solid-angle formula
    ``tan(E/2) = u.(v x w) / (1 + u.v + v.w + w.u)`` on unit vectors.  The
    pole defaults to the normalized centroid (or, for curves with centroid
    at the origin, the normal of their best-fit plane).
    """
    u = points / np.linalg.norm(points, axis=1, keepdims=True)
    if pole is None:
        c = u.mean(axis=0)
        if np.linalg.norm(c) < 1e-8:
            c = np.linalg.svd(u, full_matrices=False)[2][-1]
        pole = c
    c = pole / np.linalg.norm(pole)
    v, w = u, np.roll(u, -1, axis=0)
    num = np.einsum("j,ij->i", c, np.cross(v, w))
    den = 1 + v @ c + np.einsum("ij,ij->i", v, w) + w @ c
    E = 2 * np.arctan2(num, den)
    return float(E.sum() / rho)


def curve_stats(curve: SphereCurve, spec: EnergySpec, tol: float = 1e-6, max_denominator: int = 64) -> CurveStats:
    """Length, energy, enclosed area and closure gap of a closed curve.

    The area comes from Gauss-Bonnet, ``(2 pi n - int kappa ds) / rho``, with the
    turning index taken to be the winding count ``n``.  It is cross-checked
    against a spherical-polygon fan area computed around the rotation axis.
    """
    if curve.closure_gap > tol:
        raise NotClosed(f"closure gap {curve.closure_gap:.3e} exceeds {tol:.1e}")
    h = curve.total_length / curve.s.size
    length = float(h * curve.s.size)
    energy = float(h * np.sum(spec.P(curve.kappa)))
    total_kappa = float(h * np.sum(curve.kappa))
    area = (2 * math.pi * curve.n - total_kappa) / curve.rho
    pole = None
    if not curve.profile.constant:
        try:
            pole = curve.frames[0].T @ progression_angle(curve.profile, curve.rho)[1]
        except DegenerateRotation:
            pole = None
    poly = polygon_area(curve.points, curve.rho, pole)
    if poly < 0:
        poly = polygon_area(curve.points, curve.rho, None if pole is None else -pole)
    frac = Fraction(area / math.pi).limit_denominator(max_denominator)
    return CurveStats(length, energy, area, curve.closure_gap, poly, frac)

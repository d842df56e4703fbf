"""Hopf map ``S^3(1) -> S^2(4)``, horizontal lifts and vertical (Hopf) tori.

Points of ``S^3`` are handled as real 4-vectors ``(p1, p2, p3, p4)`` read as
``(z, w) = (p1 + i p2, p3 + i p4)``.  The fibers are the orbits of
``(z, w) -> (e^{it} z, e^{it} w)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from ._numerics import periodic_antiderivative
from .curves import SphereCurve
from .errors import ChartSingularity, NotClosedLift, OffSphere, ParameterError
from .meshio import TorusMesh, discrete_curvatures
from .profiles import CurvatureProfile
from .report import Report

__all__ = [
    "HopfLift",
    "VerticalTorusMesh",
    "hopf_project",
    "hopf_differential",
    "horizontal_lift",
    "hopf_torus",
    "phase_matrix",
    "verify_vertical_geometry",
    "M_MAX",
]

M_MAX = 64
CHART_EPS = 1e-3
# pre-rotate when the curve comes this close to the chart boundary
CHART_MARGIN = 0.05

_PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}
# base coordinates (A1, A2, A3) correspond to Pauli matrices (z, x, y)
_BASE_PAULI = [_PAULI["z"], _PAULI["x"], _PAULI["y"]]


def _to_complex(p):
    p = np.asarray(p, dtype=float)
    return p[..., 0] + 1j * p[..., 1], p[..., 2] + 1j * p[..., 3]


def _to_real(z, w):
    return np.stack([z.real, z.imag, w.real, w.imag], axis=-1)


def hopf_project(p, tol: float = 1e-6):
    """``(z, w) -> (|z|^2 - |w|^2) / 2, Re(conj(z) w), Im(conj(z) w))``."""
    p = np.asarray(p, dtype=float)
    dev = np.abs(np.linalg.norm(p, axis=-1) - 1.0)
    if np.any(dev > tol):
        raise OffSphere(f"point off the unit 3-sphere by {float(np.max(dev)):.3e}")
    z, w = _to_complex(p)
    zw = np.conj(z) * w
    return np.stack([0.5 * (np.abs(z) ** 2 - np.abs(w) ** 2), zw.real, zw.imag], axis=-1)


def hopf_differential(p, v):
    """Differential of the Hopf map at ``p`` applied to ``v``."""
    z, w = _to_complex(p)
    dz, dw = _to_complex(v)
    first = (np.conj(z) * dz).real - (np.conj(w) * dw).real
    second = np.conj(dz) * w + np.conj(z) * dw
    return np.stack([first, second.real, second.imag], axis=-1)


def phase_matrix(phi: float) -> np.ndarray:
    """Real 4x4 matrix of ``(z, w) -> (e^{i phi} z, e^{i phi} w)``."""
    c, s = math.cos(phi), math.sin(phi)
    R = np.zeros((4, 4))
    R[0:2, 0:2] = [[c, -s], [s, c]]
    R[2:4, 2:4] = [[c, -s], [s, c]]
    return R


def _su2_cover(R):
    """Unitary ``U`` with ``hopf_project(U p) = R hopf_project(p)``."""
    w = 0.5 * np.array([R[2, 1] - R[1, 2], R[0, 2] - R[2, 0], R[1, 0] - R[0, 1]])
    cos_t = np.clip((np.trace(R) - 1) / 2, -1.0, 1.0)
    theta = math.acos(cos_t)
    if theta < 1e-14:
        return np.eye(2, dtype=complex)
    if abs(math.pi - theta) < 1e-7:
        n = np.linalg.svd(R - np.eye(3))[2][-1]
    else:
        n = w / math.sin(theta)
    gen = sum(ni * P for ni, P in zip(n, _BASE_PAULI))
    probe = np.array([0.6, 0.8j * np.exp(0.3j)])
    p4 = _to_real(probe[0], probe[1])
    for sgn in (-1, 1):
        U = expm(sgn * 0.5j * theta * gen)
        q = U @ probe
        if np.allclose(hopf_project(_to_real(q[0], q[1])), R @ hopf_project(p4), atol=1e-12):
            return U
    raise RuntimeError("no unitary cover found for the rotation")


def _apply_unitary(U, p):
    z, w = _to_complex(p)
    z2 = U[0, 0] * z + U[0, 1] * w
    w2 = U[1, 0] * z + U[1, 1] * w
    return _to_real(z2, w2)


def _rotation_to_e1(c):
    c = c / np.linalg.norm(c)
    e1 = np.array([1.0, 0.0, 0.0])
    v = np.cross(c, e1)
    s, co = np.linalg.norm(v), float(c @ e1)
    if s < 1e-15:
        return np.eye(3) if co > 0 else np.diag([-1.0, -1.0, 1.0])
    K = np.array([[0, -v[2], v[1]], [v[2], 0, -v[0]], [-v[1], v[0], 0]]) / s
    th = math.atan2(s, co)
    return np.eye(3) + math.sin(th) * K + (1 - math.cos(th)) * (K @ K)


def _pick_chart(u):
    """Direction ``c`` maximizing ``min <c, u_i>`` among a few candidates."""
    cands = [np.eye(3)[i] * sg for i in range(3) for sg in (1, -1)]
    cen = u.mean(axis=0)
    if np.linalg.norm(cen) > 1e-8:
        cands.insert(0, cen / np.linalg.norm(cen))
    sv = np.linalg.svd(u, full_matrices=False)[2]
    cands += [sv[-1], -sv[-1]]
    scores = [float(np.min(u @ c)) for c in cands]
    best = int(np.argmax(scores))
    return cands[best], scores[best]


@dataclass(frozen=True, eq=False)
class HopfLift:
    """Horizontal lift of a closed curve on ``S^2(4)``.

    ``holonomy_per_cover`` is the phase in ``(-pi, pi]`` picked up after one
    traverse of the base curve; ``m_cover`` is the least number of traverses
    after which the lift closes (``None`` if none up to ``M_MAX``).
    ``beta_sign`` records the sign in front of the phase integral and
    ``pre_rotation`` the base rotation used to keep the curve inside the chart
    ``A1 > -1/2``.
    """

    base: SphereCurve
    lift_points: np.ndarray
    tangents: np.ndarray
    beta: np.ndarray
    holonomy_per_cover: float
    m_cover: int | None
    beta_sign: int
    pre_rotation: np.ndarray

    @property
    def s(self) -> np.ndarray:
        return self.base.s

    def horizontality(self) -> float:
        z, w = _to_complex(self.lift_points)
        dz, dw = _to_complex(self.tangents)
        return float(np.max(np.abs((np.conj(1j * z) * dz + np.conj(1j * w) * dw).real)))


def horizontal_lift(curve: SphereCurve, m_max: int = M_MAX, phase_tol: float = 1e-6) -> HopfLift:
    """Horizontal lift through the chart ``A1 > -1/2`` of the sphere of radius 1/2.

    With ``a1 = sqrt(A1 + 1/2)`` and ``a_i = A_i / a1`` the lift is
    ``e^{i beta} (a1, a2 + i a3)`` where ``beta' = (A3 A2' - A2 A3') / (A1 + 1/2)``.
    That sign of ``beta'`` is the one making the lift orthogonal to the fibers
    for the real inner product.
    """
    if not math.isclose(curve.rho, 4.0, rel_tol=1e-12):
        raise ParameterError("the Hopf map used here targets S^2(4); curve.rho must be 4")
    A0, T0 = curve.points, curve.T
    u = 2 * A0
    R = np.eye(3)
    if np.min(A0[:, 0]) + 0.5 < CHART_MARGIN:
        c, score = _pick_chart(u)
        if (score + 1) / 2 < CHART_EPS:
            raise ChartSingularity("curve meets every candidate chart boundary")
        R = _rotation_to_e1(c)
    A, T = A0 @ R.T, T0 @ R.T
    den = A[:, 0] + 0.5
    if np.min(den) < CHART_EPS:
        raise ChartSingularity(f"A1 + 1/2 drops to {float(np.min(den)):.3e}")
    a1 = np.sqrt(den)
    a2, a3 = A[:, 1] / a1, A[:, 2] / a1
    rate = (A[:, 2] * T[:, 1] - A[:, 1] * T[:, 2]) / den
    L = curve.total_length
    F, mean = periodic_antiderivative(rate, L)
    beta = F + mean * curve.s
    hol = math.remainder(mean * L, 2 * math.pi)
    eb = np.exp(1j * beta)
    z = a1 * eb
    w = (a2 + 1j * a3) * eb
    # derivative of the lift from A' = T
    a1p = T[:, 0] / (2 * a1)
    a2p = (T[:, 1] * a1 - A[:, 1] * a1p) / den
    a3p = (T[:, 2] * a1 - A[:, 2] * a1p) / den
    dz = (a1p + 1j * rate * a1) * eb
    dw = ((a2p + 1j * a3p) + 1j * rate * (a2 + 1j * a3)) * eb
    pts, tan = _to_real(z, w), _to_real(dz, dw)
    if not np.allclose(R, np.eye(3)):
        Uinv = _su2_cover(R).conj().T
        pts, tan = _apply_unitary(Uinv, pts), _apply_unitary(Uinv, tan)
    m_cover = None
    for m in range(1, m_max + 1):
        x = m * hol / (2 * math.pi)
        if abs(x - round(x)) <= phase_tol:
            m_cover = m
            break
    return HopfLift(curve, pts, tan, beta, hol, m_cover, +1, R)


@dataclass(eq=False)
class VerticalTorusMesh(TorusMesh):
    """``e^{it}`` times the lift, over ``m_covers`` traverses of the base curve."""

    lift: HopfLift | None = None
    m_covers: int = 1

    @property
    def kappa(self) -> np.ndarray:
        return np.tile(self.lift.base.kappa, self.m_covers)

    @property
    def base_normals(self) -> np.ndarray:
        return np.tile(self.lift.base.N, (self.m_covers, 1))


def hopf_torus(lift: HopfLift, m_covers: int | None = None, n_t: int = 256, strict: bool = False) -> VerticalTorusMesh:
    """Vertical torus ``e^{i t} lift(s)`` on a ``(m_covers * n_base, n_t)`` grid.

    Without ``m_covers`` the lift's closing cover is used when it exists and a
    single traverse otherwise; the seam then carries the holonomy phase.
    """
    if m_covers is None:
        m_covers = lift.m_cover if lift.m_cover is not None else 1
        closed = lift.m_cover is not None
    else:
        x = m_covers * lift.holonomy_per_cover / (2 * math.pi)
        closed = abs(x - round(x)) <= 1e-6
    if strict and not closed:
        raise NotClosedLift(f"lift does not close after {m_covers} covers")
    rows = np.concatenate(
        [_apply_unitary(np.exp(1j * c * lift.holonomy_per_cover) * np.eye(2), lift.lift_points) for c in range(m_covers)]
    )
    t = np.arange(n_t) * (2 * math.pi / n_t)
    z, w = _to_complex(rows)
    et = np.exp(1j * t)[None, :]
    verts = _to_real(z[:, None] * et, w[:, None] * et)
    seam_phase = m_covers * lift.holonomy_per_cover
    seam = None if closed else phase_matrix(seam_phase)
    return VerticalTorusMesh(
        vertices=verts, s_length=m_covers * lift.base.total_length, t_length=2 * math.pi,
        radius=1.0, seam=seam, lift=lift, m_covers=m_covers,
    )


def verify_vertical_geometry(
    mesh: VerticalTorusMesh,
    profile: CurvatureProfile | None = None,
    accuracy: int = 4,
    tol_H: float = 1e-4,
    tol_K: float = 1e-4,
    tol_sphere: float = 1e-9,
):
    """Compare finite-difference ``H`` and ``K`` of a vertical torus with ``kappa/2`` and 0.

    The normal is taken inside ``T S^3`` and oriented so that it projects onto
    the base curve's normal.  Returns ``(report, H, K_S)``.
    """
    cv = discrete_curvatures(mesh, accuracy=accuracy)
    proj = hopf_differential(mesh.vertices, cv.normal)
    sign = np.sign(np.einsum("jki,ji->jk", proj, mesh.base_normals))
    sign[sign == 0] = 1.0
    H = cv.H * sign
    K = cv.K_intr
    if profile is not None:
        s_base = np.mod(mesh.s, mesh.lift.base.total_length)
        kappa = profile.kappa_fn(s_base)[0]
    else:
        kappa = mesh.kappa
    mesh.fields["H"] = H
    mesh.fields["K_S"] = K
    sphere = float(np.max(np.abs(np.linalg.norm(mesh.vertices, axis=-1) - 1.0)))
    rep = Report("vertical torus")
    rep.meta.update(n_s=mesh.shape[0], n_t=mesh.shape[1], m_covers=mesh.m_covers, accuracy=accuracy)
    rep.add("max_abs_H_minus_half_kappa", np.max(np.abs(H - 0.5 * kappa[:, None])), tol_H, "H = kappa/2")
    rep.add("max_abs_K", np.max(np.abs(K)), tol_K, "vertical tori are flat")
    rep.add("max_sphere_violation", sphere, tol_sphere, "|x| = 1")
    return rep, H, K

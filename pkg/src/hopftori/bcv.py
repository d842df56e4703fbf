"""Vertical cylinders in the Bianchi-Cartan-Vranceanu metrics ``g_{a,b}``.

    g = (dx^2 + dy^2) / (1 + a r^2)^2 + (dz + b (y dx - x dy) / (2 (1 + a r^2)))^2

models a Killing submersion over a surface of curvature ``4a`` with bundle
curvature ``b/2``.  Christoffel symbols and the curvature tensor are derived
symbolically once per process and evaluated numerically.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
import sympy as sp

from .curves import SphereCurve
from .errors import ChartExit
from .profiles import CurvatureProfile
from .report import Report

__all__ = ["bcv_metric", "bcv_geometry", "bcv_vertical_check", "circle_cylinder", "chart_curve", "BaseCurve2D"]


@lru_cache(maxsize=1)
def _symbolic():
    x, y, z, a, b = sp.symbols("x y z a b", real=True)
    X = (x, y, z)
    lam = 1 / (1 + a * (x**2 + y**2))
    w = (b * y * lam / 2, -b * x * lam / 2, sp.Integer(1))  # dz + w_x dx + w_y dy
    g = sp.zeros(3, 3)
    for i in range(3):
        for j in range(3):
            g[i, j] = w[i] * w[j]
    g[0, 0] += lam**2
    g[1, 1] += lam**2
    g = sp.simplify(g)
    ginv = sp.simplify(g.inv())
    dg = [[[sp.diff(g[i, j], X[k]) for k in range(3)] for j in range(3)] for i in range(3)]
    Gam = [
        [
            [sp.simplify(sum(ginv[l, m] * (dg[m][i][j] + dg[m][j][i] - dg[i][j][m]) for m in range(3)) / 2) for j in range(3)]
            for i in range(3)
        ]
        for l in range(3)
    ]
    # R(d_j, d_k) d_i = Riem[l][i][j][k] d_l
    Riem = [[[[None] * 3 for _ in range(3)] for _ in range(3)] for _ in range(3)]
    for l in range(3):
        for i in range(3):
            for j in range(3):
                for k in range(3):
                    expr = sp.diff(Gam[l][k][i], X[j]) - sp.diff(Gam[l][j][i], X[k])
                    expr += sum(Gam[l][j][m] * Gam[m][k][i] - Gam[l][k][m] * Gam[m][j][i] for m in range(3))
                    Riem[l][i][j][k] = expr
    args = (x, y, a, b)
    f_g = sp.lambdify(args, g, "numpy")
    f_gam = sp.lambdify(args, sp.Array(Gam), "numpy")
    f_riem = sp.lambdify(args, sp.Array(Riem), "numpy")
    return f_g, f_gam, f_riem


def bcv_metric(x, y, a, b):
    """Metric matrix ``g_{a,b}`` at a point (it does not depend on ``z``)."""
    return np.asarray(_symbolic()[0](float(x), float(y), float(a), float(b)), dtype=float)


def bcv_geometry(x, y, a, b):
    """``(g, Gamma, Riem)`` at a point; ``Gamma[l, i, j]`` and ``Riem[l, i, j, k]``."""
    f_g, f_gam, f_riem = _symbolic()
    args = (float(x), float(y), float(a), float(b))
    g = np.asarray(f_g(*args), dtype=float)
    gam = np.asarray(f_gam(*args), dtype=float)
    riem = np.asarray(f_riem(*args), dtype=float)
    return g, gam, riem


class BaseCurve2D:
    """Chart samples ``(x, y)`` with first and second arc-length derivatives and unit normal."""

    def __init__(self, pos, vel, acc, normal=None, kappa=None):
        self.pos = np.atleast_2d(np.asarray(pos, dtype=float))
        self.vel = np.atleast_2d(np.asarray(vel, dtype=float))
        self.acc = np.atleast_2d(np.asarray(acc, dtype=float))
        self.normal = None if normal is None else np.atleast_2d(np.asarray(normal, dtype=float))
        self.kappa = None if kappa is None else np.asarray(kappa, dtype=float)


def circle_cylinder(r0: float, a: float, n: int = 64) -> BaseCurve2D:
    """Coordinate circle ``x^2 + y^2 = r0^2`` traversed at unit base speed.

    Its geodesic curvature with respect to the inward normal is ``(1 - a r0^2) / r0``.
    """
    c = 1 + a * r0 * r0
    omega = c / r0  # unit speed in the metric (dx^2 + dy^2)/c^2
    s = np.arange(n) * (2 * math.pi / omega / n)
    th = omega * s
    pos = r0 * np.stack([np.cos(th), np.sin(th)], -1)
    vel = r0 * omega * np.stack([-np.sin(th), np.cos(th)], -1)
    acc = -r0 * omega**2 * np.stack([np.cos(th), np.sin(th)], -1)
    inward = -np.stack([np.cos(th), np.sin(th)], -1)
    return BaseCurve2D(pos, vel, acc, inward, np.full(n, (1 - a * r0 * r0) / r0))


def chart_curve(curve: SphereCurve, a: float) -> BaseCurve2D:
    """Image of a curve on ``S^2(4a)`` in the conformal chart of ``g_{a,b}``'s base.

    The chart is the stereographic projection from the north pole scaled by
    ``2R`` (``R`` the sphere radius), which is an isometry onto
    ``(dx^2 + dy^2) / (1 + a r^2)^2``.
    """
    R = 1 / math.sqrt(curve.rho)
    if not math.isclose(curve.rho, 4 * a, rel_tol=1e-12):
        raise ValueError("curve must lie on S^2(4a)")
    P, T, N = curve.points, curve.T, curve.N
    k = curve.kappa
    dT = k[:, None] * N - curve.rho * P
    den = R - P[:, 2]
    if np.min(den) < 1e-6 * R:
        raise ChartExit("curve passes through the projection pole")
    num, dnum, ddnum = 2 * R * P[:, :2], 2 * R * T[:, :2], 2 * R * dT[:, :2]
    dden, ddden = -T[:, 2], -dT[:, 2]
    pos = num / den[:, None]
    vel = (dnum * den[:, None] - num * dden[:, None]) / den[:, None] ** 2
    acc = (ddnum - 2 * vel * dden[:, None] - pos * ddden[:, None]) / den[:, None]
    nvel = (2 * R * N[:, :2] * den[:, None] + num * N[:, 2:3]) / den[:, None] ** 2
    return BaseCurve2D(pos, vel, acc, nvel, k)


def bcv_vertical_check(a, b, base: BaseCurve2D | SphereCurve, profile: CurvatureProfile | None = None, tol=1e-6):
    """Check ``H = kappa/2`` and ``2 R + Ric(eta, eta) = 4a`` on the cylinder over ``base``.

    The cylinder is ``(x(s), y(s), z = t)``.  ``H`` comes from the second
    fundamental form ``g(nabla_{X_i} X_j, eta)`` with Christoffel symbols of
    ``g_{a,b}``; ``R`` is the sectional curvature of the tangent plane and
    ``Ric`` the Ricci tensor of ``g_{a,b}``.  The unit normal is oriented to
    project onto the base curve's normal.  When ``base`` is a sphere curve and
    ``profile`` is given, the expected curvature is read from the profile.
    """
    kappa = None
    if isinstance(base, SphereCurve):
        if profile is not None:
            kappa = profile.kappa_at(base.s)
        base = chart_curve(base, a)
    if kappa is None:
        kappa = base.kappa
    r2 = np.sum(base.pos**2, axis=1)
    if np.any(1 + a * r2 <= 1e-9):
        raise ChartExit("base curve leaves the region 1 + a(x^2 + y^2) > 0")
    h_err, id_err = [], []
    for p, v, acc, nb, k in zip(base.pos, base.vel, base.acc, base.normal, kappa):
        g, gam, riem = bcv_geometry(p[0], p[1], a, b)
        Xs = np.array([v[0], v[1], 0.0])
        Xt = np.array([0.0, 0.0, 1.0])
        Xss = np.array([acc[0], acc[1], 0.0])
        # covariant second derivatives; the z-coordinate is linear in t
        D_ss = Xss + np.einsum("lij,i,j->l", gam, Xs, Xs)
        D_st = np.einsum("lij,i,j->l", gam, Xs, Xt)
        D_tt = np.einsum("lij,i,j->l", gam, Xt, Xt)
        I = np.array([[Xs @ g @ Xs, Xs @ g @ Xt], [Xt @ g @ Xs, Xt @ g @ Xt]])
        # normal: g-orthogonal to Xs, Xt
        gi = np.linalg.inv(g)
        eta = gi @ np.cross(Xs, Xt)
        eta /= math.sqrt(eta @ g @ eta)
        ref = np.array([nb[0], nb[1], 0.0])
        if (eta @ g @ ref) < 0:
            eta = -eta
        II = np.array([[D_ss @ g @ eta, D_st @ g @ eta], [D_st @ g @ eta, D_tt @ g @ eta]])
        H = 0.5 * np.trace(np.linalg.solve(I, II))
        h_err.append(abs(H - 0.5 * k))
        # lowered curvature tensor Rm(X, Y, Z, W) = g(R(X, Y) Z, W)
        Rm = np.einsum("lm,mijk->jkil", g, riem)  # indices (X=j, Y=k, Z=i, W=l)
        sec = np.einsum("abcd,a,b,c,d->", Rm, Xs, Xt, Xt, Xs) / np.linalg.det(I)
        ric = np.einsum("jijk->ik", riem)
        id_err.append(abs(2 * sec + eta @ ric @ eta - 4 * a))
    rep = Report("BCV vertical cylinder")
    rep.meta.update(a=float(a), b=float(b), samples=len(h_err))
    rep.add("max_abs_H_minus_half_kappa", max(h_err), tol, "H = kappa/2")
    rep.add("max_abs_2R_plus_Ric_minus_KB", max(id_err), tol, "2R + Ric(eta, eta) = K_B = 4a")
    return rep

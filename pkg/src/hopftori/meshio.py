"""Structured torus meshes, stereographic projection, curvature estimates and export."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np

from ._numerics import cross4, fd_derivative, fornberg_weights
from .errors import AtPole, DegenerateCell

__all__ = [
    "TorusMesh",
    "ProjectedMesh",
    "Curvatures",
    "stereographic",
    "project_mesh",
    "quad_faces",
    "discrete_curvatures",
    "metric_gauss_curvature",
    "export",
    "mesh_to_obj",
    "columns_to_text",
]

EPS_POLE = 1e-3


@dataclass(eq=False)
class TorusMesh:
    """Vertices ``y(s_j, t_k)`` on a uniform ``(n_s, n_t)`` grid.

    ``t`` always wraps with period ``t_length``.  Along ``s`` the grid wraps
    after ``s_length`` through ``seam``: the (virtual) row ``n_s + j`` equals
    ``seam @ y[j]``.  ``seam=None`` means the identity; ``s_closed=False``
    marks an open strip.  ``radius`` is the radius of the ambient 3-sphere
    (``None`` for meshes in flat 3-space).
    """

    vertices: np.ndarray
    s_length: float
    t_length: float
    radius: float | None = None
    seam: np.ndarray | None = None
    s_closed: bool = True
    fields: dict = field(default_factory=dict)

    @property
    def shape(self) -> tuple[int, int]:
        return self.vertices.shape[:2]

    @property
    def s(self) -> np.ndarray:
        return np.arange(self.shape[0]) * (self.s_length / self.shape[0])

    @property
    def t(self) -> np.ndarray:
        return np.arange(self.shape[1]) * (self.t_length / self.shape[1])

    @property
    def h_s(self) -> float:
        n = self.shape[0]
        return self.s_length / (n if self.s_closed else n - 1)

    @property
    def h_t(self) -> float:
        return self.t_length / self.shape[1]

    def seam_shift(self) -> int | None:
        """Integer ``t``-index shift realizing the seam, if it is a grid symmetry."""
        if self.seam is None:
            return 0
        y0 = self.vertices[0]
        mapped = y0 @ self.seam.T
        for k in range(self.shape[1]):
            if np.max(np.abs(np.roll(y0, -k, axis=0) - mapped)) < 1e-9 * max(1.0, np.abs(y0).max()):
                return k
        return None


@dataclass(eq=False)
class ProjectedMesh:
    vertices: np.ndarray
    faces: np.ndarray
    pole: np.ndarray | None
    source: TorusMesh

    def euler_characteristic(self) -> int:
        V = self.vertices.shape[0] * self.vertices.shape[1]
        F = len(self.faces)
        edges = set()
        for f in self.faces:
            for a, b in zip(f, np.roll(f, -1)):
                edges.add((min(a, b), max(a, b)))
        return V - len(edges) + F


class Curvatures(NamedTuple):
    H: np.ndarray
    K_ext: np.ndarray
    K_intr: np.ndarray
    normal: np.ndarray
    g: np.ndarray
    h: np.ndarray


# ---------------------------------------------------------------------------------------
# projection
# ---------------------------------------------------------------------------------------


def _complement_basis(pole):
    """Orthonormal basis (rows) of the hyperplane orthogonal to ``pole``."""
    pole = np.asarray(pole, dtype=float)
    if np.allclose(pole, [0, 0, 0, 1]):
        return np.eye(4)[:3]
    q, _ = np.linalg.qr(np.column_stack([pole, np.eye(4)]))
    return q[:, 1:4].T


def stereographic(p, pole=(0.0, 0.0, 0.0, 1.0), radius: float | None = None):
    """Stereographic projection of points of ``S^3(r)`` from ``r * pole``.

    Returns coordinates in the equatorial 3-plane orthogonal to ``pole``; for the
    default pole these are simply the first three coordinates.
    """
    p = np.asarray(p, dtype=float)
    pole = np.asarray(pole, dtype=float)
    pole = pole / np.linalg.norm(pole)
    r = float(np.linalg.norm(p, axis=-1).max()) if radius is None else float(radius)
    c = p @ pole
    if np.any(c / r > 1 - EPS_POLE):
        raise AtPole("point within the pole guard of the projection pole")
    q = r * (p - c[..., None] * pole) / (r - c)[..., None]
    return q @ _complement_basis(pole).T


def quad_faces(n_s: int, n_t: int, shift: int = 0, s_closed: bool = True) -> np.ndarray:
    """Quad faces (0-based) of an ``n_s x n_t`` grid wrapping in both directions.

    The last row connects to the first with a ``t``-index ``shift``.
    """
    j, k = np.meshgrid(np.arange(n_s if s_closed else n_s - 1), np.arange(n_t), indexing="ij")
    j, k = j.ravel(), k.ravel()
    jn = (j + 1) % n_s
    wrap = (j + 1) == n_s
    kk = np.where(wrap, (k + shift) % n_t, k)
    kk1 = np.where(wrap, (k + 1 + shift) % n_t, (k + 1) % n_t)
    return np.stack([j * n_t + k, jn * n_t + kk, jn * n_t + kk1, j * n_t + (k + 1) % n_t], axis=1)


def project_mesh(mesh: TorusMesh, pole=None, seed: int = 0) -> ProjectedMesh:
    """Stereographic image of a mesh in ``S^3``; meshes in 3-space pass through.

    If a vertex comes within the pole guard, the pole is re-drawn from a
    seeded random rotation so repeated runs give identical output.
    """
    shift = mesh.seam_shift()
    if shift is None:
        shift = 0
    faces = quad_faces(*mesh.shape, shift, mesh.s_closed)
    if mesh.radius is None:
        return ProjectedMesh(mesh.vertices.copy(), faces, None, mesh)
    pole = np.array([0.0, 0.0, 0.0, 1.0]) if pole is None else np.asarray(pole, dtype=float)
    rng = np.random.default_rng(seed)
    for _ in range(64):
        try:
            v = stereographic(mesh.vertices, pole, mesh.radius)
            return ProjectedMesh(v, faces, pole, mesh)
        except AtPole:
            pole = rng.normal(size=4)
            pole /= np.linalg.norm(pole)
    raise AtPole("could not find a pole away from the mesh")


# ---------------------------------------------------------------------------------------
# curvature estimation
# ---------------------------------------------------------------------------------------


def _stencil(deriv, accuracy):
    half = (accuracy + deriv - 1) // 2
    offs = np.arange(-half, half + 1)
    return offs, fornberg_weights(0.0, offs, deriv)[:, deriv]


def _with_ghosts(mesh, g):
    y = mesh.vertices
    seam = np.eye(y.shape[-1]) if mesh.seam is None else mesh.seam
    inv = np.linalg.inv(seam)
    top = y[:g] @ seam.T
    bottom = y[-g:] @ inv.T
    return np.concatenate([bottom, y, top], axis=0)


def _d_s(mesh, ext, g, deriv, accuracy):
    offs, w = _stencil(deriv, accuracy)
    n = mesh.shape[0]
    out = np.zeros_like(mesh.vertices)
    for o, wk in zip(offs, w):
        out += wk * ext[g + o : g + o + n]
    return out / mesh.h_s**deriv


def _d_s_open(y, h, deriv, accuracy):
    return fd_derivative(y, h, deriv, axis=0, periodic=False, accuracy=accuracy)


def _d_t(y, h, deriv, accuracy):
    offs, w = _stencil(deriv, accuracy)
    out = np.zeros_like(y)
    for o, wk in zip(offs, w):
        out += wk * np.roll(y, -o, axis=1)
    return out / h**deriv


def discrete_curvatures(
    mesh: TorusMesh,
    accuracy: int = 2,
    reference=None,
    allow_degenerate: bool = False,
    min_area: float = 1e-14,
) -> Curvatures:
    """Per-vertex mean and Gauss curvature from finite-difference fundamental forms.

    Derivatives along both grid directions use centred stencils of the given
    order (2 by default).  For meshes on a 3-sphere the unit normal is taken
    inside the sphere's tangent space, so ``H`` and ``K_ext`` are relative to
    the sphere and ``K_intr = K_ext + 1/r**2``.  If ``reference`` (same shape
    as the vertices) is given, normals are flipped to have positive inner
    product with it.
    """
    y = mesh.vertices
    ht = mesh.h_t
    if mesh.s_closed:
        g_rows = accuracy // 2 + 1
        ext = _with_ghosts(mesh, g_rows)
        ys = _d_s(mesh, ext, g_rows, 1, accuracy)
        yss = _d_s(mesh, ext, g_rows, 2, accuracy)
        yt_ext = _d_t(ext, ht, 1, accuracy)
        yst = _d_s(mesh, yt_ext, g_rows, 1, accuracy)
    else:
        ys = _d_s_open(y, mesh.h_s, 1, accuracy)
        yss = _d_s_open(y, mesh.h_s, 2, accuracy)
        yst = _d_s_open(_d_t(y, ht, 1, accuracy), mesh.h_s, 1, accuracy)
    yt = _d_t(y, ht, 1, accuracy)
    ytt = _d_t(y, ht, 2, accuracy)

    if y.shape[-1] == 4:
        nrm = cross4(y, ys, yt)
    else:
        nrm = np.cross(ys, yt)
    E = np.einsum("...i,...i", ys, ys)
    F = np.einsum("...i,...i", ys, yt)
    G = np.einsum("...i,...i", yt, yt)
    det_g = E * G - F * F
    bad = det_g <= min_area * np.max(det_g)
    if np.any(bad) and not allow_degenerate:
        raise DegenerateCell(f"{int(bad.sum())} grid cells have vanishing area")
    norm = np.linalg.norm(nrm, axis=-1, keepdims=True)
    with np.errstate(invalid="ignore", divide="ignore"):
        eta = nrm / norm
    if reference is not None:
        sign = np.sign(np.einsum("...i,...i", eta, reference))
        sign[sign == 0] = 1.0
        eta = eta * sign[..., None]
    L = np.einsum("...i,...i", yss, eta)
    M = np.einsum("...i,...i", yst, eta)
    N = np.einsum("...i,...i", ytt, eta)
    with np.errstate(invalid="ignore", divide="ignore"):
        H = (L * G - 2 * M * F + N * E) / (2 * det_g)
        K = (L * N - M * M) / det_g
    H = np.where(bad, np.nan, H)
    K = np.where(bad, np.nan, K)
    K_intr = K + (0.0 if mesh.radius is None else 1.0 / mesh.radius**2)
    g = np.stack([E, F, G], axis=-1)
    h = np.stack([L, M, N], axis=-1)
    return Curvatures(H, K, K_intr, eta, g, h)


def metric_gauss_curvature(mesh: TorusMesh, g: np.ndarray, accuracy: int = 4) -> np.ndarray:
    """Intrinsic Gauss curvature from the metric alone (Brioschi formula).

    ``g`` holds ``(E, F, G)`` per vertex, e.g. ``discrete_curvatures(...).g``.
    Because the seam map is an isometry, the metric coefficients are periodic
    in ``s`` even when the vertices are not.
    """
    E, F, G = g[..., 0], g[..., 1], g[..., 2]
    hs, ht = mesh.h_s, mesh.h_t

    def ds(a, k=1):
        return fd_derivative(a, hs, k, axis=0, periodic=mesh.s_closed, accuracy=accuracy)

    def dt(a, k=1):
        return fd_derivative(a, ht, k, axis=1, periodic=True, accuracy=accuracy)

    Es, Et, Fs, Ft, Gs, Gt = ds(E), dt(E), ds(F), dt(F), ds(G), dt(G)
    top = -0.5 * dt(E, 2) + dt(Fs) - 0.5 * ds(G, 2)
    M1 = np.stack(
        [
            np.stack([top, 0.5 * Es, Fs - 0.5 * Et], -1),
            np.stack([Ft - 0.5 * Gs, E, F], -1),
            np.stack([0.5 * Gt, F, G], -1),
        ],
        -2,
    )
    zero = np.zeros_like(E)
    M2 = np.stack(
        [
            np.stack([zero, 0.5 * Et, 0.5 * Gs], -1),
            np.stack([0.5 * Et, E, F], -1),
            np.stack([0.5 * Gs, F, G], -1),
        ],
        -2,
    )
    with np.errstate(invalid="ignore", divide="ignore"):
        return (np.linalg.det(M1) - np.linalg.det(M2)) / (E * G - F * F) ** 2


# ---------------------------------------------------------------------------------------
# export
# ---------------------------------------------------------------------------------------


def mesh_to_obj(pm: ProjectedMesh, header: dict | None = None) -> str:
    lines = [f"# {k}={_fmt(v)}" for k, v in (header or {}).items()]
    v = pm.vertices.reshape(-1, pm.vertices.shape[-1])
    lines += [f"v {a:.17g} {b:.17g} {c:.17g}" for a, b, c in v]
    lines += ["f " + " ".join(str(i + 1) for i in f) for f in pm.faces]
    return "\n".join(lines) + "\n"


def columns_to_text(columns: dict, header: dict | None = None) -> str:
    """Whitespace-separated columns with ``#`` header lines."""
    lines = [f"# {k}={_fmt(v)}" for k, v in (header or {}).items()]
    names = list(columns)
    arrs = [np.asarray(columns[k], dtype=float).ravel() for k in names]
    lines.append("# columns: " + " ".join(names))
    for row in zip(*arrs):
        lines.append(" ".join(f"{x:.17g}" for x in row))
    return "\n".join(lines) + "\n"


def _fmt(v):
    return f"{v:.17g}" if isinstance(v, float) else str(v)


def export(artifact, fmt: str, path, header: dict | None = None) -> Path:
    """Write a curve, mesh, column table or report to ``path``.

    ``fmt`` is one of ``obj``, ``columns`` or ``report``.  I/O failures are
    re-raised with the path attached.
    """
    from .curves import SphereCurve
    from .report import Report

    fmt = fmt.lower()
    if fmt == "obj":
        if isinstance(artifact, SphereCurve):
            text = artifact.to_obj()
        elif isinstance(artifact, ProjectedMesh):
            text = mesh_to_obj(artifact, header)
        elif isinstance(artifact, TorusMesh):
            text = mesh_to_obj(project_mesh(artifact), header)
        else:
            raise TypeError(f"cannot write {type(artifact).__name__} as OBJ")
    elif fmt in ("columns", "columnar", "columnar-text"):
        if isinstance(artifact, dict):
            text = columns_to_text(artifact, header)
        elif hasattr(artifact, "to_text"):
            text = artifact.to_text()
        else:
            raise TypeError(f"cannot write {type(artifact).__name__} as columns")
    elif fmt == "report":
        if not isinstance(artifact, Report):
            raise TypeError("report format needs a Report")
        text = artifact.to_text()
    else:
        raise ValueError(f"unknown export format {fmt!r}")
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    except OSError as exc:
        raise OSError(f"{path}: {exc}") from exc
    return path

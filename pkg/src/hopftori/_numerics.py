"""Small numerical kernels shared by the geometry modules."""

from __future__ import annotations

import math

import numpy as np

_SQ15 = math.sqrt(15.0)
GAUSS3_NODES = np.array([0.5 - _SQ15 / 10, 0.5, 0.5 + _SQ15 / 10])


def _comm(a, b):
    return a @ b - b @ a


def magnus6(A1, A2, A3, h, right=False):
    """Sixth-order Magnus generator for one step of ``Y' = A(t) Y``.

    ``A1, A2, A3`` hold ``A`` at the three Gauss-Legendre nodes of each step,
    stacked along the leading axis.  With ``right=True`` the generator is for
    ``Y' = Y A(t)`` (commutators change sign).
    """
    sgn = -1.0 if right else 1.0
    a1 = h * A2
    a2 = (_SQ15 * h / 3.0) * (A3 - A1)
    a3 = (10.0 * h / 3.0) * (A3 - 2.0 * A2 + A1)
    c1 = sgn * _comm(a1, a2)
    c2 = -sgn / 60.0 * _comm(a1, 2.0 * a3 + c1)
    return a1 + a3 / 12.0 + sgn / 240.0 * _comm(-20.0 * a1 - a3 + c1, a2 + c2)


def expm_so3(W):
    """Rodrigues exponential of a stack of skew 3x3 matrices."""
    w = np.stack([W[..., 2, 1], W[..., 0, 2], W[..., 1, 0]], axis=-1)
    th = np.linalg.norm(w, axis=-1)[..., None, None]
    small = th < 1e-6
    th2 = th * th
    # series below 1e-6 avoids 0/0
    s = np.where(small, 1.0 - th2 / 6.0, np.sin(th) / np.where(small, 1.0, th))
    c = np.where(small, 0.5 - th2 / 24.0, (1.0 - np.cos(th)) / np.where(small, 1.0, th2))
    eye = np.broadcast_to(np.eye(3), W.shape)
    return eye + s * W + c * (W @ W)


def expm_se2(X):
    """Exponential of a stack of se(2) matrices ``[[0,-th,vx],[th,0,vy],[0,0,0]]``."""
    th = X[..., 1, 0]
    v = X[..., :2, 2]
    small = np.abs(th) < 1e-6
    ths = np.where(small, 1.0, th)
    s = np.where(small, 1.0 - th**2 / 6.0, np.sin(th) / ths)
    c = np.where(small, th / 2.0 - th**3 / 24.0, (1.0 - np.cos(th)) / ths)
    out = np.zeros(X.shape)
    ct, st = np.cos(th), np.sin(th)
    out[..., 0, 0] = ct
    out[..., 0, 1] = -st
    out[..., 1, 0] = st
    out[..., 1, 1] = ct
    out[..., 0, 2] = s * v[..., 0] - c * v[..., 1]
    out[..., 1, 2] = c * v[..., 0] + s * v[..., 1]
    out[..., 2, 2] = 1.0
    return out


def fornberg_weights(z, x, m):
    """Finite-difference weights for derivatives ``0..m`` at ``z`` on nodes ``x``."""
    x = np.asarray(x, dtype=float)
    n = len(x)
    c = np.zeros((n, m + 1))
    c1, c4 = 1.0, x[0] - z
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, m)
        c2, c5, c4 = 1.0, c4, x[i] - z
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c


def fd_derivative(y, h, deriv=1, axis=0, periodic=False, accuracy=6):
    """Finite-difference derivative of uniformly sampled data along ``axis``.

    Central stencils of the requested accuracy in the interior; one-sided
    stencils of the same width near the ends when not periodic.
    """
    y = np.moveaxis(np.asarray(y, dtype=float), axis, 0)
    n = y.shape[0]
    half = (accuracy + deriv - 1) // 2
    width = 2 * half + 1
    if n < width:
        raise ValueError("not enough samples for the requested stencil")
    offsets = np.arange(-half, half + 1)
    w = fornberg_weights(0.0, offsets, deriv)[:, deriv] / h**deriv
    if periodic:
        out = sum(wk * np.roll(y, -k, axis=0) for wk, k in zip(w, offsets))
    else:
        out = np.zeros_like(y)
        inner = slice(half, n - half)
        for wk, k in zip(w, offsets):
            out[inner] += wk * y[half + k : n - half + k]
        for i in list(range(half)) + list(range(n - half, n)):
            start = min(max(i - half, 0), n - width)
            nodes = np.arange(start, start + width)
            wi = fornberg_weights(float(i), nodes.astype(float), deriv)[:, deriv] / h**deriv
            out[i] = np.tensordot(wi, y[nodes], axes=(0, 0))
    return np.moveaxis(out, 0, axis)


def spectral_derivative(y, period, deriv=1, axis=0):
    """Fourier derivative of samples of a smooth periodic function."""
    y = np.asarray(y, dtype=float)
    n = y.shape[axis]
    k = 2.0 * np.pi * np.fft.rfftfreq(n, d=period / n)
    mult = (1j * k) ** deriv
    if deriv % 2 == 1 and n % 2 == 0:
        mult[-1] = 0.0
    shape = [1] * y.ndim
    shape[axis] = mult.size
    f = np.fft.rfft(y, axis=axis) * mult.reshape(shape)
    return np.fft.irfft(f, n=n, axis=axis)


def periodic_antiderivative(y, period, axis=0):
    """Spectral cumulative integral of periodic samples.

    Returns ``(F, mean)`` where ``F(s) = int_0^s (y - mean)`` is periodic; the full
    integral is ``F + mean * s``.
    """
    y = np.moveaxis(np.asarray(y, dtype=float), axis, -1)
    n = y.shape[-1]
    f = np.fft.rfft(y, axis=-1)
    k = 2.0 * np.pi * np.fft.rfftfreq(n, d=period / n)
    mean = f[..., 0].real / n
    g = np.zeros_like(f)
    g[..., 1:] = f[..., 1:] / (1j * k[1:])
    if n % 2 == 0:
        g[..., -1] = 0.0
    F = np.fft.irfft(g, n=n, axis=-1)
    F = F - F[..., :1]
    return np.moveaxis(F, -1, axis), mean


def cross4(a, b, c):
    """Vector orthogonal to three vectors in R^4 (generalized cross product)."""
    M = np.stack([a, b, c], axis=-2)
    out = np.empty(M.shape[:-2] + (4,))
    cols = [0, 1, 2, 3]
    for j in range(4):
        keep = [k for k in cols if k != j]
        out[..., j] = (-1) ** (j + 1) * np.linalg.det(M[..., keep])
    return out


def normalize(v, axis=-1):
    return v / np.linalg.norm(v, axis=axis, keepdims=True)

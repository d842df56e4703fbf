"""Critical curvature profiles ``kappa(s)`` of ``int P(kappa) ds`` on ``B(rho)``.

A critical curve satisfies

    P'_ss + P' (kappa**2 + rho) - kappa P = 0,

whose first integral is ``P'_s**2 + (kappa P' - P)**2 + rho P'**2 = d``.  The
extended Blaschke and total-curvature-type energies have explicit periodic
solutions; every other catalog member is integrated numerically between two
turning points of the first integral.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate, optimize

from ._numerics import spectral_derivative
from .energy import EnergyKind, EnergySpec
from .errors import NoOscillation, ParameterError, QuadratureFailure, SingularDenominator

__all__ = [
    "CurvatureProfile",
    "blaschke_profile",
    "total_curvature_profile",
    "constant_profile",
    "solve_profile",
    "el_residual",
    "first_integral_check",
    "first_integral_values",
]


@dataclass(frozen=True, eq=False)
class CurvatureProfile:
    """One period of a critical curvature on a uniform arc-length grid.

    ``kappa_fn(s)`` evaluates ``(kappa, kappa_s)`` anywhere (the profile is
    extended periodically), which is what the curve integrators consume.
    ``s_min`` is the arc length of the curvature minimum inside ``[0, period)``.
    """

    spec: EnergySpec
    rho: float
    d: float
    period: float
    s: np.ndarray
    kappa: np.ndarray
    kappa_s: np.ndarray
    closed_form: bool
    kappa_fn: Callable = field(repr=False)
    kappa_ss_fn: Callable | None = field(default=None, repr=False)
    s_min: float = 0.0
    constant: bool = False

    @property
    def n_samples(self) -> int:
        return self.s.size

    @property
    def kappa_range(self) -> tuple[float, float]:
        return float(self.kappa.min()), float(self.kappa.max())

    def kappa_at(self, s):
        return self.kappa_fn(np.asarray(s, dtype=float))[0]

    def resample(self, n_samples: int) -> "CurvatureProfile":
        s = np.arange(n_samples) * (self.period / n_samples)
        k, ks = self.kappa_fn(s)
        return _replace_samples(self, s, k, ks)

    def dP_ss(self) -> np.ndarray:
        """Second arc-length derivative of ``P'(kappa(s))`` at the samples.

        Closed forms use the chain rule with analytic curvature derivatives;
        numerically integrated profiles use Fourier differentiation.
        """
        if self.constant:
            return np.zeros_like(self.kappa)
        if self.kappa_ss_fn is not None:
            _, _, ddP, dddP = self.spec.derivatives(self.kappa)
            return ddP * self.kappa_ss_fn(self.s) + dddP * self.kappa_s**2
        dP = self.spec.derivatives(self.kappa)[1]
        return spectral_derivative(dP, self.period, 2)

    def to_text(self) -> str:
        sp = self.spec
        head = [
            f"# kind={sp.kind.value}",
            f"# lambda={sp.lam:.17g}",
        ]
        if sp.q is not None:
            head.append(f"# q={sp.q:.17g}")
        if sp.epsilon is not None:
            head.append(f"# epsilon={sp.epsilon:d}")
        head += [
            f"# rho={self.rho:.17g}",
            f"# d={self.d:.17g}",
            f"# L={self.period:.17g}",
            "# columns: s kappa kappa_s",
        ]
        rows = [f"{a:.17g} {b:.17g} {c:.17g}" for a, b, c in zip(self.s, self.kappa, self.kappa_s)]
        return "\n".join(head + rows) + "\n"


def _replace_samples(p, s, k, ks):
    return CurvatureProfile(
        spec=p.spec, rho=p.rho, d=p.d, period=p.period, s=s, kappa=k, kappa_s=ks,
        closed_form=p.closed_form, kappa_fn=p.kappa_fn, kappa_ss_fn=p.kappa_ss_fn,
        s_min=p.s_min, constant=p.constant,
    )


def _grid(period, n_samples):
    if n_samples < 16:
        raise ParameterError("n_samples must be at least 16")
    return np.arange(n_samples) * (period / n_samples)


def first_integral_values(spec: EnergySpec, rho: float, kappa, kappa_s):
    """``P'_s**2 + (kappa P' - P)**2 + rho P'**2`` pointwise."""
    P, dP, ddP, _ = spec.derivatives(kappa)
    return (ddP * kappa_s) ** 2 + (kappa * dP - P) ** 2 + rho * dP**2


def constant_profile(spec, rho, kappa0, n_samples=64, period=None) -> CurvatureProfile:
    """Constant curvature ``kappa0``, flagged; its default period is the circle length."""
    spec.check_domain(kappa0)
    if period is None:
        kr = kappa0 * kappa0 + rho
        if kr <= 0:
            raise ParameterError("constant curvature does not close: kappa0**2 + rho <= 0")
        period = 2 * math.pi / math.sqrt(kr)
    s = _grid(period, n_samples)
    P, dP, _, _ = spec.derivatives(kappa0)
    d = float((kappa0 * dP - P) ** 2 + rho * dP**2)

    def fn(x):
        x = np.asarray(x, dtype=float)
        return np.full_like(x, kappa0), np.zeros_like(x)

    return CurvatureProfile(
        spec=spec, rho=float(rho), d=d, period=float(period), s=s,
        kappa=np.full(n_samples, float(kappa0)), kappa_s=np.zeros(n_samples),
        closed_form=True, kappa_fn=fn, kappa_ss_fn=lambda x: np.zeros_like(np.asarray(x, float)),
        s_min=0.0, constant=True,
    )


def blaschke_profile(rho, lam, d, n_samples=2048, allow_constant=False) -> CurvatureProfile:
    """Periodic curvature of extended Blaschke critical curves.

    ``kappa(s) = (rho + lam**2) / (2d + lam - R sin(w s)) + lam`` with
    ``R = sqrt(4d**2 + 4 lam d - rho)``, ``w = 2 sqrt(rho + lam**2)`` and period
    ``2 pi / w``.
    """
    rho, lam, d = float(rho), float(lam), float(d)
    A = rho + lam * lam
    if A <= 0:
        raise ParameterError("need rho + lam**2 > 0")
    disc = 4 * d * d + 4 * lam * d - rho
    d_low = (-lam + math.sqrt(A)) / 2
    spec = EnergySpec.extended_blaschke(lam)
    if disc < 0:
        raise ParameterError("need 4d**2 + 4 lam d - rho >= 0")
    if d <= d_low:
        if allow_constant and math.isclose(d, d_low, rel_tol=0, abs_tol=1e-14 * max(1, abs(d))):
            k0 = A / (2 * d + lam) + lam
            return constant_profile(spec, rho, k0, n_samples, period=math.pi / math.sqrt(A))
        raise ParameterError(f"need d > (-lam + sqrt(rho + lam**2))/2 = {d_low!r}")
    R = math.sqrt(disc)
    w = 2 * math.sqrt(A)
    c0 = 2 * d + lam
    period = 2 * math.pi / w

    def fn(s):
        s = np.asarray(s, dtype=float)
        sn, cs = np.sin(w * s), np.cos(w * s)
        D = c0 - R * sn
        return A / D + lam, A * R * w * cs / D**2

    def fn_ss(s):
        s = np.asarray(s, dtype=float)
        sn, cs = np.sin(w * s), np.cos(w * s)
        D = c0 - R * sn
        return A * R * w * w * (-sn / D**2 + 2 * R * cs * cs / D**3)

    s = _grid(period, n_samples)
    k, ks = fn(s)
    return CurvatureProfile(
        spec=spec, rho=rho, d=d, period=period, s=s, kappa=k, kappa_s=ks,
        closed_form=True, kappa_fn=fn, kappa_ss_fn=fn_ss, s_min=0.75 * period,
    )


def total_curvature_profile(rho, lam, d, epsilon=1, n_samples=2048) -> CurvatureProfile:
    """Signed periodic curvature of total-curvature-type critical curves.

    With ``c = epsilon*d - lam`` and ``w = sqrt(rho - lam)``,
    ``kappa(s) = sin(w s) sqrt(lam c / (rho - lam - c sin(w s)**2))``, the smooth
    branch through the zeros of ``kappa``.
    """
    rho, lam, d = float(rho), float(lam), float(d)
    spec = EnergySpec.total_curvature(lam, epsilon)
    eps = spec.epsilon
    if not lam < rho:
        raise ParameterError("need lam < rho")
    c = eps * d - lam
    if c == 0:
        raise ParameterError("need d != epsilon*lam")
    if lam * c <= 0:
        raise ParameterError("need lam*(epsilon*d - lam) > 0 for a real curvature")
    gap = rho - lam
    if c >= gap:
        raise SingularDenominator(
            f"denominator rho - lam - (epsilon d - lam) sin^2 vanishes (c={c!r} >= {gap!r})"
        )
    w = math.sqrt(gap)
    amp = math.sqrt(lam * c)
    period = 2 * math.pi / w

    def fn(s):
        s = np.asarray(s, dtype=float)
        sn, cs = np.sin(w * s), np.cos(w * s)
        F = gap - c * sn * sn
        return amp * sn / np.sqrt(F), amp * w * gap * cs / F**1.5

    def fn_ss(s):
        s = np.asarray(s, dtype=float)
        sn, cs = np.sin(w * s), np.cos(w * s)
        F = gap - c * sn * sn
        return amp * w * w * gap * (-sn / F**1.5 + 3 * c * sn * cs * cs / F**2.5)

    s = _grid(period, n_samples)
    k, ks = fn(s)
    spec.check_domain(k)
    return CurvatureProfile(
        spec=spec, rho=rho, d=d, period=period, s=s, kappa=k, kappa_s=ks,
        closed_form=True, kappa_fn=fn, kappa_ss_fn=fn_ss, s_min=0.75 * period,
    )


# ---------------------------------------------------------------------------------------
# numerical profiles
# ---------------------------------------------------------------------------------------


def _potential(spec, rho, kappa):
    P, dP, _, _ = spec.derivatives(kappa)
    return (kappa * dP - P) ** 2 + rho * dP**2


def _potential_slope(spec, rho, kappa):
    P, dP, ddP, _ = spec.derivatives(kappa)
    return 2 * ddP * (kappa * (kappa * dP - P) + rho * dP)


def _scan_grid(spec, rho, d, search):
    if search is not None:
        lo, hi = search
        return np.linspace(lo, hi, 20001)[1:-1]
    big = 1e3 * (1 + abs(spec.lam) + abs(d) + abs(rho))
    pieces = []
    for lo, hi in spec.kappa_domain:
        if math.isinf(lo) and math.isinf(hi):
            pieces.append(big * np.sinh(np.linspace(-12, 12, 24001)) / math.sinh(12))
            continue
        if math.isinf(hi):
            pieces.append(lo + np.geomspace(1e-10 * (1 + abs(lo)), big, 24000))
        elif math.isinf(lo):
            pieces.append(hi - np.geomspace(1e-10 * (1 + abs(hi)), big, 24000)[::-1])
        else:
            t = np.linspace(-1, 1, 24001)[1:-1]
            mid, half = (lo + hi) / 2, (hi - lo) / 2
            pieces.append(mid + half * np.sin(np.pi * t / 2))
    return np.concatenate(pieces)


def _find_well(spec, rho, d, kappa_hint, search):
    grid = _scan_grid(spec, rho, d, search)
    grid = grid[spec.in_domain(grid)]
    with np.errstate(all="ignore"):
        V = _potential(spec, rho, grid)
    V = np.where(np.isfinite(V), V, np.inf)
    if kappa_hint is not None:
        candidates = [int(np.argmin(np.abs(grid - kappa_hint)))]
        if not V[candidates[0]] < d:
            raise NoOscillation(f"first integral d={d!r} is below the potential at the hint")
    else:
        interior = np.nonzero((V[1:-1] <= V[:-2]) & (V[1:-1] <= V[2:]) & (V[1:-1] < d))[0] + 1
        if interior.size == 0:
            raise NoOscillation(f"d={d!r} does not exceed any local minimum of the potential")
        candidates = interior[np.argsort(V[interior])]
    above = V >= d
    for i0 in candidates:
        left = np.nonzero(above[:i0])[0]
        right = np.nonzero(above[i0 + 1 :])[0]
        if left.size == 0 or right.size == 0:
            continue
        il, ir = left[-1], i0 + 1 + right[0]
        # the sub-level interval must stay inside one domain component
        if np.all(spec.in_domain(np.linspace(grid[il + 1], grid[ir - 1], 257))):
            break
    else:
        raise NoOscillation("no bounded sub-level interval of the first integral in the domain")

    def f(k):
        return _potential(spec, rho, k) - d

    kmin = optimize.brentq(f, grid[il], grid[il + 1], xtol=1e-15, rtol=1e-15, maxiter=200)
    kmax = optimize.brentq(f, grid[ir - 1], grid[ir], xtol=1e-15, rtol=1e-15, maxiter=200)
    return kmin, kmax


def solve_profile(spec: EnergySpec, rho, d, n_samples=2048, kappa_hint=None, search=None):
    """Numerically integrated periodic critical curvature.

    Turning points ``kappa_min < kappa_max`` solve ``(kappa P' - P)**2 + rho P'**2 = d``.
    The period is twice ``int |P''| dkappa / sqrt(d - V(kappa))`` over the well,
    computed after the substitution ``kappa = kappa_min + (kappa_max - kappa_min) sin^2(theta)``
    which removes the endpoint singularities.  The curvature itself comes from the
    second-order critical-curve equation integrated from ``kappa_min`` to
    ``kappa_max`` and reflected about the half period, so ``s = 0`` is the minimum.

    ``kappa_hint`` selects the well containing that curvature when several exist;
    ``search`` restricts the scan for turning points to an interval.
    """
    rho, d = float(rho), float(d)
    kmin, kmax = _find_well(spec, rho, d, kappa_hint, search)
    span = kmax - kmin
    if span <= 1e-12 * max(1.0, abs(kmax)):
        raise NoOscillation("degenerate well (constant-curvature critical point)")
    for k_end in (kmin, kmax):
        if abs(_potential_slope(spec, rho, k_end)) < 1e-12 * max(1.0, abs(d)):
            raise NoOscillation("turning point is not simple (separatrix)")
    inner = kmin + span * np.sin(np.linspace(0, np.pi / 2, 513)[1:-1]) ** 2
    if np.any(spec.derivatives(inner)[2] == 0):
        raise NoOscillation("P'' vanishes inside the well")

    def dsdtheta(theta):
        st, ct = math.sin(theta), math.cos(theta)
        k = kmin + span * st * st
        ddP = abs(spec.derivatives(k)[2])
        gap = d - _potential(spec, rho, k)
        if gap <= 0:
            # only reachable within rounding of the turning points
            gap = abs(_potential_slope(spec, rho, k)) * span * min(st, ct) ** 2 + 1e-300
        return 2 * span * st * ct * ddP / math.sqrt(gap)

    half, err = integrate.quad(dsdtheta, 0.0, math.pi / 2, epsabs=1e-14, epsrel=1e-13, limit=400)
    if not np.isfinite(half) or err > 1e-9 * max(1.0, half):
        raise QuadratureFailure(f"half-period quadrature did not converge (error {err!r})")
    period = 2 * half

    def rhs(_, y):
        k, ks = y
        P, dP, ddP, dddP = spec.derivatives(k)
        return [ks, (k * P - dP * (k * k + rho) - dddP * ks * ks) / ddP]

    sol = integrate.solve_ivp(
        rhs, (0.0, half), [kmin, 0.0], method="DOP853", rtol=1e-13,
        atol=1e-14 * max(1.0, abs(kmax)), dense_output=True,
    )
    if not sol.success:
        raise QuadratureFailure(sol.message)
    k_end, ks_end = sol.y[:, -1]
    if abs(k_end - kmax) > 1e-7 * max(1.0, span) or abs(ks_end) > 1e-5 * max(1.0, span / half):
        raise QuadratureFailure(
            "integrated curvature misses the upper turning point "
            f"(kappa={k_end!r} vs {kmax!r}, kappa_s={ks_end!r})"
        )
    dense = sol.sol

    def fn(s):
        s = np.asarray(s, dtype=float)
        u = np.mod(s, period)
        back = u > half
        v = np.where(back, period - u, u)
        k, ks = dense(v.ravel())
        k = k.reshape(s.shape)
        ks = ks.reshape(s.shape)
        return k, np.where(back, -ks, ks)

    s = _grid(period, n_samples)
    k, ks = fn(s)
    spec.check_domain(k)
    return CurvatureProfile(
        spec=spec, rho=rho, d=d, period=period, s=s, kappa=k, kappa_s=ks,
        closed_form=False, kappa_fn=fn, kappa_ss_fn=None, s_min=0.0,
    )


# ---------------------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------------------


def el_residual(profile: CurvatureProfile) -> float:
    """``max |P'_ss + P'(kappa**2 + rho) - kappa P|`` over the samples."""
    k = profile.kappa
    P, dP, _, _ = profile.spec.derivatives(k)
    res = profile.dP_ss() + dP * (k * k + profile.rho) - k * P
    return float(np.max(np.abs(res)))


def first_integral_check(profile: CurvatureProfile) -> tuple[float, float]:
    """Mean and maximal deviation of the first integral over the samples."""
    v = first_integral_values(profile.spec, profile.rho, profile.kappa, profile.kappa_s)
    d_est = float(np.mean(v))
    return d_est, float(np.max(np.abs(v - d_est)))

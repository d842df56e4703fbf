"""Curvature Lagrangians ``P(kappa)`` and their Weingarten relations.

A critical curve of ``int P(kappa) ds`` on a surface of constant curvature
``rho`` sweeps, under its binormal flow, a rotational surface whose principal
curvatures obey ``k1 = k2 - P/P'`` with ``k1 = -kappa``.  This module holds the
catalog of Lagrangians, their closed-form derivatives up to third order and
the two-way map between catalog members and classical Weingarten relations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable

import numpy as np

from .errors import DomainError, ParameterError, UnsupportedRelation

__all__ = [
    "EnergyKind",
    "EnergySpec",
    "WeingartenRelation",
    "eval_energy",
    "energy_from_weingarten",
    "weingarten_of",
    "relation_of",
]


class EnergyKind(str, Enum):
    BENDING = "bending"
    EXTENDED_BLASCHKE = "extended_blaschke"
    TOTAL_CURVATURE = "total_curvature"
    ASTIGMATISM = "astigmatism"
    EXPONENTIAL = "exponential"
    Q_ELASTIC = "q_elastic"


_INF = math.inf


@dataclass(frozen=True)
class EnergySpec:
    """One member of the Lagrangian catalog.

    ============================  ==============================  ==========================
    kind                          ``P(kappa)``                    domain
    ============================  ==============================  ==========================
    ``bending``                   ``kappa**2 + lam``              all reals
    ``extended_blaschke``         ``sqrt(kappa - lam)``           ``kappa > lam``
    ``total_curvature``           ``sqrt(eps*(kappa**2 + lam))``  ``eps*(kappa**2+lam) > 0``
    ``astigmatism``               ``kappa*exp(lam/kappa)``        ``kappa > 0``
    ``exponential``               ``exp(lam*kappa)``              all reals
    ``q_elastic``                 ``(kappa - lam)**q``            ``kappa > lam``
    ============================  ==============================  ==========================
    """

    kind: EnergyKind
    lam: float = 0.0
    q: float | None = None
    epsilon: int | None = None
    scale: float = field(default=1.0, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "kind", EnergyKind(self.kind))
        object.__setattr__(self, "lam", float(self.lam))
        if self.kind is EnergyKind.Q_ELASTIC:
            if self.q is None or self.q in (0.0, 1.0):
                raise ParameterError("q_elastic needs an exponent q not in {0, 1}")
            object.__setattr__(self, "q", float(self.q))
        elif self.q is not None:
            raise ParameterError(f"{self.kind.value} takes no exponent q")
        if self.kind is EnergyKind.TOTAL_CURVATURE:
            eps = 1 if self.epsilon is None else int(self.epsilon)
            if eps not in (1, -1):
                raise ParameterError("epsilon must be +1 or -1")
            if eps == -1 and self.lam >= 0:
                raise ParameterError("epsilon=-1 needs lam < 0 (empty domain otherwise)")
            if self.lam == 0:
                raise ParameterError("total_curvature with lam=0 is the trivial total curvature")
            object.__setattr__(self, "epsilon", eps)
        elif self.epsilon is not None:
            raise ParameterError(f"{self.kind.value} takes no sign epsilon")
        if self.kind is EnergyKind.ASTIGMATISM and self.lam == 0:
            raise ParameterError("astigmatism needs lam != 0")
        if self.kind is EnergyKind.EXPONENTIAL and self.lam == 0:
            raise ParameterError("exponential needs lam != 0")
        if self.scale == 0:
            raise ParameterError("scale must be nonzero")

    # -- constructors -----------------------------------------------------------------
    @classmethod
    def bending(cls, lam: float = 0.0) -> "EnergySpec":
        return cls(EnergyKind.BENDING, lam)

    @classmethod
    def extended_blaschke(cls, lam: float = 0.0) -> "EnergySpec":
        return cls(EnergyKind.EXTENDED_BLASCHKE, lam)

    @classmethod
    def total_curvature(cls, lam: float, epsilon: int = 1) -> "EnergySpec":
        return cls(EnergyKind.TOTAL_CURVATURE, lam, epsilon=epsilon)

    @classmethod
    def astigmatism(cls, lam: float) -> "EnergySpec":
        return cls(EnergyKind.ASTIGMATISM, lam)

    @classmethod
    def exponential(cls, lam: float) -> "EnergySpec":
        return cls(EnergyKind.EXPONENTIAL, lam)

    @classmethod
    def q_elastic(cls, lam: float, q: float) -> "EnergySpec":
        return cls(EnergyKind.Q_ELASTIC, lam, q=q)

    def scaled(self, mu: float) -> "EnergySpec":
        """Same Lagrangian multiplied by ``mu``; critical curves are unchanged."""
        return replace(self, scale=self.scale * mu)

    # -- domain -----------------------------------------------------------------------
    @property
    def kappa_domain(self) -> tuple[tuple[float, float], ...]:
        """Open intervals (union) on which ``P`` is real and smooth."""
        k, lam = self.kind, self.lam
        if k in (EnergyKind.BENDING, EnergyKind.EXPONENTIAL):
            return ((-_INF, _INF),)
        if k in (EnergyKind.EXTENDED_BLASCHKE, EnergyKind.Q_ELASTIC):
            return ((lam, _INF),)
        if k is EnergyKind.ASTIGMATISM:
            return ((0.0, _INF),)
        # total curvature type
        if self.epsilon == 1:
            if lam > 0:
                return ((-_INF, _INF),)
            r = math.sqrt(-lam)
            return ((-_INF, -r), (r, _INF))
        r = math.sqrt(-lam)
        return ((-r, r),)

    def in_domain(self, kappa) -> np.ndarray:
        kappa = np.asarray(kappa, dtype=float)
        ok = np.zeros(kappa.shape, dtype=bool)
        for lo, hi in self.kappa_domain:
            ok |= (kappa > lo) & (kappa < hi)
        return ok & np.isfinite(kappa)

    def check_domain(self, kappa) -> None:
        ok = self.in_domain(kappa)
        if not np.all(ok):
            bad = np.asarray(kappa, dtype=float)[~ok].ravel()
            raise DomainError(
                f"kappa={bad[0]!r} outside the domain {self.kappa_domain} of {self.kind.value}"
            )

    # -- evaluation -------------------------------------------------------------------
    def derivatives(self, kappa):
        """Return ``(P, P', P'', P''')`` at ``kappa`` (closed forms, no differencing)."""
        self.check_domain(kappa)
        x = np.asarray(kappa, dtype=float)
        lam = self.lam
        k = self.kind
        if k is EnergyKind.BENDING:
            out = (x * x + lam, 2 * x, np.full_like(x, 2.0), np.zeros_like(x))
        elif k is EnergyKind.EXTENDED_BLASCHKE:
            u = x - lam
            r = np.sqrt(u)
            out = (r, 0.5 / r, -0.25 / (u * r), 0.375 / (u * u * r))
        elif k is EnergyKind.TOTAL_CURVATURE:
            eps = self.epsilon
            p = np.sqrt(eps * (x * x + lam))
            # P'' = lam / P**3 follows from eps*P**2 = kappa**2 + lam
            out = (p, eps * x / p, lam / p**3, -3 * lam * eps * x / p**5)
        elif k is EnergyKind.ASTIGMATISM:
            e = np.exp(lam / x)
            out = (
                x * e,
                e * (1 - lam / x),
                lam * lam * e / x**3,
                -lam * lam * e * (lam + 3 * x) / x**5,
            )
        elif k is EnergyKind.EXPONENTIAL:
            e = np.exp(lam * x)
            out = (e, lam * e, lam**2 * e, lam**3 * e)
        else:
            q = self.q
            u = x - lam
            out = (
                u**q,
                q * u ** (q - 1),
                q * (q - 1) * u ** (q - 2),
                q * (q - 1) * (q - 2) * u ** (q - 3),
            )
        mu = self.scale
        return tuple(mu * o for o in out)

    def P(self, kappa):
        return self.derivatives(kappa)[0]

    def ratio(self, kappa):
        """``P/P'`` in simplified closed form (independent of ``scale``)."""
        self.check_domain(kappa)
        x = np.asarray(kappa, dtype=float)
        lam = self.lam
        k = self.kind
        with np.errstate(divide="ignore", invalid="ignore"):
            if k is EnergyKind.BENDING:
                return (x * x + lam) / (2 * x)
            if k is EnergyKind.EXTENDED_BLASCHKE:
                return 2 * (x - lam)
            if k is EnergyKind.TOTAL_CURVATURE:
                return (x * x + lam) / x
            if k is EnergyKind.ASTIGMATISM:
                return x * x / (x - lam)
            if k is EnergyKind.EXPONENTIAL:
                return np.full_like(x, 1.0 / lam)
            return (x - lam) / self.q

    def kappa_ratio(self, kappa):
        """``kappa * P/P'``; finite even where ``P'`` vanishes at ``kappa = 0``."""
        self.check_domain(kappa)
        x = np.asarray(kappa, dtype=float)
        lam = self.lam
        k = self.kind
        if k is EnergyKind.BENDING:
            return (x * x + lam) / 2
        if k is EnergyKind.TOTAL_CURVATURE:
            return x * x + lam
        with np.errstate(divide="ignore", invalid="ignore"):
            return x * self.ratio(x)

    # -- plain-text serialization -----------------------------------------------------
    def to_text(self) -> str:
        lines = [f"kind={self.kind.value}", f"lambda={self.lam:.17g}"]
        if self.q is not None:
            lines.append(f"q={self.q:.17g}")
        if self.epsilon is not None:
            lines.append(f"epsilon={self.epsilon:d}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_mapping(cls, values: dict) -> "EnergySpec":
        kind = EnergyKind(str(values["kind"]).strip().lower())
        lam = float(values.get("lambda", values.get("lam", 0.0)))
        q = values.get("q")
        eps = values.get("epsilon")
        return cls(
            kind,
            lam,
            q=None if q is None else float(q),
            epsilon=None if eps is None else int(float(eps)),
        )

    @classmethod
    def from_text(cls, text: str) -> "EnergySpec":
        values = {}
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, _, value = line.partition("=")
            values[key.strip()] = value.strip()
        return cls.from_mapping(values)

    def label(self) -> str:
        parts = [f"lambda={self.lam:g}"]
        if self.q is not None:
            parts.append(f"q={self.q:g}")
        if self.epsilon is not None:
            parts.append(f"epsilon={self.epsilon:+d}")
        return f"{self.kind.value}({', '.join(parts)})"


def eval_energy(spec: EnergySpec, kappa):
    """``(P, dP, ddP, dddP)`` at ``kappa``; raises DomainError outside the domain."""
    return spec.derivatives(kappa)


# ---------------------------------------------------------------------------------------
# Weingarten relations
# ---------------------------------------------------------------------------------------


class RelationKind(str, Enum):
    LINEAR = "linear"
    CONSTANT_GAUSS = "constant_gauss"
    CONSTANT_ASTIGMATISM = "constant_astigmatism"
    CONSTANT_SKEW = "constant_skew"


@dataclass(frozen=True)
class WeingartenRelation:
    """A relation ``W(k1, k2) = 0`` between principal curvatures.

    * ``linear``: ``k1 = a*k2 + b`` with ``a != 0``.
    * ``constant_gauss``: Gauss curvature ``k1*k2 + rho = K_o`` in the space form
      of curvature ``ambient_rho``.
    * ``constant_astigmatism``: ``k1 = c*k1*k2 + k2``, i.e. ``1/k2 - 1/k1 = c``.
    * ``constant_skew``: ``k1 - k2 = b``.
    """

    kind: RelationKind
    a: float | None = None
    b: float | None = None
    K_o: float | None = None
    c: float | None = None
    ambient_rho: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", RelationKind(self.kind))
        if self.kind is RelationKind.LINEAR:
            if self.a is None or self.b is None:
                raise ParameterError("linear relation needs a and b")
            if self.a == 0:
                raise ParameterError("linear relation with a=0 is excluded (trivial examples)")
        if self.kind is RelationKind.CONSTANT_ASTIGMATISM and not self.c:
            raise ParameterError("constant astigmatism needs c != 0")
        if self.kind is RelationKind.CONSTANT_GAUSS and self.K_o is None:
            raise ParameterError("constant Gauss relation needs K_o")
        if self.kind is RelationKind.CONSTANT_SKEW and self.b is None:
            raise ParameterError("constant skew relation needs b")

    @classmethod
    def linear(cls, a: float, b: float, ambient_rho: float = 0.0):
        return cls(RelationKind.LINEAR, a=float(a), b=float(b), ambient_rho=ambient_rho)

    @classmethod
    def constant_gauss(cls, K_o: float, ambient_rho: float):
        return cls(RelationKind.CONSTANT_GAUSS, K_o=float(K_o), ambient_rho=float(ambient_rho))

    @classmethod
    def constant_astigmatism(cls, c: float, ambient_rho: float = 0.0):
        return cls(RelationKind.CONSTANT_ASTIGMATISM, c=float(c), ambient_rho=ambient_rho)

    @classmethod
    def constant_skew(cls, b: float, ambient_rho: float = 0.0):
        return cls(RelationKind.CONSTANT_SKEW, b=float(b), ambient_rho=ambient_rho)

    def residual(self, k1, k2):
        k1 = np.asarray(k1, dtype=float)
        k2 = np.asarray(k2, dtype=float)
        if self.kind is RelationKind.LINEAR:
            return k1 - self.a * k2 - self.b
        if self.kind is RelationKind.CONSTANT_SKEW:
            return k1 - k2 - self.b
        if self.kind is RelationKind.CONSTANT_GAUSS:
            return k1 * k2 + self.ambient_rho - self.K_o
        return k1 - self.c * k1 * k2 - k2


def energy_from_weingarten(rel: WeingartenRelation, epsilon: int | None = None) -> EnergySpec:
    """Lagrangian whose binormal-evolution tori satisfy ``rel`` (unit scale).

    For ``constant_gauss`` with ``lam = rho - K_o < 0`` both signs ``epsilon`` give
    valid Lagrangians; the default picks ``-1``, whose domain contains the
    curvature zero crossed by periodic profiles.
    """
    kind = rel.kind
    if kind is RelationKind.CONSTANT_SKEW:
        rel = WeingartenRelation.linear(1.0, rel.b, rel.ambient_rho)
        kind = rel.kind
    if kind is RelationKind.LINEAR:
        a, b = rel.a, rel.b
        if a == 1.0:
            if b == 0:
                raise UnsupportedRelation("k1 = k2 is the totally umbilical case")
            # P = -b P'  =>  P = exp(-kappa/b)
            return EnergySpec.exponential(-1.0 / b)
        q = a / (a - 1.0)
        lam = b / (a - 1.0)
        if q == 0.5:
            return EnergySpec.extended_blaschke(lam)
        return EnergySpec.q_elastic(lam, q)
    if kind is RelationKind.CONSTANT_GAUSS:
        lam = rel.ambient_rho - rel.K_o
        if lam == 0:
            raise UnsupportedRelation("K_o = rho gives the trivial total curvature functional")
        if epsilon is None:
            epsilon = 1 if lam > 0 else -1
        return EnergySpec.total_curvature(lam, epsilon)
    if kind is RelationKind.CONSTANT_ASTIGMATISM:
        return EnergySpec.astigmatism(1.0 / rel.c)
    raise UnsupportedRelation(f"no catalog energy for relation {rel!r}")


def relation_of(spec: EnergySpec, rho: float = 0.0) -> WeingartenRelation | None:
    """Classical Weingarten relation realised by ``spec`` (None for bending, lam != 0)."""
    k, lam = spec.kind, spec.lam
    if k is EnergyKind.EXTENDED_BLASCHKE:
        return WeingartenRelation.linear(-1.0, -2.0 * lam, rho)
    if k is EnergyKind.Q_ELASTIC:
        q = spec.q
        return WeingartenRelation.linear(q / (q - 1.0), lam / (q - 1.0), rho)
    if k is EnergyKind.BENDING:
        return WeingartenRelation.linear(2.0, 0.0, rho) if lam == 0 else None
    if k is EnergyKind.EXPONENTIAL:
        return WeingartenRelation.constant_skew(-1.0 / lam, rho)
    if k is EnergyKind.TOTAL_CURVATURE:
        return WeingartenRelation.constant_gauss(rho - lam, rho)
    return WeingartenRelation.constant_astigmatism(1.0 / lam, rho)


def weingarten_of(spec: EnergySpec) -> Callable:
    """Residual ``k1 - k2 + P(kappa)/P'(kappa)`` with ``kappa = -k1``.

    It vanishes exactly on the Weingarten locus of ``spec``.
    """

    def residual(k1, k2):
        k1 = np.asarray(k1, dtype=float)
        return k1 - np.asarray(k2, dtype=float) + spec.ratio(-k1)

    return residual

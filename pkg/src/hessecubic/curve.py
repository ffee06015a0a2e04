"""Points of P^2, the Hesse cubic, and the algebraic -2a map.

Points are stored normalized: the coordinate of largest modulus is scaled
to exactly 1 (ties broken by lowest index), which makes serialized output
reproducible.  The negation and doubling maps come from the theta-basis
symmetries: negation swaps the last two coordinates, and

    -2a = [a0*(a2^3 - a1^3) : a1*(a0^3 - a2^3) : a2*(a1^3 - a0^3)]

is the cleared-denominator form of the tangent-line construction.  E[3] is
exactly the nine points with a vanishing coordinate.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AllZero, DenominatorZero
from .theta import ThetaContext, theta_vector


@dataclass(frozen=True)
class ProjectivePoint:
    coords: tuple[complex, complex, complex]

    @classmethod
    def from_coords(cls, coords) -> "ProjectivePoint":
        c = [complex(v) for v in coords]
        if len(c) != 3:
            raise ValueError("a projective point needs exactly three coordinates")
        moduli = [abs(v) for v in c]
        top = max(moduli)
        if top == 0.0:
            raise AllZero("all three coordinates vanish")
        pivot = c[moduli.index(top)]
        return cls(tuple(v / pivot for v in c))

    def as_array(self) -> np.ndarray:
        return np.array(self.coords, dtype=complex)

    def negate(self) -> "ProjectivePoint":
        """The inverse point: coordinates 1 and 2 swapped (sign is projective)."""
        a0, a1, a2 = self.coords
        return ProjectivePoint.from_coords((a0, a2, a1))

    def to_json(self) -> list:
        return [[v.real, v.imag] for v in self.coords]

    @classmethod
    def from_json(cls, data) -> "ProjectivePoint":
        return cls.from_coords([complex(re, im) for re, im in data])


@dataclass(frozen=True)
class CurveConfig:
    """Hesse modulus plus the projective comparison tolerance."""

    psi: complex
    proj_tol: float = 1e-8

    def __post_init__(self):
        if abs(complex(self.psi) ** 3 + 1) < 1e-12:
            raise ValueError("psi^3 = -1 defines a singular Hesse cubic")


def embed(z: complex, ctx: ThetaContext) -> ProjectivePoint:
    """The point [th0(z) : th1(z) : th2(z)] of the Hesse cubic."""
    return ProjectivePoint.from_coords(theta_vector(z, ctx))


def proj_distance(p: ProjectivePoint, q: ProjectivePoint) -> float:
    """1 - |<p,q>|^2 / (|p|^2 |q|^2); zero iff equal projective classes."""
    u, v = p.as_array(), q.as_array()
    inner = abs(np.vdot(u, v)) ** 2
    d = 1.0 - inner / ((np.linalg.norm(u) ** 2) * (np.linalg.norm(v) ** 2))
    return float(max(d, 0.0))


def on_curve(p: ProjectivePoint, cfg: CurveConfig) -> float:
    """Residual |a0^3 + a1^3 + a2^3 - 3 psi a0 a1 a2| on the normalized point."""
    a0, a1, a2 = p.coords
    return abs(a0 ** 3 + a1 ** 3 + a2 ** 3 - 3 * cfg.psi * a0 * a1 * a2)


def negate(p: ProjectivePoint) -> ProjectivePoint:
    return p.negate()


def double_neg(p: ProjectivePoint) -> ProjectivePoint:
    """The point -2a, by the cleared-denominator tangent formula.

    Raises DenominatorZero only for exactly-zero coordinates (hand-built
    inflection points): analytic 3-torsion points carry coordinates of size
    ~1e-16 and the polynomial form is continuous there, with -2a = a.
    """
    a0, a1, a2 = p.coords
    if a0 == 0 or a1 == 0 or a2 == 0:
        raise DenominatorZero("point has a zero coordinate (lies in E[3])")
    return ProjectivePoint.from_coords((
        a0 * (a2 ** 3 - a1 ** 3),
        a1 * (a0 ** 3 - a2 ** 3),
        a2 * (a1 ** 3 - a0 ** 3),
    ))


def iterate_double_neg(p: ProjectivePoint, l: int) -> ProjectivePoint:
    """l-fold composition of double_neg; l = 0 returns p unchanged."""
    if l < 0:
        raise ValueError("iteration count must be non-negative")
    q = p
    for step in range(l):
        try:
            q = double_neg(q)
        except DenominatorZero as exc:
            raise DenominatorZero(f"{exc} at iteration {step}", iteration=step) from exc
    return q


def is_three_torsion(p: ProjectivePoint, cfg: CurveConfig) -> bool:
    """True iff some normalized coordinate (nearly) vanishes."""
    return min(abs(c) for c in p.coords) < cfg.proj_tol

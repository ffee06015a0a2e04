"""Moore matrices, their factorization partners, and a-derivatives.

For a point a = [a0 : a1 : a2] of the Hesse cubic the Moore matrix is

    M_{a,x} = | a0*x0  a2*x2  a1*x1 |
              | a2*x1  a1*x0  a0*x2 |
              | a1*x2  a0*x1  a2*x0 |

with det M = a0*a1*a2*(x0^3+x1^3+x2^3) - (a0^3+a1^3+a2^3)*x0*x1*x2, hence
det M = (a0*a1*a2) * w on the curve.  The quadratic partner L_{a,x} is
adj(M)/(a0*a1*a2), so M*L = L*M = w*I there: a rank-one matrix factorization
of the cubic.  Derivative matrices replace theta values by theta derivatives
at a; derivatives of L go through the rational coefficient functions by the
chain rule.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .curve import CurveConfig, ProjectivePoint, embed, on_curve
from .errors import DenominatorZero
from .poly import MultiPoly, PolyMatrix
from .report import CheckReport, check
from .theta import ThetaContext, leibniz_product, leibniz_quotient, theta_vector

# (r, c) -> (p, q): entry a_p * x_q
MOORE_PATTERN = (
    ((0, 0), (2, 2), (1, 1)),
    ((2, 1), (1, 0), (0, 2)),
    ((1, 2), (0, 1), (2, 0)),
)

# entry (r, c) of a0*a1*a2 * L: a_p*a_q*x_r^2 - a_s^2*x_t*x_u
_L_TABLE = (
    (((1, 2), 0, 0, (1, 2)), ((0, 1), 1, 2, (0, 2)), ((0, 2), 2, 1, (0, 1))),
    (((0, 1), 2, 2, (0, 1)), ((0, 2), 0, 1, (1, 2)), ((1, 2), 1, 0, (0, 2))),
    (((0, 2), 1, 1, (0, 2)), ((1, 2), 2, 0, (0, 1)), ((0, 1), 0, 2, (1, 2))),
)


@dataclass(frozen=True)
class MoorePair:
    """A Moore matrix with its factorization partner for one curve point."""

    m: PolyMatrix
    l: PolyMatrix
    psi: complex
    point: ProjectivePoint


def moore_pair(a: ProjectivePoint, psi: complex, proj_tol: float = 1e-8) -> MoorePair:
    cfg = CurveConfig(psi=psi, proj_tol=proj_tol)
    residual = on_curve(a, cfg)
    if residual >= proj_tol:
        raise ValueError(f"point is off the curve (residual {residual:.3e})")
    return MoorePair(m=moore_matrix(a), l=l_matrix(a), psi=psi, point=a)


def moore_from_coords(coords) -> PolyMatrix:
    """Moore-patterned matrix of linear forms from a raw coordinate triple."""
    a = [complex(v) for v in coords]
    entries = []
    for row in MOORE_PATTERN:
        entries.append([MultiPoly.variable(q) * a[p] for p, q in row])
    return PolyMatrix(entries)


def moore_matrix(a: ProjectivePoint) -> PolyMatrix:
    if min(abs(c) for c in a.coords) < 1e-8:
        warnings.warn("Moore matrix at a 3-torsion point is degenerate", stacklevel=2)
    return moore_from_coords(a.coords)


def l_from_coords(coords) -> PolyMatrix:
    a = [complex(v) for v in coords]
    scale = max(abs(v) for v in a)
    if min(abs(v) for v in a) < 1e-9 * scale:
        raise DenominatorZero("L matrix needs all coordinates nonzero (point in E[3])")
    pref = 1.0 / (a[0] * a[1] * a[2])
    entries = []
    for r in range(3):
        row = []
        for c in range(3):
            (p, q), sq_var, s, (t, u) = _L_TABLE[r][c]
            quad = MultiPoly.monomial(_sq_exp(sq_var), pref * a[p] * a[q])
            cross = MultiPoly.monomial(_cross_exp(t, u), -pref * a[s] ** 2)
            row.append(quad + cross)
        entries.append(row)
    return PolyMatrix(entries)


def _sq_exp(i: int):
    exp = [0, 0, 0]
    exp[i] = 2
    return tuple(exp)


def _cross_exp(i: int, j: int):
    exp = [0, 0, 0]
    exp[i] += 1
    exp[j] += 1
    return tuple(exp)


def l_matrix(a: ProjectivePoint) -> PolyMatrix:
    return l_from_coords(a.coords)


def moore_derivative(a_z: complex, ctx: ThetaContext, i: int = 0) -> PolyMatrix:
    """Moore-patterned matrix with coefficients theta^(i)(a_z).

    i = 0 reproduces moore_matrix(embed(a_z)) up to the normalization scalar
    of the projective representative.
    """
    return moore_from_coords(theta_vector(a_z, ctx, order=i))


def l_derivative(a_z: complex, ctx: ThetaContext, i: int = 0) -> PolyMatrix:
    """i-th a-derivative of L_{a,x} along a_j = theta_j(a_z).

    Each coefficient of L is a ratio of products of theta values; its jet is
    formed with the Leibniz product/quotient rules, no finite differences.
    """
    jets = [[theta_vector(a_z, ctx, order=m)[j] for m in range(i + 1)] for j in range(3)]
    order0 = [jet[0] for jet in jets]
    scale = max(abs(v) for v in order0)
    if min(abs(v) for v in order0) < 1e-9 * scale:
        raise DenominatorZero("L derivative needs all coordinates nonzero (point in E[3])")
    den = leibniz_product(leibniz_product(jets[0], jets[1]), jets[2])
    entries = []
    for r in range(3):
        row = []
        for c in range(3):
            (p, q), sq_var, s, (t, u) = _L_TABLE[r][c]
            quad_jet = leibniz_quotient(leibniz_product(jets[p], jets[q]), den)
            cross_jet = leibniz_quotient(leibniz_product(jets[s], jets[s]), den)
            row.append(MultiPoly.monomial(_sq_exp(sq_var), quad_jet[i])
                       + MultiPoly.monomial(_cross_exp(t, u), -cross_jet[i]))
        entries.append(row)
    return PolyMatrix(entries)


def theta_relation_residuals(a_z: complex, z: complex, ctx: ThetaContext,
                             order: int = 0) -> CheckReport:
    """Residual of sum_j C(order,j) M^(j)_{a,x(z)} theta^(order-j)(z+a) = 0.

    Three scalar identities per order, evaluated at x = embed(z); the order-0
    case is the Moore relation itself, order >= 1 its a-derivatives.
    """
    if order > 8:
        raise ValueError("relation order capped at 8")
    x = embed(z, ctx).coords
    residuals = [0.0 + 0.0j, 0.0 + 0.0j, 0.0 + 0.0j]
    for j in range(order + 1):
        avec = theta_vector(a_z, ctx, order=j)
        yvec = theta_vector(z + a_z, ctx, order=order - j)
        weight = math.comb(order, j)
        for r in range(3):
            residuals[r] += weight * sum(avec[p] * x[q] * yvec[col]
                                         for col, (p, q) in enumerate(MOORE_PATTERN[r]))
    worst = max(abs(v) for v in residuals)
    tol = ctx.check_tol * 10 ** min(order, 2)
    return check("moore.relation", worst, tol,
                 inputs={"a_z": complex(a_z), "z": complex(z),
                         "tau": complex(ctx.tau), "order": order})

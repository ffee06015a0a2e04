"""Moore matrices, L partners, derivative matrices, theta relations."""
import math

import numpy as np
import pytest

from hessecubic import (DenominatorZero, MultiPoly, PolyMatrix, ProjectivePoint,
                        embed, hesse_form, l_derivative, l_matrix,
                        moore_derivative, moore_matrix, moore_pair,
                        theta_relation_residuals, theta_vector)
from hessecubic.moore import moore_from_coords
from oracles import adjugate3, matrix_close, poly_close

X = [MultiPoly.variable(i) for i in range(3)]


def test_moore_symmetric_point_row_sums():
    m = moore_matrix(ProjectivePoint.from_coords((1, 1, 1)))
    expected = X[0] + X[1] + X[2]
    for r in range(3):
        total = m.entries[r][0] + m.entries[r][1] + m.entries[r][2]
        assert poly_close(total, expected, tol=1e-14)


def test_moore_det_degenerate_at_inflection():
    from hessecubic.poly import det
    with pytest.warns(UserWarning):
        m = moore_matrix(ProjectivePoint.from_coords((0, 1, -1)))
    assert det(m).norm() < 1e-12


def test_moore_det_is_cubic_with_product_scalar(ctx_i, psi_i):
    from hessecubic import equal_up_to_scalar
    from hessecubic.poly import det
    a = embed(0.3 + 0.07j, ctx_i)
    ok, c = equal_up_to_scalar(det(moore_matrix(a)), hesse_form(psi_i), tol=1e-8)
    prod = a.coords[0] * a.coords[1] * a.coords[2]
    assert ok
    assert abs(c - prod) < 1e-8 * abs(prod)


def test_l_matrix_symmetric_point_entry():
    l = l_matrix(ProjectivePoint.from_coords((1, 1, 1)))
    assert poly_close(l.entries[0][0], X[0] * X[0] - X[1] * X[2], tol=1e-14)


def test_l_matrix_is_scaled_adjugate(ctx_i):
    a = embed(0.3, ctx_i)
    prod = a.coords[0] * a.coords[1] * a.coords[2]
    oracle = adjugate3(moore_matrix(a)).scale(1.0 / prod)
    assert matrix_close(l_matrix(a), oracle, tol=1e-12)


def test_l_matrix_rejects_inflection_points():
    with pytest.raises(DenominatorZero):
        l_matrix(ProjectivePoint.from_coords((0, 1, -1)))


def test_ml_off_diagonal_vanishes_identically():
    # holds for any coordinates with nonzero entries, on the curve or not
    rng = np.random.default_rng(17)
    for _ in range(5):
        coords = tuple(complex(rng.normal(), rng.normal()) for _ in range(3))
        p = ProjectivePoint.from_coords(coords)
        if min(abs(c) for c in p.coords) < 1e-2:
            continue
        ml = moore_matrix(p) @ l_matrix(p)
        for i in range(3):
            for j in range(3):
                if i != j:
                    assert ml.entries[i][j].norm() < 1e-10


def test_ml_diagonal_is_cubic_on_curve(ctx_i, psi_i):
    from hessecubic import equal_up_to_scalar
    a = embed(0.3, ctx_i)
    ml = moore_matrix(a) @ l_matrix(a)
    w = hesse_form(psi_i)
    for i in range(3):
        ok, c = equal_up_to_scalar(ml.entries[i][i], w, tol=1e-8)
        assert ok and abs(c - 1.0) < 1e-8


@pytest.mark.parametrize("tau_fixture", ["ctx_i", "ctx_c"])
def test_factorization_both_orders_random_points(request, tau_fixture):
    ctx = request.getfixturevalue(tau_fixture)
    psi = request.getfixturevalue("psi_i" if tau_fixture == "ctx_i" else "psi_c")
    w_id = PolyMatrix.diagonal(hesse_form(psi), 3)
    rng = np.random.default_rng(19)
    count = 0
    while count < 10:
        z = complex(rng.uniform(-0.45, 0.45), rng.uniform(-0.45, 0.45))
        a = embed(z, ctx)
        if min(abs(c) for c in a.coords) < 1e-2:
            continue
        m, l = moore_matrix(a), l_matrix(a)
        assert ((m @ l) - w_id).coefficient_norm() < 1e-8
        assert ((l @ m) - w_id).coefficient_norm() < 1e-8
        count += 1


def test_moore_pair_validates_curve_membership(ctx_i, psi_i):
    moore_pair(embed(0.3, ctx_i), psi_i)
    with pytest.raises(ValueError):
        moore_pair(ProjectivePoint.from_coords((1.0, 2.0, 3.0)), psi_i)


def test_moore_derivative_order_zero_matches_normalized(ctx_i):
    a_z = 0.3
    raw = moore_derivative(a_z, ctx_i, 0)
    normalized = moore_matrix(embed(a_z, ctx_i))
    vec = theta_vector(a_z, ctx_i)
    scalar = vec[int(np.argmax(np.abs(vec)))]
    assert matrix_close(raw, normalized.scale(scalar), tol=1e-12)


def test_moore_derivative_matches_finite_difference(ctx_i):
    a_z, h = 0.3, 1e-5
    exact = moore_derivative(a_z, ctx_i, 1)
    plus = moore_derivative(a_z + h, ctx_i, 0)
    minus = moore_derivative(a_z - h, ctx_i, 0)
    fd = (plus - minus).scale(1.0 / (2 * h))
    assert (exact - fd).coefficient_norm() < 1e-6 * (1 + exact.coefficient_norm())


def test_l_derivative_order_zero_matches_l_matrix(ctx_i):
    a_z = 0.3
    jet0 = l_derivative(a_z, ctx_i, 0)
    direct = l_matrix(embed(a_z, ctx_i))
    vec = theta_vector(a_z, ctx_i)
    scalar = vec[int(np.argmax(np.abs(vec)))]
    # L is homogeneous of degree -1 in the point coordinates
    assert matrix_close(jet0, direct.scale(1.0 / scalar), tol=1e-10)


def test_l_derivative_matches_finite_difference(ctx_i):
    a_z, h = 0.3, 1e-5
    exact = l_derivative(a_z, ctx_i, 1)
    fd = (l_derivative(a_z + h, ctx_i, 0) - l_derivative(a_z - h, ctx_i, 0)).scale(1 / (2 * h))
    assert (exact - fd).coefficient_norm() < 1e-6 * (1 + exact.coefficient_norm())


def test_l_derivative_rejects_inflection(ctx_i):
    with pytest.raises(DenominatorZero):
        l_derivative(1.0 / 3.0, ctx_i, 1)


def test_product_rule_leibniz(ctx_i):
    # ML = w*I is constant in a, so M'L + ML' = 0; checked both directly and
    # against the finite-difference derivative of the product
    a_z, h = 0.3, 1e-4
    m0, m1 = moore_derivative(a_z, ctx_i, 0), moore_derivative(a_z, ctx_i, 1)
    l0, l1 = l_derivative(a_z, ctx_i, 0), l_derivative(a_z, ctx_i, 1)
    combo = m1 @ l0 + m0 @ l1
    assert combo.coefficient_norm() < 1e-8
    prod_plus = moore_derivative(a_z + h, ctx_i, 0) @ l_derivative(a_z + h, ctx_i, 0)
    prod_minus = moore_derivative(a_z - h, ctx_i, 0) @ l_derivative(a_z - h, ctx_i, 0)
    fd = (prod_plus - prod_minus).scale(1 / (2 * h))
    assert (combo - fd).coefficient_norm() < 1e-6


def test_iterated_leibniz(ctx_i):
    a_z = 0.3
    m = [moore_derivative(a_z, ctx_i, d) for d in range(4)]
    l = [l_derivative(a_z, ctx_i, d) for d in range(4)]
    for i in range(1, 4):
        total = PolyMatrix.zeros(3, 3)
        for j in range(i + 1):
            total = total + (m[j] @ l[i - j]).scale(math.comb(i, j))
        assert total.coefficient_norm() < 1e-7


def test_relation_order_zero(ctx_i):
    rep = theta_relation_residuals(0.3, 0.11, ctx_i, order=0)
    assert rep.residual < 1e-9
    assert rep.passed


def test_relation_order_one(ctx_i):
    rep = theta_relation_residuals(0.3, 0.11, ctx_i, order=1)
    assert rep.residual < 1e-8
    assert rep.passed


def test_relation_holds_at_torsion_base(ctx_i):
    # the identity survives at a in E[3]; only invertibility degenerates
    rep = theta_relation_residuals(0.0, 0.11, ctx_i, order=0)
    assert rep.residual < 1e-9


def test_relation_order_cap(ctx_i):
    with pytest.raises(ValueError):
        theta_relation_residuals(0.3, 0.11, ctx_i, order=9)


def test_moore_from_coords_pattern():
    m = moore_from_coords((2.0, 3.0, 5.0))
    assert poly_close(m.entries[0][0], X[0] * 2.0, tol=1e-15)
    assert poly_close(m.entries[0][1], X[2] * 5.0, tol=1e-15)
    assert poly_close(m.entries[0][2], X[1] * 3.0, tol=1e-15)
    assert poly_close(m.entries[1][0], X[1] * 5.0, tol=1e-15)
    assert poly_close(m.entries[2][0], X[2] * 3.0, tol=1e-15)

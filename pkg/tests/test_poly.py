"""Sparse polynomial arithmetic, determinants, ranks, scalar comparison."""
import numpy as np
import pytest

from hessecubic import (MultiPoly, NotSquare, PolyMatrix, ZeroReference, det,
                        embed, equal_up_to_scalar, eval_matrix, hesse_form,
                        moore_matrix, numeric_rank)
from hessecubic.poly import DROP_EPS
from oracles import (brute_det3, matrix_close, moore_det_closed_form, poly_close,
                     random_sparse_poly)


def test_hesse_form_fermat_case():
    w = hesse_form(0.0)
    assert w.terms == {(3, 0, 0): 1.0, (0, 3, 0): 1.0, (0, 0, 3): 1.0}


def test_hesse_form_at_ones():
    psi = 0.7 - 0.2j
    assert abs(hesse_form(psi)((1, 1, 1)) - (3 - 3 * psi)) < 1e-14


def test_hesse_form_vanishes_on_curve(ctx_i, psi_i):
    x = embed(0.3, ctx_i).coords
    assert abs(hesse_form(psi_i)(x)) < 1e-9


def test_ring_distributivity():
    rng = np.random.default_rng(3)
    for _ in range(10):
        p, q, r = (random_sparse_poly(rng) for _ in range(3))
        assert poly_close((p + q) * r, p * r + q * r, tol=1e-13)


def test_degree_additivity_generic():
    rng = np.random.default_rng(4)
    for _ in range(10):
        p, q = random_sparse_poly(rng), random_sparse_poly(rng)
        if p.is_zero() or q.is_zero():
            continue
        assert (p * q).total_degree() == p.total_degree() + q.total_degree()


def test_eval_homomorphism():
    rng = np.random.default_rng(6)
    for _ in range(10):
        p, q = random_sparse_poly(rng), random_sparse_poly(rng)
        xs = tuple(complex(rng.normal(), rng.normal()) for _ in range(3))
        lhs = (p * q)(xs)
        rhs = p(xs) * q(xs)
        assert abs(lhs - rhs) < 1e-12 * (1 + abs(lhs) + abs(rhs))


def test_pruning_of_cancellation_dust():
    p = MultiPoly({(1, 0, 0): 1.0})
    q = MultiPoly({(1, 0, 0): -1.0 + 0.5 * DROP_EPS})
    assert (p + q).is_zero()


def test_negative_exponent_rejected():
    with pytest.raises(ValueError):
        MultiPoly({(-1, 0, 0): 1.0})


def test_det_identity():
    assert poly_close(det(PolyMatrix.diagonal(MultiPoly.constant(1.0), 3)),
                      MultiPoly.constant(1.0), tol=1e-15)


def test_det_not_square():
    with pytest.raises(NotSquare):
        det(PolyMatrix.zeros(2, 3))


def test_moore_det_closed_form(ctx_i):
    a = embed(0.3, ctx_i)
    expected = moore_det_closed_form(a.coords)
    assert poly_close(det(moore_matrix(a)), expected, tol=1e-12)


def test_det_multiplicative_numeric():
    rng = np.random.default_rng(8)
    for _ in range(10):
        m1 = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        m2 = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        p1 = PolyMatrix([[MultiPoly.constant(m1[i, j]) for j in range(3)] for i in range(3)])
        p2 = PolyMatrix([[MultiPoly.constant(m2[i, j]) for j in range(3)] for i in range(3)])
        lhs = det(p1 @ p2).coefficient((0, 0, 0))
        rhs = brute_det3(m1) * brute_det3(m2)
        assert abs(lhs - rhs) < 1e-12 * (1 + abs(lhs))


def test_det_block_triangular(ctx_i):
    m = moore_matrix(embed(0.3, ctx_i))
    n = moore_matrix(embed(0.17 + 0.2j, ctx_i))
    big = PolyMatrix.zeros(6, 6)
    rng = np.random.default_rng(12)
    for i in range(3):
        for j in range(3):
            big.entries[i][j] = m.entries[i][j]
            big.entries[3 + i][3 + j] = n.entries[i][j]
            big.entries[i][3 + j] = MultiPoly.variable(0) * complex(rng.normal())
    assert poly_close(det(big), det(m) * det(n), tol=1e-11)


def test_interpolation_agrees_with_cofactor(ctx_i):
    from hessecubic import UlrichSpec, build_analytic
    for k in (1, 2):
        a, _ = build_analytic(UlrichSpec(k=k, ctx=ctx_i, a_z=0.3))
        d_cof = det(a, force="cofactor")
        d_int = det(a, force="interpolate")
        assert (d_cof - d_int).norm() < 1e-9 * (1 + d_cof.norm())


def test_eval_linear_matrix_at_origin(ctx_i):
    m = moore_matrix(embed(0.3, ctx_i))
    assert np.max(np.abs(eval_matrix(m, (0.0, 0.0, 0.0)))) == 0.0


def test_eval_hesse_diagonal_on_curve(ctx_i, psi_i):
    w = hesse_form(psi_i)
    diag = PolyMatrix.diagonal(w, 3)
    x = embed(0.21 + 0.13j, ctx_i).coords
    assert np.linalg.norm(eval_matrix(diag, x)) < 1e-8


def test_numeric_rank_zero_matrix():
    assert numeric_rank(np.zeros((4, 4))) == 0


def test_numeric_rank_moore_off_curve(ctx_i):
    m = moore_matrix(embed(0.3, ctx_i))
    assert numeric_rank(eval_matrix(m, (0.9, -0.2 + 0.4j, 0.3))) == 3


def test_numeric_rank_moore_on_curve(ctx_i):
    m = moore_matrix(embed(0.3, ctx_i))
    x = embed(0.11 + 0.07j, ctx_i).coords
    assert numeric_rank(eval_matrix(m, x)) == 2


def test_rank_tol_validation():
    with pytest.raises(ValueError):
        numeric_rank(np.eye(2), rank_tol=0.0)


def test_equal_up_to_scalar_basic(psi_i):
    w = hesse_form(psi_i)
    ok, c = equal_up_to_scalar(w * 2.0, w, tol=1e-9)
    assert ok and abs(c - 2.0) < 1e-12


def test_equal_up_to_scalar_distinct_support(psi_i):
    w = hesse_form(psi_i)
    ok, _ = equal_up_to_scalar(w, w + MultiPoly.variable(0), tol=1e-9)
    assert not ok


def test_equal_up_to_scalar_reflexive_symmetric():
    rng = np.random.default_rng(14)
    p = random_sparse_poly(rng)
    ok, c = equal_up_to_scalar(p, p, tol=1e-12)
    assert ok and abs(c - 1.0) < 1e-12
    q = p * (0.3 - 1.7j)
    ok1, c1 = equal_up_to_scalar(p, q, tol=1e-9)
    ok2, c2 = equal_up_to_scalar(q, p, tol=1e-9)
    assert ok1 and ok2
    assert abs(c1 * c2 - 1.0) < 1e-10


def test_equal_up_to_scalar_zero_reference():
    with pytest.raises(ZeroReference):
        equal_up_to_scalar(MultiPoly.constant(1.0), MultiPoly.zero(), tol=1e-9)


def test_multipoly_json_round_trip():
    rng = np.random.default_rng(15)
    p = random_sparse_poly(rng)
    assert poly_close(MultiPoly.from_json(p.to_json()), p, tol=1e-15)


def test_polymatrix_json_round_trip(ctx_i):
    m = moore_matrix(embed(0.3, ctx_i))
    m2 = PolyMatrix.from_json(m.to_json())
    assert matrix_close(m, m2, tol=1e-15)
    assert m2.is_linear()


def test_linear_flag(ctx_i):
    assert moore_matrix(embed(0.3, ctx_i)).is_linear()
    quad = PolyMatrix([[MultiPoly.monomial((2, 0, 0))]])
    assert not quad.is_linear()

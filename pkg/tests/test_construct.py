import os
from fractions import Fraction

import pytest

from semicert.certkit import PiecewiseCertificate, verify_certificate
from semicert.construct import (
    NotPositiveDefinite,
    cover_sphere,
    epsilon_margin,
    epsilon_regularize,
    local_certificate,
    sphere_grid,
    sum_of_squares_power,
)
from semicert.gallery import m_lambda, m_zero
from semicert.matpoly import MatrixPolynomial, determinant
from semicert.polycore import Polynomial


def test_sphere_grid_is_half_sphere():
    pts = sphere_grid(2, 8)
    assert len(pts) == 32
    assert all(next(v for v in p if v) > 0 for p in pts)


def test_epsilon_margin(xy):
    x, y = xy
    w = epsilon_margin(x * x + y * y, x * x)
    assert 0 < w.epsilon <= Fraction(1, 2)
    w0 = epsilon_margin(x * x + y * y, Polynomial.zero(2))
    assert w0.epsilon == Fraction(1, 2)


def test_epsilon_margin_motzkin_variant():
    s3 = sum_of_squares_power(3, 3)
    w = epsilon_margin(determinant(m_zero()) + s3, s3)
    assert w.epsilon > 0


def test_epsilon_regularize():
    A = epsilon_regularize(MatrixPolynomial.zeros(1, 1, 3), 1)
    assert A[0, 0] == sum_of_squares_power(3, 1)
    with pytest.raises(ValueError):
        epsilon_regularize(m_zero(), 0)


def test_single_term_patch(xy):
    x, y = xy
    A = MatrixPolynomial.identity(2, 2).scale(x * x + y * y)
    patch = local_certificate(A, (1, 0))
    assert len(patch.terms) == 1
    assert patch.terms[0].weight == x * x + y * y


def test_patch_2x2(xy):
    x, y = xy
    A = MatrixPolynomial([[2 * x * x + y * y, x * y], [x * y, x * x + 2 * y * y]], 2)
    patch = local_certificate(A, (Fraction(3, 5), Fraction(4, 5)))
    cert = PiecewiseCertificate(A, (patch.certified_piece(),), domain=patch.piece)
    rep = verify_certificate(cert, samples=1000)
    assert rep.ok


def test_patch_choi_at_regular_point():
    patch = local_certificate(m_lambda(1), (Fraction(2, 3), Fraction(2, 3), Fraction(1, 3)))
    cert = PiecewiseCertificate(m_lambda(1), (patch.certified_piece(),), domain=patch.piece)
    assert verify_certificate(cert).ok


def test_choi_is_rejected():
    with pytest.raises(NotPositiveDefinite) as info:
        cover_sphere(m_lambda(1))
    pt = info.value.point
    assert sum(1 for v in pt if v) == 1  # a coordinate point


def test_cover_trivial(xy):
    x, y = xy
    A = MatrixPolynomial.identity(2, 2).scale(x * x + y * y)
    cert = cover_sphere(A)
    assert len(cert.pieces) == 1
    assert verify_certificate(cert).ok


@pytest.mark.parametrize("eps", [
    Fraction(1, 2),
    pytest.param(Fraction(1, 10), marks=pytest.mark.skipif(
        not os.environ.get("SEMICERT_SLOW"), reason="thousands of pieces; set SEMICERT_SLOW=1")),
])
def test_cover_regularized_m0(eps):
    A = epsilon_regularize(m_zero(), eps)
    cert = cover_sphere(A, max_pieces=5000)
    rep = verify_certificate(cert, extra_points=sphere_grid(3, 16))
    assert rep.identity_exact and rep.ok

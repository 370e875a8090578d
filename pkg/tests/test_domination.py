from fractions import Fraction

import pytest

from semicert.certkit import verify_certificate
from semicert.domination import (
    QUADRATIC_BRANCHES,
    certify_quadratic_2x2,
    check_domination,
    gamma_set,
    minimal_r,
    orthant_certificate_from_domination,
    quadratic_branch,
    quadratic_matrix,
    univariate_certificate_at_zero,
)
from semicert.gallery import corner_shift
from semicert.matpoly import MatrixPolynomial
from semicert.polycore import Polynomial


def test_gamma_set(xy):
    x, y = xy
    assert gamma_set(MatrixPolynomial.identity(2, 2).scale(1 + x), (0, 0)).elements == ((0, 0),)
    assert gamma_set(MatrixPolynomial.diagonal([x * x, y * y]), (0, 0)).elements == ((0, 2), (2, 0))
    E1 = MatrixPolynomial.diagonal([x * x, Polynomial.zero(2)])
    assert gamma_set(E1, (0, 0)).elements == ((2, 0),)


def test_minimal_r():
    r = minimal_r([[1, 0], [0, 1]], [[0, 1], [1, 0]])
    assert 1 <= r <= 1 + Fraction(1, 2**16)
    assert minimal_r([[1, 0], [0, 1]], [[0, 0], [0, 0]]) == 0
    assert minimal_r([[1, 0], [0, 0]], [[0, 0], [0, 1]]) is None


def test_domination_constant_pd(xy):
    x, y = xy
    A = MatrixPolynomial([[2 + x, x * y / 10], [x * y / 10, 1 - y / 5]], 2)
    w = check_domination(A, (0, 0))
    assert w and all(b == (0, 0) for b, _ in w.assignment.values())


def test_corner_domination_fails():
    assert not check_domination(corner_shift(), (0, 0))


def test_quadratic_c1_positive_is_not_dominated():
    # The derivative in x of the off-diagonal is not controlled by diag(1, 0).
    A = quadratic_matrix(0, 0, 1, 0, 1, 0)
    res = check_domination(A, (0,))
    assert not res and res.alpha == (1,)


def test_orthant_certificate(xy):
    x, y = xy
    A = MatrixPolynomial([[1 + x, x * y], [x * y, 1 + y]], 2)
    for signs in [(1, 1), (-1, 1), (1, -1), (-1, -1)]:
        w = check_domination(A, (0, 0))
        cert, orth = orthant_certificate_from_domination(A, (0, 0), signs, w)
        rep = verify_certificate(cert)
        assert rep.ok and rep.identity_exact, signs


def test_orthant_constant_pd():
    A = MatrixPolynomial.constant([[2, 1], [1, 2]], 1)
    w = check_domination(A, (0,))
    cert, _ = orthant_certificate_from_domination(A, (0,), (1,), w)
    assert len(cert.pieces[0].terms) == 1
    assert cert.pieces[0].terms[0].weight == Polynomial.const(1, 1)


def test_zero_plus_diagonal(t):
    z = univariate_certificate_at_zero(MatrixPolynomial.diagonal([t * t, t**4]))
    weights = sorted((term.weight for term in z.certificate.pieces[0].terms), key=lambda p: p.degree)
    assert weights == [t * t, t**4]
    assert verify_certificate(z.certificate).exact


def test_zero_plus_coupled(t):
    M = MatrixPolynomial([[t * t, t**3], [t**3, t**4 + t**6]], 1)
    z = univariate_certificate_at_zero(M)
    assert verify_certificate(z.certificate).ok


def test_zero_plus_rejects_negative(t):
    with pytest.raises(ValueError):
        univariate_certificate_at_zero(MatrixPolynomial.diagonal([-t, Polynomial.const(1, 1)]))


@pytest.mark.parametrize("params,branch", [
    ((0, 0, 0, 0, 1, 0), "c1>0"),
    ((0, 0, 1, 0, 0, 2), "c1=0,c2>b1^2"),
    ((1, 1, 0, 0, 0, 0), "c2=b1^2,b1=0"),
    ((3, 1, 1, 1, 0, 1), "a1c2-2b1b2>0"),
    ((2, 1, 1, 1, 0, 1), "a1c2-2b1b2=0"),
])
def test_quadratic_branches(params, branch):
    assert quadratic_branch(*params) == branch
    q = certify_quadratic_2x2(*params)
    assert q and q.branch == branch
    rep = verify_certificate(q.certificate)
    assert rep.ok and rep.identity_exact


def test_quadratic_rejections():
    assert not certify_quadratic_2x2(0, 0, 0, 0, -1, 0)
    assert not certify_quadratic_2x2(2, 0, 1, 1, 0, 1)  # a2 b1^2 - b2^2 < 0
    assert set(QUADRATIC_BRANCHES) >= {"c1>0"}

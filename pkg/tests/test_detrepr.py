import random
from fractions import Fraction

import pytest

from semicert.detrepr import (
    cauchy_binet_sos_evidence,
    factor_psd_univariate,
    quadratic_determinantal_representation,
    random_psd_polynomial,
    verify_determinantal,
)
from semicert.gallery import m_zero, rank_one_matrix
from semicert.matpoly import MatrixPolynomial, determinant
from semicert.polycore import Polynomial


def test_factor_mixed(t):
    fac = factor_psd_univariate((t - 1) ** 2 * (t * t + 1))
    assert fac.is_exact
    quads = {str(q): k for q, k in fac.exact_quadratics}
    assert quads == {str(t * t + 1): 1, str((t - 1) ** 2): 1}


def test_factor_x4_plus_1(t):
    fac = factor_psd_univariate(t**4 + 1)
    assert len(fac.complex_pairs) == 2
    for pair in fac.complex_pairs:
        lo, hi = pair.gamma  # gamma = sqrt(2)/2
        assert lo * lo <= Fraction(1, 2) <= hi * hi


def test_factor_constant():
    fac = factor_psd_univariate(Polynomial.const(1, 1))
    assert fac.leading == 1 and not fac.quadratics()


def test_representation_exact(t):
    rep = quadratic_determinantal_representation((t * t + 1) ** 2)
    assert rep.residual == 0 and rep.ok
    assert rep.matrix == MatrixPolynomial.diagonal([t * t + 1, t * t + 1])


def test_representation_approximate(t):
    rep = quadratic_determinantal_representation(t**4 + 1)
    assert rep.ok and 0 < rep.residual <= 1e-8
    assert not rep.factorization.is_exact


def test_odd_degree_rejected(t):
    with pytest.raises(ValueError):
        quadratic_determinantal_representation(t**3 + 1)


def test_random_representations():
    rng = random.Random(5)
    for _ in range(10):
        f = random_psd_polynomial(rng)
        rep = quadratic_determinantal_representation(f)
        assert rep.ok and rep.matrix.is_diagonal()


def test_cauchy_binet_evidence(xy):
    x, y = xy
    M = rank_one_matrix()
    A = MatrixPolynomial([[x, y], [0, 0]], 2)
    rep = cauchy_binet_sos_evidence(M, A)
    assert rep.identity_exact and rep.determinant.is_zero()
    with pytest.raises(ValueError):
        cauchy_binet_sos_evidence(M, MatrixPolynomial([[x, y]], 2))


def test_cauchy_binet_rejects_wrong_factor(xyz):
    x, y, z = xyz
    wrong = MatrixPolynomial([[x, 0, 0], [0, y, 0], [0, 0, z]], 3)
    with pytest.raises(ValueError):
        cauchy_binet_sos_evidence(m_zero(), wrong)


def test_verify_determinantal(t):
    M = MatrixPolynomial.diagonal([t * t + 1, (t - 2) ** 2])
    assert verify_determinantal(M, determinant(M)).ok
    bad = verify_determinantal(MatrixPolynomial.diagonal([t, t]), t * t)
    assert bad.identity_exact and bad.psd_witness is not None

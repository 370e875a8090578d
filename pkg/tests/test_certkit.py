from fractions import Fraction

import pytest

from semicert import io
from semicert.certkit import (
    CertificateError,
    CertificateTerm,
    CertifiedPiece,
    ConeCombination,
    PiecewiseCertificate,
    Sampled,
    SemiAlgebraicPiece,
    bernstein_proof,
    charpoly,
    constant_proof,
    ldl_rational,
    negative_direction,
    psd_constant,
    psd_univariate_matrix,
    psd_univariate_scalar,
    rank_one,
    rank_one_count,
    sample_nonneg,
    split_rank_one,
    verify_certificate,
)
from semicert.gallery import (
    c_x_reference,
    c_y_reference,
    choi_certificate,
    two_piece_certificate,
    orthant_box_certificate,
    orthant_data,
)
from semicert.matpoly import MatrixPolynomial, determinant
from semicert.polycore import Polynomial


def test_psd_constant():
    assert psd_constant([[4, 0], [0, 0]])
    assert not psd_constant([[1, 2], [2, 1]])
    assert psd_constant([[2, -1, -1], [-1, 2, -1], [-1, -1, 2]])
    assert not psd_constant([[0, 1], [1, 0]])
    with pytest.raises(ValueError):
        psd_constant([[1, 2], [0, 1]])
    d = orthant_data()
    assert psd_constant((d.A0 - d.C2).constant_values())


def test_charpoly():
    assert charpoly([[2, 1], [1, 2]]) == [3, -4, 1]  # lowest degree first


def test_negative_direction():
    v = negative_direction([[1, 2], [2, 1]])
    Q = [[1, 2], [2, 1]]
    assert sum(v[i] * Q[i][j] * v[j] for i in range(2) for j in range(2)) < 0
    assert negative_direction([[1, 0], [0, 1]]) is None


def test_ldl():
    Q = [[2, -1, -1], [-1, 2, -1], [-1, -1, 2]]
    parts = ldl_rational(Q)
    acc = [[Fraction(0)] * 3 for _ in range(3)]
    for d, l in parts:
        for i in range(3):
            for j in range(3):
                acc[i][j] += d * l[i] * l[j]
    assert acc == [[Fraction(v) for v in r] for r in Q]


def test_psd_univariate(t):
    assert psd_univariate_scalar(18 * t * t + 9 * t + 5)
    assert psd_univariate_scalar(t * t)
    assert not psd_univariate_scalar(t**3)
    assert psd_univariate_matrix(c_x_reference())
    assert psd_univariate_matrix(c_y_reference())
    assert psd_univariate_scalar(determinant(c_x_reference()))
    assert not psd_univariate_matrix(MatrixPolynomial.diagonal([t, Polynomial.const(1, 1)]))


def test_sample_nonneg(xy):
    x, y = xy
    piece = SemiAlgebraicPiece((x * x - y * y,))
    assert sample_nonneg(x * x - y * y, piece).ok
    assert not sample_nonneg(-x * x, SemiAlgebraicPiece(())).ok
    piece2 = SemiAlgebraicPiece((y * y - x * x,))
    assert sample_nonneg(y**4 - x * x * y * y, piece2).ok


def test_bernstein(xy):
    x, y = xy
    box = [(0, Fraction(1, 4)), (Fraction(-1, 4), 0)]
    proof = bernstein_proof(x / 4 - x * x, box, [0, 2], [1, 3])
    assert isinstance(proof, ConeCombination)
    assert bernstein_proof(x - Fraction(1, 8), box, [0, 2], [1, 3]) is None


def test_choi_and_two_piece_exact():
    for cert in (choi_certificate(single=True), choi_certificate(), two_piece_certificate(),
                 orthant_box_certificate()):
        rep = verify_certificate(cert)
        assert rep.identity_exact and rep.exact, rep.to_dict()


def test_negative_weight_is_caught(xy):
    x, y = xy
    M = MatrixPolynomial.identity(2, 2)
    cp = CertifiedPiece(SemiAlgebraicPiece((), "all"),
                        (CertificateTerm(Polynomial.const(-1, 2), rank_one([1, 0], 2), Sampled()),
                         CertificateTerm(Polynomial.const(2, 2), rank_one([1, 0], 2), constant_proof(2, 2)),
                         CertificateTerm(Polynomial.const(1, 2), rank_one([0, 1], 2), constant_proof(1, 2))))
    rep = verify_certificate(PiecewiseCertificate(M, (cp,)))
    assert rep.identity_exact
    term = rep.pieces[0].terms[0]
    assert term.weight_status == "failed" and term.witness is not None


def test_wrong_identity_witness(xy):
    x, y = xy
    M = MatrixPolynomial.identity(2, 2)
    cp = CertifiedPiece(SemiAlgebraicPiece(()),
                        (CertificateTerm(Polynomial.const(1, 2), rank_one([1, x], 2), constant_proof(1, 2)),))
    rep = verify_certificate(PiecewiseCertificate(M, (cp,)))
    assert not rep.identity_exact
    pt, (i, j), diff = rep.pieces[0].identity_witness
    assert diff != 0


def test_bad_proof_raises(xy):
    x, y = xy
    piece = SemiAlgebraicPiece((x,))
    cp = CertifiedPiece(piece, (CertificateTerm(x, rank_one([1], 2), ConeCombination(((1, Polynomial.const(1, 2), (3,)),))),))
    with pytest.raises(CertificateError):
        verify_certificate(PiecewiseCertificate(MatrixPolynomial([[x]], 2), (cp,)))


def test_split_rank_one_keeps_exactness():
    cert = orthant_box_certificate()
    split = split_rank_one(cert)
    assert rank_one_count(split) >= len(cert.pieces[0].terms)
    rep = verify_certificate(split)
    assert rep.identity_exact


def test_io_roundtrip(tmp_path):
    for cert in (choi_certificate(), two_piece_certificate(), orthant_box_certificate()):
        path = tmp_path / "c.json"
        io.save_certificate(cert, path)
        back = io.load_certificate(path)
        assert io.certificate_to_dict(back) == io.certificate_to_dict(cert)
        assert back.target == cert.target
        assert verify_certificate(back).identity_exact


def test_io_matrix_and_polynomial(tmp_path, xy):
    x, y = xy
    M = MatrixPolynomial([[1 + x * x, x * y], [x * y, x * x + y**4]], 2)
    io.save_json(io.matrix_to_dict(M, ["x", "y"]), tmp_path / "m.json")
    assert io.load_matrix(tmp_path / "m.json") == (M, ["x", "y"])
    io.save_json(io.polynomial_to_dict(x**4 + Fraction(1, 3)), tmp_path / "p.json")
    assert io.load_polynomial(tmp_path / "p.json")[0] == x**4 + Fraction(1, 3)

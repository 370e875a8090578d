"""Worked examples: explicit matrices, identities and certificates, each with an expected outcome.

Every item builds its object, runs it through the relevant checker and reports one of
``verifies-exact``, ``weight-sampled``, ``determinant-matches`` or ``rejects``.
"""

from __future__ import annotations

import fnmatch
import itertools
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .certkit import (
    CertificateTerm,
    CertifiedPiece,
    ConeCombination,
    ConstPSD,
    ExplicitSOS,
    PiecewiseCertificate,
    PolyPSD,
    Sampled,
    SemiAlgebraicPiece,
    Square,
    box_piece,
    box_proof,
    constant_proof,
    psd_constant,
    psd_univariate_matrix,
    rank_one,
    sample_points,
    verify_certificate,
)
from .construct import cover_sphere
from .domination import check_domination, derivative_matrices
from .matpoly import MatrixPolynomial, determinant
from .polycore import Polynomial, as_fraction, multi_factorial

STATUSES = ("verifies-exact", "weight-sampled", "determinant-matches", "rejects")

XYZ = ("x", "y", "z")


def _xyz(n: int = 3) -> list[Polynomial]:
    return [Polynomial.var(i, n) for i in range(n)]


# -- matrices --------------------------------------------------------------------------------


def m_lambda(lam) -> MatrixPolynomial:
    """The Choi-type family in ``x, y, z``; ``lam = 1`` is Choi's biquadratic form."""
    x, y, z = _xyz()
    nu = as_fraction(lam) + 1
    return MatrixPolynomial([
        [x * x + nu * z * z, -x * y, -x * z],
        [-x * y, y * y + nu * x * x, -y * z],
        [-x * z, -y * z, z * z + nu * y * y],
    ], 3)


def m_lambda_symbolic() -> MatrixPolynomial:
    """``M_lambda`` over ``Q[x, y, z, lambda]``."""
    x, y, z, lam = (Polynomial.var(i, 4) for i in range(4))
    nu = lam + 1
    return MatrixPolynomial([
        [x * x + nu * z * z, -x * y, -x * z],
        [-x * y, y * y + nu * x * x, -y * z],
        [-x * z, -y * z, z * z + nu * y * y],
    ], 4)


def m_zero() -> MatrixPolynomial:
    return m_lambda(0)


def two_piece_matrix() -> MatrixPolynomial:
    x, y = _xyz(2)
    return MatrixPolynomial([[1 + x * x, x * y], [x * y, x * x + y**4]], 2)


def perturbed_two_piece_matrix(eps=Fraction(1, 100)) -> MatrixPolynomial:
    x, y = _xyz(2)
    e = as_fraction(eps)
    return MatrixPolynomial([
        [1 + x * x + e * (x**4 + y**4), x * y],
        [x * y, e * (1 + x**4) + x * x + y**4],
    ], 2)


def rank_one_matrix() -> MatrixPolynomial:
    x, y = _xyz(2)
    return MatrixPolynomial([[x * x, x * y], [x * y, y * y]], 2)


def corner_matrix() -> MatrixPolynomial:
    x, y = _xyz(2)
    return MatrixPolynomial([[1 + x * x - y * y, -x], [-x, y * y]], 2)


CORNER_P = ((1, -1), (1, 1))


def corner_shift() -> MatrixPolynomial:
    """``P M Q`` in ``(H, Y)`` with ``x = 1 + H + Y``, ``y = 1 + Y`` and ``Q = P^T``."""
    h, yy = _xyz(2)
    M = corner_matrix().substitute([1 + h + yy, 1 + yy])
    P = MatrixPolynomial.constant(CORNER_P, 2)
    return P @ M @ P.T


def corner_shift_reference() -> MatrixPolynomial:
    h, y = _xyz(2)
    off = 2 * h - 2 * y + h * h - y * y + 2 * h * y
    return MatrixPolynomial([
        [4 + 4 * h + 4 * y + h * h + y * y + 2 * h * y, off],
        [off, h * h + y * y + 2 * h * y],
    ], 2)


# -- certificates ----------------------------------------------------------------------------


def _sos(*pairs) -> ExplicitSOS:
    return ExplicitSOS(tuple((as_fraction(c), s) for c, s in pairs))


def choi_piece() -> CertifiedPiece:
    """Choi's form on ``x^2 >= z^2``."""
    x, y, z = _xyz()
    one = Polynomial.const(1, 3)
    piece = SemiAlgebraicPiece((x * x - z * z,), "x^2>=z^2")
    return CertifiedPiece(piece, (
        CertificateTerm(one, rank_one([-x, y, z], 3), constant_proof(1, 3)),
        CertificateTerm(2 * one, rank_one([0, -z, y], 3), constant_proof(2, 3)),
        CertificateTerm(2 * z * z, rank_one([1, 0, 0], 3), _sos((2, z))),
        CertificateTerm(2 * (x * x - z * z), rank_one([0, 1, 0], 3), ConeCombination(((2, one, (0,)),))),
    ))


def _substitute_proof(proof, images: Sequence[Polynomial]):
    if isinstance(proof, ExplicitSOS):
        return ExplicitSOS(tuple((c, s.substitute(images)) for c, s in proof.squares))
    if isinstance(proof, ConeCombination):
        return ConeCombination(tuple((c, s.substitute(images), g) for c, s, g in proof.items))
    return proof


def transform_piece(cp: CertifiedPiece, images: Sequence[Polynomial], L: MatrixPolynomial,
                    label: str = "") -> CertifiedPiece:
    """Certificate of ``L * M(images) * L^T`` from one of ``M``; ``L`` is constant.

    Weights, constraints and proof squares are substituted, factors are conjugated by ``L``.
    """
    Lt = L.T
    terms = []
    for t in cp.terms:
        f = t.factor
        if isinstance(f, Square):
            nf = Square(f.U.substitute(images) @ Lt)
        elif isinstance(f, ConstPSD):
            outer = f.outer.substitute(images) if f.outer is not None else MatrixPolynomial.identity(len(f.Q), L.nvars)
            nf = ConstPSD(f.Q, outer @ Lt)
        else:
            nf = PolyPSD(L @ f.P.substitute(images) @ Lt)
        terms.append(CertificateTerm(t.weight.substitute(images), nf, _substitute_proof(t.proof, images)))
    piece = SemiAlgebraicPiece(tuple(g.substitute(images) for g in cp.piece.constraints),
                               label or cp.piece.label)
    return CertifiedPiece(piece, tuple(terms))


def find_permutation(M: MatrixPolynomial, images: Sequence[Polynomial]) -> MatrixPolynomial | None:
    """Permutation matrix ``L`` with ``M == L * M(images) * L^T``, by brute force."""
    Ms = M.substitute(images)
    m = M.size
    for perm in itertools.permutations(range(m)):
        L = MatrixPolynomial.constant([[int(perm[i] == j) for j in range(m)] for i in range(m)], M.nvars)
        if L @ Ms @ L.T == M:
            return L
    return None


CYCLE = (1, 2, 0)  # x -> y, y -> z, z -> x


def cyclic_pieces(M: MatrixPolynomial, cp: CertifiedPiece) -> list[CertifiedPiece]:
    """``cp`` and its two images under the cyclic substitution of the variables."""
    out = [cp]
    v = _xyz()
    images = [v[k] for k in CYCLE]
    L = find_permutation(M, images)
    if L is None:
        raise ValueError("matrix is not invariant under the cyclic substitution")
    for _ in range(2):
        nxt = transform_piece(out[-1], images, L)
        label = " & ".join(str(g) for g in nxt.piece.constraints)
        out.append(CertifiedPiece(SemiAlgebraicPiece(nxt.piece.constraints, label + ">=0"), nxt.terms))
    return out


def choi_certificate(single: bool = False) -> PiecewiseCertificate:
    M = m_lambda(1)
    cp = choi_piece()
    if single:
        return PiecewiseCertificate(M, (cp,), XYZ, cp.piece)
    return PiecewiseCertificate(M, tuple(cyclic_pieces(M, cp)), XYZ)


def mlambda_patch(lam) -> CertifiedPiece:
    """Patch around ``[1:0:0]`` on ``nu^2 x^2 >= 4 z^2`` with ``nu = lam + 1``."""
    lam = as_fraction(lam)
    if lam <= 0:
        raise ValueError("lambda must be positive")
    nu = lam + 1
    x, y, z = _xyz()
    one = Polynomial.const(1, 3)
    g = nu * nu * x * x - 4 * z * z
    middle = ConstPSD(((nu, 0, 0), (0, 4 / nu, -2), (0, -2, nu)),
                      MatrixPolynomial.diagonal([z, z, y]))
    piece = SemiAlgebraicPiece((g,), f"{g}>=0")
    return CertifiedPiece(piece, (
        CertificateTerm(one, rank_one([-x, y, z], 3), constant_proof(1, 3)),
        CertificateTerm(one, middle, constant_proof(1, 3)),
        CertificateTerm(g.scale(1 / nu), rank_one([0, 1, 0], 3), ConeCombination(((1 / nu, one, (0,)),))),
    ))


def mlambda_certificate(lam, complete: bool = False, grid: int = 8) -> PiecewiseCertificate:
    """Three exact patches at the coordinate points; ``complete`` covers the rest by local patches.

    For ``lam >= 1`` the three patches already cover R^3.
    """
    M = m_lambda(lam)
    pieces = cyclic_pieces(M, mlambda_patch(lam))
    if complete:
        return cover_sphere(M, grid=grid, covered=pieces, names=XYZ)
    return PiecewiseCertificate(M, tuple(pieces), XYZ)


def two_piece_certificate() -> PiecewiseCertificate:
    x, y = _xyz(2)
    one = Polynomial.const(1, 2)
    p1 = SemiAlgebraicPiece((x * x - y * y,), "x^2>=y^2")
    p2 = SemiAlgebraicPiece((y * y - x * x,), "y^2>=x^2")
    c1 = CertifiedPiece(p1, (
        CertificateTerm(one, rank_one([x, y], 2), constant_proof(1, 2)),
        CertificateTerm(one, rank_one([1, 0], 2), constant_proof(1, 2)),
        CertificateTerm(x * x - y * y + y**4, rank_one([0, 1], 2),
                        ConeCombination(((1, one, (0,)), (1, y * y, ())))),
    ))
    c2 = CertifiedPiece(p2, (
        CertificateTerm(one, rank_one([1, x * y], 2), constant_proof(1, 2)),
        CertificateTerm(x * x, Square(MatrixPolynomial.identity(2, 2)), _sos((1, x))),
        CertificateTerm(y * y * (y * y - x * x), rank_one([0, 1], 2), ConeCombination(((1, y, (0,)),))),
    ))
    return PiecewiseCertificate(two_piece_matrix(), (c1, c2), ("x", "y"))


def rank_one_certificate() -> PiecewiseCertificate:
    x, y = _xyz(2)
    cp = CertifiedPiece(SemiAlgebraicPiece((), "R^2"),
                        (CertificateTerm(Polynomial.const(1, 2), rank_one([x, y], 2), constant_proof(1, 2)),))
    return PiecewiseCertificate(rank_one_matrix(), (cp,), ("x", "y"))


# -- the [1:1:1] orthant ---------------------------------------------------------------------

ORTHANT_BOX = ((0, Fraction(1, 4)), (Fraction(-1, 4), 0))


@dataclass(frozen=True)
class OrthantData:
    """Taylor pieces of ``M_0`` at ``(1, 1, 1)`` with ``z = 1``, ``x = 1 + X``, ``y = 1 + Y``."""

    target: MatrixPolynomial
    A0: MatrixPolynomial
    C2: MatrixPolynomial
    A_X: MatrixPolynomial
    A_Y: MatrixPolynomial
    A_XY: MatrixPolynomial
    C_X: MatrixPolynomial
    C_Y: MatrixPolynomial


def orthant_data() -> OrthantData:
    X, Y = _xyz(2)
    one = Polynomial.const(1, 2)
    T = m_zero().substitute([1 + X, 1 + Y, one])
    ders = derivative_matrices(T, (0, 0))

    def coef(alpha):
        return MatrixPolynomial.constant(ders.get(alpha, [[0] * 3] * 3), 2).scale(Fraction(1, multi_factorial(alpha)))

    A0, A1, A2 = coef((0, 0)), coef((1, 0)), coef((2, 0))
    B1, B2, C2 = coef((0, 1)), coef((0, 2)), coef((1, 1))
    A_X = A0.scale(Fraction(5, 12)) + A1.scale(X) + A2.scale(X * X)
    A_Y = A0.scale(Fraction(5, 12)) + B1.scale(Y) + B2.scale(Y * Y)
    A_XY = A0.scale(Fraction(2, 12)) + C2.scale(X * Y)
    C_X = A_X - A0.scale(X / 4 - X * X)
    C_Y = A_Y - A0.scale(-Y / 4 - Y * Y)
    return OrthantData(T, A0, C2, A_X, A_Y, A_XY, C_X, C_Y)


def _univariate(P: MatrixPolynomial, index: int) -> MatrixPolynomial:
    return P.map(lambda p: Polynomial(1, {(e[index],): c for e, c in p.terms.items()}), 1)


def c_x_reference() -> MatrixPolynomial:
    X = Polynomial.var(0, 1)
    d = (18 * X * X + 9 * X + 5) / 6
    o = (-12 * X * X - 9 * X - 5) / 12
    return MatrixPolynomial([
        [d, o, o],
        [o, d, (-12 * X * X + 3 * X - 5) / 12],
        [o, (-12 * X * X + 3 * X - 5) / 12, (12 * X * X - 3 * X + 5) / 6],
    ], 1)


def c_y_reference() -> MatrixPolynomial:
    Y = Polynomial.var(0, 1)
    a = (-12 * Y * Y - 15 * Y - 5) / 12
    d = (18 * Y * Y + 15 * Y + 5) / 6
    return MatrixPolynomial([
        [(12 * Y * Y + 3 * Y + 5) / 6, a, (-12 * Y * Y - 3 * Y - 5) / 12],
        [a, d, a],
        [(-12 * Y * Y - 3 * Y - 5) / 12, a, d],
    ], 1)


def _weight_proof(w: Polynomial, piece: SemiAlgebraicPiece):
    p = box_proof(w, piece)
    return p if p is not None else Sampled()


def orthant_box_certificate() -> PiecewiseCertificate:
    """``M_0 = A0 (X/4 - X^2) + C_X + A0 (-Y/4 - Y^2) + C_Y + A_XY`` on ``X >= 0 >= Y`` near the origin."""
    d = orthant_data()
    X, Y = _xyz(2)
    one = Polynomial.const(1, 2)
    piece = box_piece(ORTHANT_BOX, "0<=X<=1/4, -1/4<=Y<=0")
    A0 = ConstPSD(tuple(tuple(r) for r in d.A0.constant_values()))
    AC = ConstPSD(tuple(tuple(r) for r in (d.A0 - d.C2).constant_values()))
    cx = PolyPSD(d.C_X)
    cy = PolyPSD(d.C_Y)
    weights = [
        (X / 4 - X * X, A0),
        (one, cx),
        (-Y / 4 - Y * Y, A0),
        (one, cy),
        ((2 * (1 + 6 * X * Y)) / 12, A0),
        (-X * Y, AC),
    ]
    terms = tuple(CertificateTerm(w, f, _weight_proof(w, piece)) for w, f in weights)
    return PiecewiseCertificate(d.target, (CertifiedPiece(piece, terms),), ("X", "Y"), piece)


# -- items -----------------------------------------------------------------------------------


@dataclass
class ItemResult:
    id: str
    expected: str
    status: str
    seconds: float
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.status == self.expected

    def to_dict(self) -> dict:
        return {"id": self.id, "expected": self.expected, "status": self.status, "ok": self.ok,
                "seconds": round(self.seconds, 3), "detail": self.detail}


@dataclass(frozen=True)
class GalleryItem:
    id: str
    expected_status: str
    run: Callable[[], tuple[str, str]]
    description: str = ""


def _cert_status(cert: PiecewiseCertificate, **kw) -> tuple[str, str]:
    rep = verify_certificate(cert, **kw)
    if not rep.ok:
        return "fail", f"identity_exact={rep.identity_exact} weights_ok={rep.weights_ok} covering={rep.covering.ok}"
    return ("verifies-exact" if rep.exact else "weight-sampled"), f"{len(cert.pieces)} piece(s)"


def _equal(lhs: Polynomial | MatrixPolynomial, rhs, what: str) -> tuple[str, str]:
    return ("determinant-matches", what) if lhs == rhs else ("fail", f"{what}: {lhs} != {rhs}")


def _m0_det():
    x, y, z = _xyz()
    return _equal(determinant(m_zero()), x**4 * y**2 + y**4 * z**2 + z**4 * x**2 - 3 * x**2 * y**2 * z**2,
                  "det M_0")


def _mlambda_det_111():
    lam = Polynomial.var(0, 1)
    one = Polynomial.const(1, 1)
    d = determinant(m_lambda_symbolic()).substitute([one, one, one, lam])
    return _equal(d, lam * (lam + 3) ** 2, "det M_lambda(1,1,1)")


def _corner_det():
    x, y = _xyz(2)
    return _equal(determinant(corner_matrix()), (y * y - 1) * (x * x - y * y), "det M")


def _corner_shift():
    N = corner_shift()
    if N != corner_shift_reference():
        return "fail", "shifted matrix differs from the reference matrix"
    P = MatrixPolynomial.constant(CORNER_P, 2)
    if P @ MatrixPolynomial.constant(corner_matrix().evaluate((1, 1)), 2) @ P.T != \
            MatrixPolynomial.constant([[4, 0], [0, 0]], 2):
        return "fail", "P M(1,1) P^T is not diag(4, 0)"
    h, y = _xyz(2)
    return _equal(determinant(N), 4 * determinant(corner_matrix()).substitute([1 + h + y, 1 + y]),
                  "N = P M P^T, det N = 4 det M")


def _corner_domination():
    res = check_domination(corner_shift(), (0, 0))
    if res:
        return "fail", "domination unexpectedly holds"
    return "rejects", f"no dominating beta for alpha={res.alpha}, Gamma={res.gamma.elements}"


def _psd_univariate(name: str, P: MatrixPolynomial, shown: MatrixPolynomial):
    if P != shown:
        return "fail", f"{name} differs from its reference matrix"
    return ("verifies-exact", f"{name} psd on R") if psd_univariate_matrix(P) else ("fail", f"{name} not psd")


def _a0_c2():
    d = orthant_data()
    return ("verifies-exact", "A0 - C2 psd") if psd_constant((d.A0 - d.C2).constant_values()) else ("fail", "")


def _sampled_psd(M: MatrixPolynomial, n: int = 200) -> tuple[str, str]:
    """Psd-ness spot check only: there is no certificate to verify."""
    pts = sample_points(SemiAlgebraicPiece((), "", ((-4, 4),) * M.nvars), n, 0, M.nvars)[0]
    for p in pts:
        if not psd_constant(M.evaluate(p)):
            return "fail", f"not psd at {p}"
    return "weight-sampled", f"psd at {n} sampled points"


def _orthant_box():
    d = orthant_data()
    X, Y = _xyz(2)
    total = (d.A0.scale(X / 4 - X * X) + d.C_X + d.A0.scale(-Y / 4 - Y * Y) + d.C_Y
             + d.A0.scale((2 * (1 + 6 * X * Y)) / 12) - (d.A0 - d.C2).scale(X * Y))
    if total != d.target or d.A_X + d.A_Y + d.A_XY != d.target:
        return "fail", "decomposition is not an identity"
    return _cert_status(orthant_box_certificate())


def items() -> list[GalleryItem]:
    od = orthant_data
    return [
        GalleryItem("m0-det", "determinant-matches", _m0_det),
        GalleryItem("mlambda-det-111", "determinant-matches", _mlambda_det_111),
        GalleryItem("choi-cover-x-ge-z", "verifies-exact", lambda: _cert_status(choi_certificate(single=True))),
        GalleryItem("choi-cover", "verifies-exact", lambda: _cert_status(choi_certificate())),
        GalleryItem("two-piece-cert", "verifies-exact", lambda: _cert_status(two_piece_certificate())),
        GalleryItem("perturbed-two-piece", "weight-sampled", lambda: _sampled_psd(perturbed_two_piece_matrix())),
        GalleryItem("rank-one", "verifies-exact", lambda: _cert_status(rank_one_certificate())),
        GalleryItem("mlambda-1", "verifies-exact", lambda: _cert_status(mlambda_certificate(1))),
        GalleryItem("mlambda-4", "verifies-exact", lambda: _cert_status(mlambda_certificate(4))),
        GalleryItem("mlambda-1-2", "weight-sampled",
                    lambda: _cert_status(mlambda_certificate(Fraction(1, 2), complete=True))),
        GalleryItem("mlambda-0", "rejects", _mlambda_zero),
        GalleryItem("orthant-box", "verifies-exact", _orthant_box),
        GalleryItem("cx-psd", "verifies-exact", lambda: _psd_univariate("C_X", _univariate(od().C_X, 0), c_x_reference())),
        GalleryItem("cy-psd", "verifies-exact", lambda: _psd_univariate("C_Y", _univariate(od().C_Y, 1), c_y_reference())),
        GalleryItem("a0-c2-psd", "verifies-exact", _a0_c2),
        GalleryItem("corner-det", "determinant-matches", _corner_det),
        GalleryItem("corner-shift", "determinant-matches", _corner_shift),
        GalleryItem("corner-domination", "rejects", _corner_domination),
    ]


def _mlambda_zero():
    try:
        mlambda_certificate(0)
    except ValueError as exc:
        return "rejects", str(exc)
    return "fail", "lambda = 0 accepted"


def _run(item: GalleryItem) -> ItemResult:
    t0 = time.perf_counter()
    try:
        status, detail = item.run()
    except Exception as exc:  # reported, never raised
        status, detail = "error", f"{type(exc).__name__}: {exc}"
    return ItemResult(item.id, item.expected_status, status, time.perf_counter() - t0, detail)


@dataclass
class GalleryReport:
    results: list[ItemResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results)

    def to_dict(self) -> dict:
        return {"ok": self.ok, "items": [r.to_dict() for r in self.results]}


def run_gallery(pattern: str = "*", workers: int = 1) -> GalleryReport:
    """Run the items whose id matches the glob ``pattern``; results keep gallery order."""
    chosen = [it for it in items() if fnmatch.fnmatchcase(it.id, pattern)]
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            results = list(ex.map(_run, chosen))
    else:
        results = [_run(it) for it in chosen]
    return GalleryReport(results)

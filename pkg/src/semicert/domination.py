"""Domination condition, orthant certificates, and local certificates at 0+ in one variable."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .certkit import (
    CertificateTerm,
    CertifiedPiece,
    ConstPSD,
    PiecewiseCertificate,
    Sampled,
    SemiAlgebraicPiece,
    box_piece,
    box_proof,
    pd_constant,
    psd_constant,
    rank_one,
)
from .matpoly import MatrixPolynomial, smith_normal_form, unimodular_inverse
from .polycore import Polynomial, as_fraction, multi_factorial
from . import univariate as uv

MultiIndex = tuple[int, ...]
Matrix = tuple[tuple[Fraction, ...], ...]

R_BOUND = Fraction(2**32)
R_DENOMINATOR = 2**16


def _freeze(rows) -> Matrix:
    return tuple(tuple(as_fraction(v) for v in r) for r in rows)


def _lin(a: Matrix, ca, b: Matrix, cb) -> Matrix:
    return tuple(tuple(ca * x + cb * y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def _leq(b: MultiIndex, a: MultiIndex) -> bool:
    return all(x <= y for x, y in zip(b, a))


# -- Taylor data ------------------------------------------------------------------------


def derivative_matrices(A: MatrixPolynomial, x0: Sequence[object]) -> dict[MultiIndex, Matrix]:
    """Nonzero ``A^(alpha)(x0)``: the Taylor coefficient of ``X^alpha`` in ``A(x0+X)`` times ``alpha!``."""
    shifted = A.taylor_shift(x0)
    m = A.size
    out: dict[MultiIndex, list[list[Fraction]]] = {}
    for i in range(m):
        for j in range(m):
            for exps, c in shifted[i, j].terms.items():
                out.setdefault(exps, [[Fraction(0)] * m for _ in range(m)])[i][j] = c * multi_factorial(exps)
    return {a: _freeze(v) for a, v in sorted(out.items())}


@dataclass(frozen=True)
class GammaSet:
    elements: tuple[MultiIndex, ...]
    derivatives: dict[MultiIndex, Matrix] = field(compare=False)

    @property
    def all_even(self) -> bool:
        return all(k % 2 == 0 for b in self.elements for k in b)


def gamma_set(A: MatrixPolynomial, x0: Sequence[object]) -> GammaSet:
    """Minimal multi-indices (componentwise) with a nonvanishing derivative matrix at ``x0``, in lex order."""
    if A.is_zero():
        raise ValueError("the zero matrix has no Gamma set")
    ders = derivative_matrices(A, x0)
    support = list(ders)
    minimal = [b for b in support if not any(a != b and _leq(a, b) for a in support)]
    return GammaSet(tuple(sorted(minimal)), ders)


def minimal_r(B, A, bound: Fraction = R_BOUND, denominator: int = R_DENOMINATOR) -> Fraction | None:
    """Smallest ``r = k / denominator`` with ``r*B + A`` and ``r*B - A`` psd, or ``None`` if ``r = bound`` fails."""
    B = _freeze(B)
    A = _freeze(A)
    if not psd_constant(B):
        raise ValueError("B must be psd")

    def ok(r: Fraction) -> bool:
        return psd_constant(_lin(B, r, A, 1)) and psd_constant(_lin(B, r, A, -1))

    if not ok(bound):
        return None
    lo, hi = -1, int(bound * denominator)  # ok(hi) holds; lo is a sentinel that fails
    if ok(Fraction(0)):
        return Fraction(0)
    lo = 0
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(Fraction(mid, denominator)):
            hi = mid
        else:
            lo = mid
    return Fraction(hi, denominator)


@dataclass(frozen=True)
class DominationWitness:
    gamma: GammaSet
    assignment: dict[MultiIndex, tuple[MultiIndex, Fraction]]
    x0: tuple[Fraction, ...]

    def valid(self) -> bool:
        ders = self.gamma.derivatives
        for a, (b, r) in self.assignment.items():
            if b not in self.gamma.elements or not _leq(b, a):
                return False
            B, Aa = ders[b], ders.get(a)
            if Aa is None:
                continue
            if not (psd_constant(_lin(B, r, Aa, 1)) and psd_constant(_lin(B, r, Aa, -1))):
                return False
        return True


@dataclass(frozen=True)
class DominationFailure:
    alpha: MultiIndex
    gamma: GammaSet

    def __bool__(self) -> bool:
        return False


def check_domination(A: MatrixPolynomial, x0: Sequence[object]) -> DominationWitness | DominationFailure:
    """Find ``beta`` in Gamma below each ``alpha`` with a valid ``r``; the lex-smallest such ``beta`` wins."""
    x0 = tuple(as_fraction(v) for v in x0)
    gamma = gamma_set(A, x0)
    ders = gamma.derivatives
    assignment = {}
    for a, Aa in ders.items():
        if a in gamma.elements:
            continue
        found = None
        for b in gamma.elements:
            if not _leq(b, a) or not psd_constant(ders[b]):
                continue
            r = minimal_r(ders[b], Aa)
            if r is not None:
                found = (b, r)
                break
        if found is None:
            return DominationFailure(a, gamma)
        assignment[a] = found
    return DominationWitness(gamma, assignment, x0)


# -- orthant certificates ---------------------------------------------------------------------


@dataclass(frozen=True)
class Orthant:
    center: tuple[Fraction, ...]
    signs: tuple[int, ...]
    box_radius: Fraction

    def contains(self, x: Sequence[object]) -> bool:
        return all(0 < s * (as_fraction(v) - c) < self.box_radius for v, c, s in zip(x, self.center, self.signs))


def _monomial(exps: MultiIndex, coef=1) -> Polynomial:
    return Polynomial.monomial(exps, coef)


def _sign_power(signs: Sequence[int], exps: MultiIndex) -> int:
    return -1 if sum(k for s, k in zip(signs, exps) if s < 0) % 2 else 1


def orthant_certificate_from_domination(A: MatrixPolynomial, x0: Sequence[object], signs: Sequence[int] | None,
                                        witness: DominationWitness, names: Sequence[str] | None = None):
    """Certificate for ``A(x0 + signs*X)`` on the box ``0 <= X_i <= R``.

    Every ``beta`` in Gamma gets ``X^beta/beta! * (1 - sum s^beta beta!/alpha! r X^(alpha-beta))`` on
    ``s^beta A^(beta)(x0)``, and every dominated ``alpha`` gets ``X^alpha/alpha!`` on
    ``s^alpha A^(alpha)(x0) + r A^(beta)(x0)``. Returns ``(certificate, orthant)``.
    """
    n = A.nvars
    x0 = tuple(as_fraction(v) for v in x0)
    signs = tuple(signs) if signs is not None else (1,) * n
    if witness.x0 != x0 or not witness.valid():
        raise ValueError("invalid domination witness for this point")
    ders = witness.gamma.derivatives
    delta: dict[MultiIndex, list[tuple[MultiIndex, Fraction]]] = {b: [] for b in witness.gamma.elements}
    for a, (b, r) in sorted(witness.assignment.items()):
        delta[b].append((a, r))

    # box radius: the bracket stays >= 1/2 on [0, R]^n
    R = Fraction(1)
    for _ in range(200):
        if all(
            sum((abs(Fraction(multi_factorial(b), multi_factorial(a)) * r) * R ** (sum(a) - sum(b))
                 for a, r in delta[b]), Fraction(0)) <= Fraction(1, 2)
            for b in delta
        ):
            break
        R /= 2
    piece = box_piece([(0, R)] * n, "orthant")
    piece = SemiAlgebraicPiece(piece.constraints, f"orthant at {_fmt(x0)} signs {signs}", piece.box)

    terms = []
    for b in witness.gamma.elements:
        sb = _sign_power(signs, b)
        factor = _lin(ders[b], sb, ders[b], 0)
        if not psd_constant(factor):
            raise ValueError(f"s^beta A^(beta) is not psd for beta={b}; this orthant cannot be certified")
        bracket = Polynomial.const(1, n)
        for a, r in delta[b]:
            diff = tuple(x - y for x, y in zip(a, b))
            bracket = bracket - _monomial(diff, sb * Fraction(multi_factorial(b), multi_factorial(a)) * r)
        w = _monomial(b, Fraction(1, multi_factorial(b))) * bracket
        terms.append(CertificateTerm(w, ConstPSD(factor), _proof(w, piece)))
        for a, r in delta[b]:
            sa = _sign_power(signs, a)
            Q = _lin(ders.get(a, _lin(factor, 0, factor, 0)), sa, ders[b], r)
            w = _monomial(a, Fraction(1, multi_factorial(a)))
            terms.append(CertificateTerm(w, ConstPSD(Q), _proof(w, piece)))
    target = A.taylor_shift(x0, signs)
    cert = PiecewiseCertificate(target, (CertifiedPiece(piece, tuple(terms)),), tuple(names) if names else None, piece)
    return cert, Orthant(x0, signs, R)


def _proof(w: Polynomial, piece: SemiAlgebraicPiece):
    p = box_proof(w, piece)
    return p if p is not None else Sampled()


def _fmt(x) -> str:
    return "(" + ",".join(str(v) for v in x) + ")"


# -- one variable at 0+ ------------------------------------------------------------------------------


def _interval_piece(delta: Fraction, label: str) -> SemiAlgebraicPiece:
    return box_piece([(0, delta)], label)


def _sampled_psd_near_zero(M: MatrixPolynomial, delta0: Fraction, samples: int = 50) -> Fraction | None:
    for k in range(1, samples + 1):
        t = delta0 * Fraction(k, samples)
        if not psd_constant(M.evaluate([t])):
            return t
    return None


def _support(N: MatrixPolynomial) -> list[int]:
    m = N.size
    return [i for i in range(m) if any(not N[i, j].is_zero() for j in range(m))]


@dataclass(frozen=True)
class ZeroPlusCertificate:
    certificate: PiecewiseCertificate
    delta: Fraction
    exponents: tuple[int, ...]
    mus: tuple[Fraction, ...]
    smith: object = None


def univariate_certificate_at_zero(M: MatrixPolynomial, delta0=Fraction(1, 2), names: Sequence[str] | None = None
                                   ) -> ZeroPlusCertificate:
    """Certificate for a univariate symmetric ``M`` on ``[0, delta]`` built from its Smith form."""
    if M.nvars != 1 or not M.is_symmetric():
        raise ValueError("need a symmetric matrix polynomial in one variable")
    delta0 = as_fraction(delta0)
    bad = _sampled_psd_near_zero(M, delta0)
    if bad is not None:
        raise ValueError(f"M is not psd at t={bad}")
    m = M.size
    if pd_constant(M.evaluate([0])):
        w = check_domination(M, (0,))
        cert, orth = orthant_certificate_from_domination(M, (0,), (1,), w, names)
        return ZeroPlusCertificate(cert, orth.box_radius, (0,), ())

    smith = smith_normal_form(M)
    E, D, F = smith.E, smith.D, smith.F
    Finv = unimodular_inverse(F)
    Ep = Finv.T @ E  # (F^T)^-1 M F^-1 = Ep @ D
    diag = smith.diagonal
    rank = sum(1 for d in diag if not d.is_zero())
    if rank == 0:
        raise ValueError("M is identically zero")
    # split d_i = t^k_i * u_i with u_i(0) != 0 and push u_i into the columns of Ep
    exps = [uv.order_at_zero(d) for d in diag[:rank]]
    units = [Polynomial(1, {(k - exps[i],): c for (k,), c in diag[i].terms.items()}) for i in range(rank)]
    t = Polynomial.var(0, 1)
    Ehat = MatrixPolynomial([[Ep[i, j] * units[j] for j in range(rank)] for i in range(rank)], 1)
    Mr = MatrixPolynomial([[Ehat[i, j] * t ** exps[j] for j in range(rank)] for i in range(rank)], 1)
    if not Mr.is_symmetric():
        raise ArithmeticError("reduced matrix is not symmetric")

    # blocks of equal exponent
    levels = sorted(set(exps))
    blocks = [[i for i in range(rank) if exps[i] == e] for e in levels]
    below = [[i for blk in blocks[:b] for i in blk] for b in range(len(blocks))]

    def hook(b: int) -> MatrixPolynomial:
        rows = []
        for i in range(rank):
            row = []
            for j in range(rank):
                inside = (i in blocks[b] and (j in blocks[b] or j in below[b])) or (j in blocks[b] and i in below[b])
                row.append(Mr[i, j].exact_div(t ** levels[b]) if inside and not Mr[i, j].is_zero() else Polynomial.zero(1))
            rows.append(row)
        return MatrixPolynomial(rows, 1)

    hooks = [hook(b) for b in range(len(blocks))]
    mus = [Fraction(0)] * len(blocks)

    def proj(idx: Sequence[int]) -> MatrixPolynomial:
        return MatrixPolynomial.diagonal([Polynomial.const(1 if i in idx else 0, 1) for i in range(rank)])

    def build(b: int) -> MatrixPolynomial:
        N = hooks[b]
        if mus[b]:
            N = N + proj(below[b]).scale(mus[b])
        for j in range(b + 1, len(blocks)):
            if mus[j]:
                N = N - proj(blocks[b]).scale(t ** (levels[j] - levels[b])).scale(mus[j])
        return N

    for b in range(1, len(blocks)):
        cross = any(not hooks[b][i, j].is_zero() for i in blocks[b] for j in below[b])
        if not cross:
            continue
        mu = Fraction(1)
        while True:
            mus[b] = mu
            N0 = hooks[b].evaluate([0])
            idx = below[b] + blocks[b]
            sub = [[N0[i][j] + (mu if i == j and i in below[b] else 0) for j in idx] for i in idx]
            if pd_constant(sub):
                break
            mu *= 2
            if mu > R_BOUND:
                raise ArithmeticError("no mu found")

    pieces_terms = []
    delta = delta0
    for b in range(len(blocks)):
        N = build(b)
        idx = _support(N)
        if not idx:
            continue
        sub = N.submatrix(idx, idx)
        if not pd_constant(sub.evaluate([0])):
            raise ArithmeticError(f"block {b} is not positive definite at 0")
        w = check_domination(sub, (0,))
        cert_b, orth = orthant_certificate_from_domination(sub, (0,), (1,), w)
        delta = min(delta, orth.box_radius)
        pieces_terms.append((b, idx, cert_b))

    piece = _interval_piece(delta, "interval [0, delta] at 0+")
    terms = []
    for b, idx, cert_b in pieces_terms:
        scale = t ** levels[b]
        for term in cert_b.pieces[0].terms:
            Q = [[Fraction(0)] * m for _ in range(m)]
            for a, i in enumerate(idx):
                for c, j in enumerate(idx):
                    Q[i][j] = term.factor.Q[a][c]
            w = term.weight * scale
            proof = box_proof(w, piece)
            terms.append(CertificateTerm(w, ConstPSD(_freeze(Q), F), proof if proof is not None else Sampled(50)))
    cert = PiecewiseCertificate(M, (CertifiedPiece(piece, tuple(terms)),), tuple(names) if names else None, piece)
    return ZeroPlusCertificate(cert, delta, tuple(exps), tuple(mus), smith)


# -- 2x2 quadratic case analysis ----------------------------------------------------------------


@dataclass(frozen=True)
class Uncertified:
    reason: str

    def __bool__(self) -> bool:
        return False


@dataclass(frozen=True)
class QuadraticCertificate:
    branch: str
    certificate: PiecewiseCertificate
    parameters: dict


QUADRATIC_BRANCHES = ("c1>0", "c1=0,c2>b1^2", "c2=b1^2,b1=0", "a1c2-2b1b2>0", "a1c2-2b1b2=0")


def quadratic_matrix(a1, a2, b1, b2, c1, c2) -> MatrixPolynomial:
    """``diag(1, 0) + x [[a1, b1], [b1, c1]] + x^2 [[a2, b2], [b2, c2]]``."""
    a1, a2, b1, b2, c1, c2 = map(as_fraction, (a1, a2, b1, b2, c1, c2))
    x = Polynomial.var(0, 1)
    one = Polynomial.const(1, 1)
    return MatrixPolynomial([
        [one + x.scale(a1) + (x * x).scale(a2), x.scale(b1) + (x * x).scale(b2)],
        [x.scale(b1) + (x * x).scale(b2), x.scale(c1) + (x * x).scale(c2)],
    ], 1)


def quadratic_branch(a1, a2, b1, b2, c1, c2) -> str | Uncertified:
    a1, a2, b1, b2, c1, c2 = map(as_fraction, (a1, a2, b1, b2, c1, c2))
    if c1 < 0:
        return Uncertified("c1 < 0: the (2,2) entry is negative near 0+")
    if c1 > 0:
        return "c1>0"
    if c2 < b1 * b1:
        return Uncertified("c1 = 0 and c2 < b1^2: not psd near 0+")
    if c2 > b1 * b1:
        return "c1=0,c2>b1^2"
    if b1 == 0:
        return "c2=b1^2,b1=0" if b2 == 0 else Uncertified("b1 = c2 = 0 needs b2 = 0")
    key = a1 * c2 - 2 * b1 * b2
    if key > 0:
        return "a1c2-2b1b2>0"
    if key < 0:
        return Uncertified("a1*c2 - 2*b1*b2 < 0: not psd near 0+")
    if a2 * b1 * b1 - b2 * b2 < 0:
        return Uncertified("a2*b1^2 - b2^2 < 0: not psd near 0+")
    return "a1c2-2b1b2=0"


def certify_quadratic_2x2(a1, a2, b1, b2, c1, c2) -> QuadraticCertificate | Uncertified:
    """Explicit certificate at 0+ for ``diag(1,0) + x*A1 + x^2*A2`` following its case analysis."""
    a1, a2, b1, b2, c1, c2 = map(as_fraction, (a1, a2, b1, b2, c1, c2))
    branch = quadratic_branch(a1, a2, b1, b2, c1, c2)
    if isinstance(branch, Uncertified):
        return branch
    x = Polynomial.var(0, 1)
    one = Polynomial.const(1, 1)
    x2 = x * x
    E11 = ((1, 0), (0, 0))
    E22 = ((0, 0), (0, 1))
    parts: list[tuple[Polynomial, object]] = []  # (weight, factor)
    params: dict = {}
    if branch == "c1>0":
        mu = max(Fraction(0), 2 * b1 * b1 / c1 - a1)
        beta = max(Fraction(0), 2 * (1 - c2) / c1)
        s = c2 + beta * c1 / 2
        alpha = max(Fraction(0), b2 * b2 / s - a2)
        params = {"mu": mu, "alpha": alpha, "beta": beta}
        parts = [
            (one - x.scale(mu) - x2.scale(alpha), ConstPSD(E11)),
            (x, ConstPSD(((a1 + mu, b1), (b1, c1 / 2)))),
            ((x - x2.scale(beta)).scale(c1 / 2), ConstPSD(E22)),
            (x2, ConstPSD(((a2 + alpha, b2), (b2, s)))),
        ]
        bound = lambda R: 1 - mu * R - alpha * R * R >= Fraction(1, 2) and beta * R <= Fraction(1, 2)
    elif branch == "c1=0,c2>b1^2":
        eps = (1 - b1 * b1 / c2) / 2
        s = c2 - b1 * b1 / (1 - eps)
        alpha = max(Fraction(0), b2 * b2 / s - a2)
        params = {"epsilon": eps, "alpha": alpha}
        parts = [
            (Polynomial.const(eps, 1) + x.scale(a1) - x2.scale(alpha), ConstPSD(E11)),
            (Polynomial.const(1 - eps, 1), rank_one([one, x.scale(b1 / (1 - eps))], 1)),
            (x2, ConstPSD(((a2 + alpha, b2), (b2, s)))),
        ]
        bound = lambda R: eps - abs(a1) * R - alpha * R * R >= eps / 2
    elif branch == "c2=b1^2,b1=0":
        parts = [(one + x.scale(a1) + x2.scale(a2), ConstPSD(E11))]
        bound = lambda R: 1 - abs(a1) * R - abs(a2) * R * R >= Fraction(1, 2)
    else:
        k1 = a1 - 2 * b2 / b1
        k2 = a2 - (b2 / b1) ** 2
        params = {"linear": k1, "quadratic": k2}
        parts = [
            (x.scale(k1) + x2.scale(k2), ConstPSD(E11)),
            (one, rank_one([one + x.scale(b2 / b1), x.scale(b1)], 1)),
        ]
        if branch == "a1c2-2b1b2>0":
            bound = lambda R: k1 - abs(k2) * R >= k1 / 2
        else:
            bound = lambda R: True
    R = Fraction(1)
    while not bound(R):
        R /= 2
    piece = _interval_piece(R, f"[0, {R}] ({branch})")
    terms = []
    for w, fac in parts:
        proof = box_proof(w, piece)
        terms.append(CertificateTerm(w, fac, proof if proof is not None else Sampled(200)))
    cert = PiecewiseCertificate(quadratic_matrix(a1, a2, b1, b2, c1, c2), (CertifiedPiece(piece, tuple(terms)),), ("x",), piece)
    params["delta"] = R
    return QuadraticCertificate(branch, cert, params)

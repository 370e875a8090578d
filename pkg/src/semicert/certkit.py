"""Piecewise certificate data model, exact psd tests, and the certificate verifier.

A certificate for a symmetric matrix polynomial ``M`` is a list of pieces. Each
piece is a basic semi-algebraic set ``{g_k >= 0}`` together with terms
``f_j * F_j`` whose sum must equal ``M`` exactly, where ``F_j`` is a hermitian
square ``U^T U``, a constant psd matrix (optionally under a congruence
``P^T Q P``), or a univariate psd matrix polynomial. Each weight ``f_j`` carries
a proof that it is nonnegative on the piece.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, Union

import numpy as np

from . import fasteval as fe
from . import univariate as uv
from .matpoly import MatrixPolynomial, principal_minor, rational_matrix
from .polycore import Polynomial, as_fraction

Point = tuple[Fraction, ...]


class CertificateError(ValueError):
    """A certificate or proof object is malformed."""


# -- exact psd tests -------------------------------------------------------


def charpoly(Q: Sequence[Sequence[object]]) -> list[Fraction]:
    """Coefficients ``c_0..c_m`` of ``det(lambda*I - Q)`` (Faddeev-LeVerrier)."""
    A = rational_matrix(Q)
    m = len(A)
    c = [Fraction(0)] * (m + 1)
    c[m] = Fraction(1)
    Mk = [[Fraction(0)] * m for _ in range(m)]
    for k in range(1, m + 1):
        Mk = [
            [sum((A[i][t] * Mk[t][j] for t in range(m)), Fraction(0)) + (c[m - k + 1] if i == j else 0)
             for j in range(m)]
            for i in range(m)
        ]
        trace = sum(sum(A[i][t] * Mk[t][i] for t in range(m)) for i in range(m))
        c[m - k] = -trace / k
    return c


def _is_symmetric(A: list[list[Fraction]]) -> bool:
    return all(len(r) == len(A) for r in A) and all(A[i][j] == A[j][i] for i in range(len(A)) for j in range(i))


def psd_constant(Q: Sequence[Sequence[object]]) -> bool:
    """Exact psd test: the characteristic polynomial has alternating coefficient signs."""
    A = rational_matrix(Q)
    if not _is_symmetric(A):
        raise ValueError("psd_constant needs a symmetric matrix")
    m = len(A)
    c = charpoly(A)
    # all roots of det(lambda I - Q) are >= 0  <=>  (-1)^(m-k) c_k >= 0 for every k
    return all((c[k] if (m - k) % 2 == 0 else -c[k]) >= 0 for k in range(m + 1))


def pd_constant(Q: Sequence[Sequence[object]]) -> bool:
    """Exact positive definiteness test."""
    A = rational_matrix(Q)
    return psd_constant(A) and charpoly(A)[0] != 0


def negative_direction(Q: Sequence[Sequence[object]]) -> tuple[Fraction, ...] | None:
    """A rational vector ``v`` with ``v^T Q v < 0``, or ``None`` if none was found."""
    A = rational_matrix(Q)
    m = len(A)

    def form(v):
        return sum(v[i] * A[i][j] * v[j] for i in range(m) for j in range(m))

    candidates: list[tuple[Fraction, ...]] = []
    try:
        w, V = np.linalg.eigh(np.array([[float(a) for a in r] for r in A]))
        for scale in (2**10, 2**20, 2**30):
            candidates.append(tuple(Fraction(round(float(x) * scale), scale) for x in V[:, 0]))
    except Exception:  # numpy is only a heuristic source of candidates
        pass
    for coords in itertools.product((-1, 0, 1), repeat=min(m, 6)):
        candidates.append(tuple(Fraction(c) for c in coords) + (Fraction(0),) * (m - len(coords)))
    for v in candidates:
        if any(v) and form(v) < 0:
            return v
    return None


def as_univariate(p: Polynomial) -> tuple[Polynomial, int | None]:
    """Project a polynomial using at most one variable into ``Q[t]``; returns ``(q, var_index)``."""
    used = p.variables_used()
    if len(used) > 1:
        raise ValueError("polynomial depends on more than one variable")
    if not used:
        return Polynomial.const(p.constant_term(), 1), None
    (i,) = used
    return Polynomial(1, {(e[i],): c for e, c in p.terms.items()}), i


def psd_univariate_scalar(p: Polynomial) -> bool:
    """Exact test that a univariate polynomial is nonnegative on all of R."""
    if p.nvars != 1:
        p, _ = as_univariate(p)
    if p.is_zero():
        return True
    lc = p.leading_term()[1]
    if lc < 0 or p.degree % 2:
        return False
    _, factors = uv.squarefree_decomposition(p)
    odd = Polynomial.const(1, 1)
    for mult, f in enumerate(factors, start=1):
        if mult % 2:
            odd = odd * f
    return odd.degree < 1 or uv.count_real_roots(odd) == 0


def negative_point_univariate(p: Polynomial) -> Fraction | None:
    """A rational ``t`` with ``p(t) < 0`` for a univariate ``p`` that is not psd."""
    if p.nvars != 1:
        p, _ = as_univariate(p)
    if p.is_zero():
        return None
    big = uv.cauchy_bound(p) + 1
    candidates = [big, -big, Fraction(0)]
    sf = uv.squarefree_part(p)
    if sf.degree >= 1:
        ends = []
        for lo, hi in uv.isolate_real_roots(sf, Fraction(1, 2**24)):
            ends += [lo, hi]
        ends.sort()
        candidates += ends + [(a + b) / 2 for a, b in zip(ends, ends[1:])]
    for t in candidates:
        if p.evaluate([t]) < 0:
            return t
    return None


def psd_univariate_matrix(A: MatrixPolynomial, max_size: int = 4) -> bool:
    """Exact test that ``A(t)`` is psd for every real ``t`` (all principal minors psd on R)."""
    if not A.is_symmetric():
        raise ValueError("psd_univariate_matrix needs a symmetric matrix")
    m = A.size
    if m > max_size:
        raise ValueError(f"size {m} exceeds the limit {max_size}")
    used = set().union(*(e.variables_used() for r in A.rows for e in r))
    if len(used) > 1:
        raise ValueError("matrix polynomial depends on more than one variable")
    for k in range(1, m + 1):
        for S in itertools.combinations(range(m), k):
            if not psd_univariate_scalar(as_univariate(principal_minor(A, S))[0]):
                return False
    return True


def univariate_matrix_witness(A: MatrixPolynomial) -> tuple[Fraction, tuple[int, ...]] | None:
    """``(t, S)`` such that the principal minor on ``S`` is negative at ``t``."""
    m = A.size
    for k in range(1, m + 1):
        for S in itertools.combinations(range(m), k):
            q, _ = as_univariate(principal_minor(A, S))
            if not psd_univariate_scalar(q):
                t = negative_point_univariate(q)
                if t is not None:
                    return t, S
    return None


# -- data model -------------------------------------------------------------


@dataclass(frozen=True)
class SemiAlgebraicPiece:
    """``{x : g(x) >= 0 for every g in constraints}``; ``box`` bounds where to sample it."""

    constraints: tuple[Polynomial, ...]
    label: str = ""
    box: tuple[tuple[Fraction, Fraction], ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "constraints", tuple(self.constraints))
        if self.box is not None:
            object.__setattr__(
                self, "box", tuple((as_fraction(lo), as_fraction(hi)) for lo, hi in self.box)
            )

    def contains(self, point: Sequence[object]) -> bool:
        return all(g.evaluate(point) >= 0 for g in self.constraints)


@dataclass(frozen=True)
class ExplicitSOS:
    """``f == sum c_k * s_k**2`` with every ``c_k >= 0``."""

    squares: tuple[tuple[Fraction, Polynomial], ...]

    def __post_init__(self):
        object.__setattr__(self, "squares", tuple((as_fraction(c), s) for c, s in self.squares))


@dataclass(frozen=True)
class ConeCombination:
    """``f == sum c_k * s_k**2 * prod(g_i for i in gens_k)`` over the piece's constraints ``g_i``.

    An empty ``gens_k`` is a plain weighted square, so an SOS remainder fits in the same list.
    """

    items: tuple[tuple[Fraction, Polynomial, tuple[int, ...]], ...]

    def __post_init__(self):
        object.__setattr__(
            self, "items", tuple((as_fraction(c), s, tuple(g)) for c, s, g in self.items)
        )


@dataclass(frozen=True)
class Sampled:
    """No exact proof: nonnegativity is only spot-checked at ``n`` seeded samples."""

    n: int = 200
    seed: int = 0


Proof = Union[ExplicitSOS, ConeCombination, Sampled]


@dataclass(frozen=True)
class Square:
    """Hermitian square ``U^T U`` of an ``r x m`` matrix polynomial ``U``."""

    U: MatrixPolynomial

    def matrix(self) -> MatrixPolynomial:
        return self.U.gram()


@dataclass(frozen=True)
class ConstPSD:
    """Constant psd ``Q`` (``r x r``), optionally under the congruence ``P^T Q P``."""

    Q: tuple[tuple[Fraction, ...], ...]
    outer: MatrixPolynomial | None = None

    def __post_init__(self):
        object.__setattr__(self, "Q", tuple(tuple(as_fraction(v) for v in r) for r in self.Q))

    def matrix(self, nvars: int) -> MatrixPolynomial:
        Qm = MatrixPolynomial(self.Q, nvars)
        if self.outer is None:
            return Qm
        return self.outer.T @ Qm @ self.outer


@dataclass(frozen=True)
class PolyPSD:
    """Symmetric matrix polynomial in a single variable that is psd on all of R."""

    P: MatrixPolynomial

    def matrix(self) -> MatrixPolynomial:
        return self.P


Factor = Union[Square, ConstPSD, PolyPSD]


@dataclass(frozen=True)
class CertificateTerm:
    weight: Polynomial
    factor: Factor
    proof: Proof = Sampled()

    def factor_matrix(self) -> MatrixPolynomial:
        if isinstance(self.factor, ConstPSD):
            return self.factor.matrix(self.weight.nvars)
        return self.factor.matrix()

    def contribution(self) -> MatrixPolynomial:
        return self.factor_matrix().scale(self.weight)


@dataclass(frozen=True)
class CertifiedPiece:
    piece: SemiAlgebraicPiece
    terms: tuple[CertificateTerm, ...]

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))

    def total(self, m: int, nvars: int) -> MatrixPolynomial:
        acc = MatrixPolynomial.zeros(m, m, nvars)
        for term in self.terms:
            acc = acc + term.contribution()
        return acc


@dataclass(frozen=True)
class PiecewiseCertificate:
    """Target matrix plus one exact identity per piece.

    ``domain`` is the region the pieces are meant to cover (``None``: all of R^n).
    """

    target: MatrixPolynomial
    pieces: tuple[CertifiedPiece, ...]
    names: tuple[str, ...] | None = None
    domain: SemiAlgebraicPiece | None = None

    def __post_init__(self):
        object.__setattr__(self, "pieces", tuple(self.pieces))
        if self.names is not None:
            object.__setattr__(self, "names", tuple(self.names))
            if len(self.names) != self.target.nvars:
                raise CertificateError("number of variable names does not match the ring")

    @property
    def nvars(self) -> int:
        return self.target.nvars


# -- sampling ---------------------------------------------------------------

SAMPLE_DENOMINATOR = 2**12


class _GridPoints:
    """Exact rational points ``lo + (hi - lo) * k / D``, built only when indexed."""

    def __init__(self, box: Sequence[tuple[Fraction, Fraction]], ints: np.ndarray):
        self.box = box
        self.ints = ints

    def __len__(self) -> int:
        return len(self.ints)

    def __getitem__(self, k: int) -> Point:
        D = SAMPLE_DENOMINATOR
        return tuple(lo + (hi - lo) * Fraction(int(v), D) for (lo, hi), v in zip(self.box, self.ints[k]))

    def floats(self) -> np.ndarray:
        lo = np.array([float(a) for a, _ in self.box])
        hi = np.array([float(b) for _, b in self.box])
        return lo + (hi - lo) * (self.ints / SAMPLE_DENOMINATOR)


def sample_points(piece: SemiAlgebraicPiece, n: int, seed: int, nvars: int) -> tuple[list[Point], int]:
    """Up to ``n`` rational points of ``piece``; also returns the number of draws."""
    if n < 1:
        raise ValueError("need at least one sample")
    rng = np.random.default_rng(seed)
    box = piece.box or tuple((Fraction(-1), Fraction(1)) for _ in range(nvars))
    compiled = [fe.CompiledPolynomial(g) for g in piece.constraints]
    out: list[Point] = []
    draws = 0
    while len(out) < n and draws < 100 * n:
        k = min(max(4 * n, 64), 100 * n - draws)
        cand = _GridPoints(box, rng.integers(0, SAMPLE_DENOMINATOR, size=(k, nvars), endpoint=True))
        draws += k
        mask = fe.member_mask(compiled, cand.floats(), cand)
        out += [cand[i] for i in np.nonzero(mask)[0][: n - len(out)]]
    return out[:n], draws


def points_in(piece: SemiAlgebraicPiece, points: Sequence[Point], nvars: int) -> list[Point]:
    if not points:
        return []
    compiled = [fe.CompiledPolynomial(g) for g in piece.constraints]
    mask = fe.member_mask(compiled, fe.to_array(points, nvars), points)
    return [p for p, keep in zip(points, mask) if keep]


@dataclass(frozen=True)
class SampleResult:
    samples: int
    witness: Point | None = None
    empty: bool = False

    @property
    def ok(self) -> bool:
        return self.witness is None


def _first_negative(f: Polynomial, pts: list[Point]) -> Point | None:
    k = fe.first_negative(fe.CompiledPolynomial(f), fe.to_array(pts, f.nvars), pts)
    return None if k is None else pts[k]


def sample_nonneg(f: Polynomial, piece: SemiAlgebraicPiece, n: int = 200, seed: int = 0,
                  extra_points: Iterable[Sequence[object]] = ()) -> SampleResult:
    """Rejection-sample ``piece`` and report the first point where ``f < 0``."""
    pts, _ = sample_points(piece, n, seed, f.nvars)
    extra = [tuple(as_fraction(v) for v in p) for p in extra_points]
    pts = pts + points_in(piece, extra, f.nvars)
    wit = _first_negative(f, pts)
    return SampleResult(len(pts), wit, empty=not pts)


# -- Bernstein proofs on boxes ----------------------------------------------------


def _axis_transform(d: int, lo: Fraction, hi: Fraction) -> list[list[Fraction]]:
    """Row ``k``: coefficients of ``x**k`` in the basis ``u**j * v**(d-j)``, ``u = x-lo``, ``v = hi-x``."""
    w = hi - lo
    T = [[Fraction(0)] * (d + 1) for _ in range(d + 1)]
    for k in range(d + 1):
        for a in range(k + 1):
            ca = math.comb(k, a) * lo ** (k - a)
            if not ca:
                continue
            scale = ca / w ** (d - a)
            for b in range(d - a + 1):
                T[k][a + b] += scale * math.comb(d - a, b)
    return T


def bernstein_proof(f: Polynomial, box: Sequence[tuple[object, object]],
                    lower: Sequence[int], upper: Sequence[int]) -> ConeCombination | None:
    """Exact nonnegativity proof of ``f`` on a box from nonnegative Bernstein coefficients.

    ``lower[i]`` / ``upper[i]`` index the piece constraints ``x_i - lo_i`` / ``hi_i - x_i``.
    Returns ``None`` when some coefficient is negative.
    """
    n = f.nvars
    box = [(as_fraction(lo), as_fraction(hi)) for lo, hi in box]
    degs = [max(f.degree_in(i), 0) for i in range(n)]
    T = [_axis_transform(degs[i], *box[i]) for i in range(n)]
    coeffs: dict[tuple[int, ...], Fraction] = {}
    for exps, c in f.terms.items():
        per_axis = [[(j, v) for j, v in enumerate(T[i][exps[i]]) if v] for i in range(n)]
        for combo in itertools.product(*per_axis):
            J = tuple(j for j, _ in combo)
            v = c
            for _, t in combo:
                v *= t
            coeffs[J] = coeffs.get(J, Fraction(0)) + v
    if any(v < 0 for v in coeffs.values()):
        return None
    u = [Polynomial.var(i, n) - box[i][0] for i in range(n)]
    w = [box[i][1] - Polynomial.var(i, n) for i in range(n)]
    items = []
    for J, v in sorted(coeffs.items()):
        if not v:
            continue
        sq = Polynomial.const(1, n)
        gens = []
        for i, j in enumerate(J):
            sq = sq * u[i] ** (j // 2) * w[i] ** ((degs[i] - j) // 2)
            if j % 2:
                gens.append(lower[i])
            if (degs[i] - j) % 2:
                gens.append(upper[i])
        items.append((v, sq, tuple(gens)))
    return ConeCombination(tuple(items))


def box_piece(box: Sequence[tuple[object, object]], label: str = "") -> SemiAlgebraicPiece:
    """Piece ``lo_i <= x_i <= hi_i``; constraint ``2i`` is ``x_i - lo_i``, ``2i+1`` is ``hi_i - x_i``."""
    n = len(box)
    cons = []
    for i, (lo, hi) in enumerate(box):
        xi = Polynomial.var(i, n)
        cons += [xi - as_fraction(lo), as_fraction(hi) - xi]
    return SemiAlgebraicPiece(tuple(cons), label, tuple(box))


def box_proof(f: Polynomial, piece: SemiAlgebraicPiece) -> ConeCombination | None:
    """Bernstein proof for a piece built by :func:`box_piece`."""
    n = f.nvars
    return bernstein_proof(f, piece.box, [2 * i for i in range(n)], [2 * i + 1 for i in range(n)])


# -- verification -------------------------------------------------------------------


def nonzero_point(p: Polynomial) -> Point:
    """A point of the small integer grid where the nonzero polynomial ``p`` does not vanish."""
    if p.is_zero():
        raise ValueError("zero polynomial vanishes everywhere")
    degree_bound = max(p.degree_in(i) for i in range(p.nvars)) if p.nvars else 0
    for pt in itertools.product(range(degree_bound + 1), repeat=p.nvars):
        pt = tuple(Fraction(v) for v in pt)
        if p.evaluate(pt):
            return pt
    raise AssertionError("unreachable: a nonzero polynomial has a nonvanishing grid point")


@dataclass
class TermReport:
    index: int
    weight_status: str  # proved-exact | sampled-only | failed
    samples: int = 0
    witness: Point | None = None
    factor_ok: bool = True
    factor_witness: object = None
    note: str = ""

    @property
    def ok(self) -> bool:
        return self.weight_status != "failed" and self.factor_ok


@dataclass
class PieceReport:
    label: str
    identity_exact: bool
    identity_witness: tuple[Point, tuple[int, int], Fraction] | None = None
    terms: list[TermReport] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.identity_exact and all(t.ok for t in self.terms)


@dataclass
class CoveringReport:
    samples: int
    uncovered: Point | None = None
    scope: str = "R^n"

    @property
    def ok(self) -> bool:
        return self.uncovered is None


@dataclass
class VerificationReport:
    pieces: list[PieceReport]
    covering: CoveringReport

    @property
    def identity_exact(self) -> bool:
        return all(p.identity_exact for p in self.pieces)

    @property
    def weights_ok(self) -> bool:
        return all(t.ok for p in self.pieces for t in p.terms)

    @property
    def ok(self) -> bool:
        return self.identity_exact and self.weights_ok and self.covering.ok

    @property
    def exact(self) -> bool:
        """True when every weight carries a verified exact proof."""
        return self.ok and all(t.weight_status == "proved-exact" for p in self.pieces for t in p.terms)

    def to_dict(self) -> dict:
        def pt(p):
            return None if p is None else [str(v) for v in p]

        return {
            "ok": self.ok,
            "identity_exact": self.identity_exact,
            "pieces": [
                {
                    "label": p.label,
                    "identity": "exact" if p.identity_exact else "fail",
                    "identity_witness": None if p.identity_witness is None else {
                        "point": pt(p.identity_witness[0]),
                        "entry": list(p.identity_witness[1]),
                        "difference": str(p.identity_witness[2]),
                    },
                    "terms": [
                        {
                            "index": t.index,
                            "weight": t.weight_status,
                            "samples": t.samples,
                            "witness": pt(t.witness),
                            "factor_ok": t.factor_ok,
                            "factor_witness": None if t.factor_witness is None else str(t.factor_witness),
                            "note": t.note,
                        }
                        for t in p.terms
                    ],
                }
                for p in self.pieces
            ],
            "covering": {
                "scope": self.covering.scope,
                "samples": self.covering.samples,
                "uncovered": pt(self.covering.uncovered),
            },
        }


def _check_proof(f: Polynomial, proof: Proof, piece: SemiAlgebraicPiece, sampler) -> TermReport:
    n = f.nvars
    if isinstance(proof, Sampled):
        pts = sampler(proof.n, proof.seed)
        wit = _first_negative(f, pts)
        if wit is not None:
            return TermReport(-1, "failed", len(pts), wit)
        return TermReport(-1, "sampled-only", len(pts), note="" if pts else "no sample landed in the piece")
    if isinstance(proof, ExplicitSOS):
        rebuilt = Polynomial.zero(n)
        for c, s in proof.squares:
            if c < 0:
                raise CertificateError("ExplicitSOS has a negative multiplier")
            rebuilt = rebuilt + (s * s).scale(c)
    elif isinstance(proof, ConeCombination):
        rebuilt = Polynomial.zero(n)
        for c, s, gens in proof.items:
            if c < 0:
                raise CertificateError("ConeCombination has a negative multiplier")
            term = (s * s).scale(c)
            for g in gens:
                if not 0 <= g < len(piece.constraints):
                    raise CertificateError(f"ConeCombination references missing generator {g}")
                term = term * piece.constraints[g]
            rebuilt = rebuilt + term
    else:
        raise CertificateError(f"unknown proof object {proof!r}")
    if rebuilt != f:
        return TermReport(-1, "failed", 0, nonzero_point(rebuilt - f), note="proof identity does not hold")
    return TermReport(-1, "proved-exact")


def _check_factor(term: CertificateTerm) -> tuple[bool, object]:
    fac = term.factor
    if isinstance(fac, Square):
        return True, None
    if isinstance(fac, ConstPSD):
        Q = [list(r) for r in fac.Q]
        if not _is_symmetric(Q):
            return False, "constant factor is not symmetric"
        if psd_constant(Q):
            return True, None
        return False, negative_direction(Q)
    if isinstance(fac, PolyPSD):
        P = fac.P
        if not P.is_symmetric():
            return False, "matrix factor is not symmetric"
        if psd_univariate_matrix(P):
            return True, None
        return False, univariate_matrix_witness(P)
    raise CertificateError(f"unknown factor {fac!r}")


def check_identity(target: MatrixPolynomial, cp: CertifiedPiece):
    """``None`` if the piece identity is exact, else ``(point, entry, difference value)``."""
    m = target.size
    diff = cp.total(m, target.nvars) - target
    for i in range(m):
        for j in range(m):
            e = diff[i, j]
            if e:
                pt = nonzero_point(e)
                return pt, (i, j), e.evaluate(pt)
    return None


def verify_certificate(cert: PiecewiseCertificate, samples: int | None = None, seed: int = 0,
                       extra_points: Iterable[Sequence[object]] = ()) -> VerificationReport:
    """Check every piece identity exactly, every weight via its proof, and the covering by sampling.

    ``samples`` overrides the sample count of every ``Sampled`` proof (and sizes the
    covering check, default 200); ``seed`` is added to their seeds. ``extra_points``
    join every sampled check, e.g. a fixed sphere grid.
    """
    target = cert.target
    if not target.is_symmetric():
        raise CertificateError("target matrix must be symmetric")
    n = target.nvars
    extra = [tuple(as_fraction(v) for v in p) for p in extra_points]
    reports = []
    for k, cp in enumerate(cert.pieces):
        for g in cp.piece.constraints:
            if g.nvars != n:
                raise CertificateError("piece constraint lives in the wrong ring")
        cache: dict[tuple[int, int], list[Point]] = {}
        in_piece = points_in(cp.piece, extra, n)

        def sampler(count, s, piece=cp.piece, cache=cache, in_piece=in_piece):
            key = (count, s)
            if key not in cache:
                cache[key] = sample_points(piece, count, s, n)[0] + in_piece
            return cache[key]

        wit = check_identity(target, cp)
        pr = PieceReport(cp.piece.label or f"piece-{k}", wit is None, wit)
        for j, term in enumerate(cp.terms):
            if term.weight.nvars != n:
                raise CertificateError("weight lives in the wrong ring")
            proof = term.proof
            if isinstance(proof, Sampled):
                proof = Sampled(samples or proof.n, proof.seed + seed)
            tr = _check_proof(term.weight, proof, cp.piece, sampler)
            tr.index = j
            tr.factor_ok, tr.factor_witness = _check_factor(term)
            pr.terms.append(tr)
        reports.append(pr)
    covering = check_covering(cert, samples or 200, seed, extra)
    return VerificationReport(reports, covering)


def check_covering(cert: PiecewiseCertificate, samples: int, seed: int,
                   extra: Sequence[Point] = ()) -> CoveringReport:
    """Sample the domain (default: the cube ``[-1,1]^n``) and look for a point in no piece."""
    n = cert.nvars
    if cert.domain is None:
        domain = SemiAlgebraicPiece((), "R^n")
        scope = "R^n (sampled in [-1,1]^n)"
    else:
        domain = cert.domain
        scope = domain.label or "domain"
    pts, _ = sample_points(domain, samples, seed + 7919, n)
    pts += points_in(domain, list(extra), n)
    if not pts:
        return CoveringReport(0, None, scope)
    arr = fe.to_array(pts, n)
    covered = [False] * len(pts)
    for cp in cert.pieces:
        compiled = [fe.CompiledPolynomial(g) for g in cp.piece.constraints]
        idx = [i for i, c in enumerate(covered) if not c]
        if not idx:
            break
        mask = fe.member_mask(compiled, arr[idx], [pts[i] for i in idx])
        for i, keep in zip(idx, mask):
            if keep:
                covered[i] = True
    for i, c in enumerate(covered):
        if not c:
            return CoveringReport(len(pts), pts[i], scope)
    return CoveringReport(len(pts), None, scope)


# -- small helpers used by constructors -------------------------------------------------


def rank_one(vector: Sequence[object], nvars: int) -> Square:
    """``Square`` with a single row ``vector``."""
    return Square(MatrixPolynomial([list(vector)], nvars))


def constant_proof(c, nvars: int) -> ExplicitSOS:
    c = as_fraction(c)
    if c < 0:
        raise ValueError("negative constant has no SOS proof")
    if c == 0:
        return ExplicitSOS(())
    return ExplicitSOS(((c, Polynomial.const(1, nvars)),))


def ldl_rational(Q: Sequence[Sequence[object]]) -> list[tuple[Fraction, tuple[Fraction, ...]]] | None:
    """``Q = sum d_k l_k l_k^T`` with ``d_k > 0`` over Q, or ``None`` if a pivot fails.

    Succeeds for every positive definite ``Q``; zero pivots are allowed only with zero columns.
    """
    A = rational_matrix(Q)
    m = len(A)
    out = []
    for k in range(m):
        p = A[k][k]
        if p < 0:
            return None
        if p == 0:
            if any(A[k][j] for j in range(m)):
                return None
            continue
        l = tuple(A[k][j] / p for j in range(m))
        out.append((p, l))
        for i in range(m):
            for j in range(m):
                A[i][j] -= p * l[i] * l[j]
    return out


def _scaled_proof(proof: Proof, c: Fraction) -> Proof:
    if isinstance(proof, ExplicitSOS):
        return ExplicitSOS(tuple((k * c, s) for k, s in proof.squares))
    if isinstance(proof, ConeCombination):
        return ConeCombination(tuple((k * c, s, g) for k, s, g in proof.items))
    return proof


def split_rank_one(cert: PiecewiseCertificate) -> PiecewiseCertificate:
    """Rewrite every hermitian square ``U^T U`` as the rank-one squares of its rows.

    Uses ``U^T U = sum_i (E_i U)^T (E_i U)``. A constant factor without an outer
    congruence is split the same way when a rational LDL^T exists; otherwise it is kept.
    """
    n = cert.nvars
    pieces = []
    for cp in cert.pieces:
        terms: list[CertificateTerm] = []
        for t in cp.terms:
            fac = t.factor
            if isinstance(fac, Square):
                for i in range(fac.U.shape[0]):
                    row = fac.U.submatrix([i], range(fac.U.shape[1]))
                    if not row.is_zero():
                        terms.append(CertificateTerm(t.weight, Square(row), t.proof))
                continue
            if isinstance(fac, ConstPSD) and fac.outer is None:
                ldl = ldl_rational(fac.Q)
                if ldl is not None:
                    for d, l in ldl:
                        terms.append(CertificateTerm(t.weight.scale(d), rank_one(l, n), _scaled_proof(t.proof, d)))
                    continue
            terms.append(t)
        pieces.append(CertifiedPiece(cp.piece, tuple(terms)))
    return PiecewiseCertificate(cert.target, tuple(pieces), cert.names, cert.domain)


def rank_one_count(cert: PiecewiseCertificate) -> int:
    """Number of rank-one squares, counting each row of each ``U`` once."""
    total = 0
    for cp in cert.pieces:
        for t in cp.terms:
            if isinstance(t.factor, Square):
                total += sum(1 for i in range(t.factor.U.shape[0])
                             if not t.factor.U.submatrix([i], range(t.factor.U.shape[1])).is_zero())
            else:
                total += t.factor_matrix().size
    return total

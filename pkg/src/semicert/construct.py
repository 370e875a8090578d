"""Constructive certificates for positive definite homogeneous matrix polynomials.

Around a sphere point ``x0`` where ``A(x0)`` is positive definite, ``A`` splits as
``h*C + D`` with ``C = A(x0)``, ``h = (<x, x0>/|x0|^2)^d`` and ``D(x0) = 0``. Each
entry of ``D`` is absorbed by a pair of constant rank-one squares whose weights
``eta*h +- d_ij`` are positive near ``x0``; the rest is ``h*(C - m*eta*I)``. The
identity holds on all of R^n and only weight positivity is local, so a finite
greedy cover of a sphere grid by caps gives a piecewise certificate.
"""

from __future__ import annotations

import itertools
import logging
import random
import zlib
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import fasteval as fe
from .certkit import (
    CertificateTerm,
    CertifiedPiece,
    ConstPSD,
    ExplicitSOS,
    PiecewiseCertificate,
    Sampled,
    SemiAlgebraicPiece,
    pd_constant,
    rank_one,
)
from .matpoly import MatrixPolynomial
from .polycore import Form, Polynomial, as_fraction

log = logging.getLogger(__name__)

Point = tuple[int, ...]


class NotPositiveDefinite(ValueError):
    """Input is not positive definite at some grid point; ``point`` is the worst one found."""

    def __init__(self, message: str, point=None, value: float | None = None):
        super().__init__(message)
        self.point = point
        self.value = value


class PatchBudgetExceeded(RuntimeError):
    def __init__(self, message: str, point=None):
        super().__init__(message)
        self.point = point


# -- sphere grid ------------------------------------------------------------------


def sphere_grid(n: int, resolution: int = 8) -> list[Point]:
    """Integer points on the surface of the cube ``[-G, G]^n``, one per antipodal pair.

    With ``G = resolution`` every great circle through a face centre meets ``8G`` points,
    so the default gives 64 directions per circle (32 up to sign).
    """
    G = resolution
    out = []
    for p in itertools.product(range(-G, G + 1), repeat=n):
        if max(abs(v) for v in p) != G:
            continue
        first = next(v for v in p if v)
        if first > 0:
            out.append(p)
    return out


def _norm_sq(p: Sequence[object]) -> Fraction:
    return sum((as_fraction(v) ** 2 for v in p), Fraction(0))


def _homogeneous_degree(A: MatrixPolynomial) -> int:
    degs = {e.degree for row in A.rows for e in row if not e.is_zero()}
    if len(degs) != 1 or not A.is_homogeneous():
        raise ValueError("matrix entries must be forms of one common degree")
    (d,) = degs
    if d % 2:
        raise ValueError("common degree must be even")
    return d


def sum_of_squares_power(n: int, k: int) -> Polynomial:
    """``(x_1^2 + ... + x_n^2)^k``."""
    s = Polynomial.zero(n)
    for i in range(n):
        s = s + Polynomial.var(i, n) ** 2
    return s**k


class _CompiledMatrix:
    def __init__(self, A: MatrixPolynomial):
        self.m = A.size
        self.entries = [[fe.CompiledPolynomial(A[i, j]) for j in range(self.m)] for i in range(self.m)]

    def min_eigenvalues(self, pts: np.ndarray, d: int) -> np.ndarray:
        """Smallest eigenvalue of ``A(p/|p|)`` per point."""
        vals = np.empty((len(pts), self.m, self.m))
        for i in range(self.m):
            for j in range(i, self.m):
                v, _ = self.entries[i][j].values(pts)
                vals[:, i, j] = vals[:, j, i] = v
        norms = np.sum(pts**2, axis=1) ** (d / 2)
        return np.linalg.eigvalsh(vals / norms[:, None, None])[:, 0]


# -- epsilon margin ---------------------------------------------------------------------


@dataclass(frozen=True)
class EpsilonWitness:
    epsilon: Fraction
    validation_grid: int
    min_value_found: Fraction


def epsilon_margin(a, c, grid: int = 8, max_halvings: int = 60) -> EpsilonWitness:
    """A rational ``eps > 0`` such that ``a - eps*c`` is positive on the sphere grid.

    ``m`` is the grid minimum of ``a / c~`` with ``c~ = c + x_1^d + ... + x_n^d``;
    ``eps = m/2`` is halved until ``a - eps*c`` is positive on the grid and on a
    grid twice as fine.
    """
    a = a.poly if isinstance(a, Form) else a
    c = c.poly if isinstance(c, Form) else c
    n = a.nvars
    d = a.degree
    if d % 2 or not a.is_homogeneous(d) or not (c.is_zero() or c.is_homogeneous(d)):
        raise ValueError("a and c must be forms of one common even degree")
    ct = c
    for i in range(n):
        ct = ct + Polynomial.var(i, n) ** d
    pts = sphere_grid(n, grid)
    m = None
    for p in pts:
        av = a.evaluate(p)
        if av <= 0:
            raise NotPositiveDefinite("a is not positive on the sphere grid", p, float(av))
        r = av / ct.evaluate(p)
        m = r if m is None or r < m else m
    eps = m / 2
    fine = sphere_grid(n, 2 * grid)
    for _ in range(max_halvings):
        diff = a - c.scale(eps)
        if all(diff.evaluate(p) > 0 for p in itertools.chain(pts, fine)):
            return EpsilonWitness(eps, grid, m)
        eps /= 2
    raise NotPositiveDefinite("no epsilon validated on the grid")


def epsilon_regularize(A: MatrixPolynomial, epsilon) -> MatrixPolynomial:
    """``A + eps*(x_1^2 + ... + x_n^2)^(d/2) * Id``, keeping every entry homogeneous."""
    eps = as_fraction(epsilon)
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    if A.is_zero():
        d = 2
    else:
        d = _homogeneous_degree(A)
    return A + MatrixPolynomial.identity(A.size, A.nvars).scale(sum_of_squares_power(A.nvars, d // 2).scale(eps))


# -- local patches ----------------------------------------------------------------------


@dataclass(frozen=True)
class LocalPatch:
    center: tuple[Fraction, ...]
    piece: SemiAlgebraicPiece
    terms: tuple[CertificateTerm, ...]
    eta: Fraction
    rho_sq: Fraction

    def certified_piece(self) -> CertifiedPiece:
        return CertifiedPiece(self.piece, self.terms)


def cap_constraint(x0: Sequence[object], rho_sq) -> Polynomial:
    """``<x, x0>^2 - rho^2 |x|^2 |x0|^2``: nonnegative on the double cone around ``x0``."""
    n = len(x0)
    x0 = [as_fraction(v) for v in x0]
    lin = Polynomial.zero(n)
    for i, v in enumerate(x0):
        lin = lin + Polynomial.var(i, n).scale(v)
    return lin * lin - sum_of_squares_power(n, 1).scale(as_fraction(rho_sq) * _norm_sq(x0))


def _cap_box(x0: Sequence[Fraction], rho_sq: Fraction) -> tuple[tuple[Fraction, Fraction], ...]:
    """Sampling box around ``x0`` scaled to the unit cube that contains the cap's directions."""
    top = max(abs(v) for v in x0)
    centre = [v / top for v in x0]
    sin2 = 1 - rho_sq
    # generous rational upper bound for 2*sin(angle)*|centre|
    w = Fraction(2) * _sqrt_upper(sin2 * _norm_sq(centre)) + Fraction(1, 16)
    return tuple((max(Fraction(-1), c - w), min(Fraction(1), c + w)) for c in centre)


def _cap_samples(x0: Sequence[Fraction], rho_sq: Fraction, k: int, rng: np.random.Generator) -> list[Point]:
    """Up to ``k`` integer points whose direction lies in the cap ``cos^2 >= rho_sq`` around ``x0``."""
    if k <= 0:
        return []
    box = _cap_box(x0, max(rho_sq, Fraction(0)))
    x0f = np.array([float(v) for v in x0])
    nx0 = float(x0f @ x0f)
    scale = 4096
    out: list[Point] = []
    lo = np.array([int(a * scale) for a, _ in box])
    hi = np.array([int(b * scale) for _, b in box])
    for _ in range(40):
        cand = rng.integers(lo, hi, size=(8 * k, len(box)), endpoint=True).astype(float)
        nrm = np.sum(cand**2, axis=1)
        ok = (nrm > 0) & ((cand @ x0f) ** 2 >= float(rho_sq) * nrm * nx0)
        out += [tuple(int(v) for v in row) for row in cand[ok]]
        if len(out) >= k:
            break
    return out[:k]


def _sqrt_upper(q: Fraction) -> Fraction:
    r = Fraction(int(float(q) ** 0.5 * 1024) + 1, 1024)
    while r * r < q:
        r += Fraction(1, 1024)
    return r


def _decomposition_terms(A: MatrixPolynomial, x0, d: int, eta: Fraction) -> list[CertificateTerm]:
    n, m = A.nvars, A.size
    x0 = [as_fraction(v) for v in x0]
    nsq = _norm_sq(x0)
    lin = Polynomial.zero(n)
    for i, v in enumerate(x0):
        lin = lin + Polynomial.var(i, n).scale(v / nsq)
    h = lin**d
    C = A.evaluate(x0)
    terms: list[CertificateTerm] = []
    Dm = A - MatrixPolynomial.constant(C, n).scale(h)
    for i in range(m):
        for j in range(i + 1, m):
            dij = Dm[i, j]
            plus = [0] * m
            minus = [0] * m
            plus[i], plus[j] = 1, 1
            minus[i], minus[j] = 1, -1
            terms.append(CertificateTerm((h.scale(eta) + dij).scale(Fraction(1, 2)), rank_one(plus, n), Sampled()))
            terms.append(CertificateTerm((h.scale(eta) - dij).scale(Fraction(1, 2)), rank_one(minus, n), Sampled()))
    for i in range(m):
        e = [0] * m
        e[i] = 1
        terms.append(CertificateTerm(h.scale(eta) + Dm[i, i], rank_one(e, n), Sampled()))
    rest = [[C[i][j] - (m * eta if i == j else 0) for j in range(m)] for i in range(m)]
    terms.append(CertificateTerm(h, ConstPSD(tuple(tuple(r) for r in rest)), Sampled()))
    return terms


def monomial_sos(f: Polynomial) -> ExplicitSOS | None:
    """``f`` as a positive combination of squared monomials, when all its exponents are even."""
    squares = []
    for exps, c in f.items():
        if c < 0 or any(e % 2 for e in exps):
            return None
        squares.append((c, Polynomial.monomial(tuple(e // 2 for e in exps))))
    return ExplicitSOS(tuple(squares))


def _shortcut_terms(A: MatrixPolynomial) -> list[CertificateTerm] | None:
    """Terms for ``A = f*Q`` with ``Q`` constant, or for diagonal ``A``; ``None`` otherwise."""
    n, m = A.nvars, A.size
    scalar = _scalar_times_constant(A)
    if scalar is not None:
        f, Q = scalar
        return [CertificateTerm(f, ConstPSD(Q), monomial_sos(f) or Sampled())]
    if A.is_diagonal():
        out = []
        for i in range(m):
            e = [0] * m
            e[i] = 1
            out.append(CertificateTerm(A[i, i], rank_one(e, n), monomial_sos(A[i, i]) or Sampled()))
        return out
    return None


def _scalar_times_constant(A: MatrixPolynomial):
    m = A.size
    pivot = next(((i, j) for i in range(m) for j in range(m) if not A[i, j].is_zero()), None)
    if pivot is None:
        return None
    f = A[pivot]
    f = f.scale(1 / f.leading_term()[1])
    Q = []
    for i in range(m):
        row = []
        for j in range(m):
            e = A[i, j]
            c = e.leading_term()[1] if not e.is_zero() else Fraction(0)
            if e != f.scale(c):
                return None
            row.append(c)
        Q.append(tuple(row))
    return f, tuple(Q)


def local_certificate(A: MatrixPolynomial, x0: Sequence[object], check_points: Sequence[Point] | None = None,
                      grid: int = 8, max_shrinks: int = 24, cap_samples: int = 64) -> LocalPatch:
    """A cap around ``x0`` and constant-square terms whose sum is ``A`` identically.

    The cap is shrunk (``rho^2 = 1/2, 3/4, 7/8, ...``) until every weight is
    nonnegative at the check points and ``cap_samples`` seeded random points of a
    slightly larger cap.
    """
    if not A.is_symmetric():
        raise ValueError("matrix must be symmetric")
    d = _homogeneous_degree(A)
    n, m = A.nvars, A.size
    x0 = tuple(as_fraction(v) for v in x0)
    C = A.evaluate(x0)
    if not pd_constant(C):
        raise NotPositiveDefinite("A(x0) is not positive definite", x0)
    shortcut = _shortcut_terms(A)
    if shortcut is not None:
        eta = Fraction(0)
        terms = shortcut
        if not any(isinstance(t.proof, Sampled) for t in terms):
            # weights are globally nonnegative: one piece for all of R^n
            return LocalPatch(x0, SemiAlgebraicPiece((), "R^n"), tuple(terms), eta, Fraction(0))
    else:
        lam = float(np.linalg.eigvalsh(np.array(C, dtype=float))[0])
        eta = Fraction(lam * 0.9 / m).limit_denominator(2**20) if lam > 0 else Fraction(1)
        while not pd_constant([[C[i][j] - (m * eta if i == j else 0) for j in range(m)] for i in range(m)]):
            eta /= 2
        terms = _decomposition_terms(A, x0, d, eta)
    if check_points is None:
        check_points = sphere_grid(n, grid)
    cpts = np.array(check_points, dtype=float)
    exact_pts = list(check_points)
    weights = [fe.CompiledPolynomial(t.weight) for t in terms]
    x0f = np.array([float(v) for v in x0])
    cos2 = (cpts @ x0f) ** 2 / (np.sum(cpts**2, axis=1) * float(x0f @ x0f))
    rng = np.random.default_rng(zlib.crc32(repr(x0).encode()))
    rho_sq = Fraction(1, 2)
    for _ in range(max_shrinks):
        margin = rho_sq - (1 - rho_sq) / 2
        idx = np.nonzero(cos2 >= float(margin) - 1e-12)[0]
        own = _cap_samples(x0, margin, cap_samples, rng)
        sub = np.vstack([cpts[idx], np.array(own, dtype=float).reshape(len(own), n)])
        sub_exact = [exact_pts[k] for k in idx] + own
        if all(fe.first_negative(w, sub, sub_exact) is None for w in weights):
            piece = SemiAlgebraicPiece(
                (cap_constraint(x0, rho_sq),),
                "cap at (" + ",".join(str(v) for v in x0) + ")",
                _cap_box(x0, rho_sq),
            )
            return LocalPatch(x0, piece, tuple(terms), eta, rho_sq)
        rho_sq = 1 - (1 - rho_sq) / 2
    raise PatchBudgetExceeded("cap shrinking did not make the weights nonnegative", x0)


def check_positive_definite(A: MatrixPolynomial, points: Sequence[Point], tol: float = 1e-12):
    """Raise :class:`NotPositiveDefinite` at the grid point with the smallest eigenvalue if it is not positive."""
    d = _homogeneous_degree(A)
    if not points:
        return
    lam = _CompiledMatrix(A).min_eigenvalues(np.array(points, dtype=float), d)
    k = int(np.argmin(lam))
    if lam[k] <= tol:
        raise NotPositiveDefinite(
            f"A is not positive definite on the sphere grid (min eigenvalue {lam[k]:.3g})",
            tuple(Fraction(v) for v in points[k]),
            float(lam[k]),
        )


def cover_sphere(A: MatrixPolynomial, grid: int = 8, max_pieces: int = 400,
                 covered: Sequence[CertifiedPiece] = (), refine: int = 4,
                 names: Sequence[str] | None = None, probe: int = 4096, probe_rounds: int = 16,
                 seed: int = 0) -> PiecewiseCertificate:
    """Greedy cover of the sphere grid (then a ``refine`` times finer grid) by local patches.

    Caps can leave thin gaps between grid points, so afterwards rounds of ``probe``
    random directions are patched until a round finds nothing uncovered.
    ``covered`` pieces are kept as they are and their points need no patch.
    """
    if not A.is_symmetric():
        raise ValueError("matrix must be symmetric")
    n = A.nvars
    d = _homogeneous_degree(A)
    coarse = sphere_grid(n, grid)
    fine = sphere_grid(n, grid * refine) if refine > 1 else []
    check_points = coarse + fine

    def uncovered(points, pieces):
        if not points:
            return []
        arr = np.array(points, dtype=float)
        keep = np.ones(len(points), dtype=bool)
        for cp in pieces:
            comp = [fe.CompiledPolynomial(g) for g in cp.piece.constraints]
            idx = np.nonzero(keep)[0]
            if not len(idx):
                break
            mask = fe.member_mask(comp, arr[idx], [points[k] for k in idx])
            keep[idx[mask]] = False
        return [p for p, k in zip(points, keep) if k]

    pieces: list[CertifiedPiece] = list(covered)
    check_positive_definite(A, uncovered(check_points, pieces))
    for level in (coarse, fine):
        todo = uncovered(level, pieces)
        while todo:
            if len(pieces) - len(covered) >= max_pieces:
                raise PatchBudgetExceeded(f"more than {max_pieces} patches needed", todo[0])
            patch = local_certificate(A, todo[0], check_points)
            pieces.append(patch.certified_piece())
            log.debug("patch %d at %s, rho^2=%s", len(pieces), todo[0], patch.rho_sq)
            todo = uncovered(todo, [pieces[-1]])
    rng = random.Random(seed)
    for _ in range(probe_rounds if probe else 0):
        pts = [p for p in (tuple(rng.randint(-4096, 4096) for _ in range(n)) for _ in range(probe)) if any(p)]
        todo = uncovered(pts, pieces)
        if not todo:
            break
        check_positive_definite(A, todo)
        while todo:
            if len(pieces) - len(covered) >= max_pieces:
                raise PatchBudgetExceeded(f"more than {max_pieces} patches needed", todo[0])
            patch = local_certificate(A, todo[0], check_points + todo)
            pieces.append(patch.certified_piece())
            todo = uncovered(todo, [pieces[-1]])
    if d and not pieces:
        raise PatchBudgetExceeded("no piece produced")
    return PiecewiseCertificate(A, tuple(pieces), tuple(names) if names else None)

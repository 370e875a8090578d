"""Matrix polynomials: biforms, determinants, minors, Cauchy-Binet, Smith form."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Callable, Iterable, Sequence

from . import univariate as uv
from .polycore import Polynomial, as_fraction


class MatrixPolynomial:
    """Matrix (possibly rectangular) with :class:`Polynomial` entries over one ring."""

    __slots__ = ("nvars", "rows")

    def __init__(self, rows: Sequence[Sequence[object]], nvars: int | None = None):
        rows = [list(r) for r in rows]
        if not rows or not rows[0]:
            raise ValueError("matrix must be nonempty")
        if any(len(r) != len(rows[0]) for r in rows):
            raise ValueError("ragged matrix")
        if nvars is None:
            nvars = next(
                (e.nvars for r in rows for e in r if isinstance(e, Polynomial)), None
            )
            if nvars is None:
                raise ValueError("cannot infer nvars from constant entries")
        self.nvars = nvars
        self.rows = tuple(tuple(_as_poly(e, nvars) for e in r) for r in rows)

    # -- constructors -------------------------------------------------
    @classmethod
    def identity(cls, m: int, nvars: int) -> "MatrixPolynomial":
        return cls([[1 if i == j else 0 for j in range(m)] for i in range(m)], nvars)

    @classmethod
    def zeros(cls, r: int, c: int, nvars: int) -> "MatrixPolynomial":
        return cls([[0] * c for _ in range(r)], nvars)

    @classmethod
    def unit(cls, i: int, m: int, nvars: int) -> "MatrixPolynomial":
        """The diagonal matrix ``E_i`` with a single 1 at position ``(i, i)``."""
        return cls([[1 if a == b == i else 0 for b in range(m)] for a in range(m)], nvars)

    @classmethod
    def constant(cls, values: Sequence[Sequence[object]], nvars: int) -> "MatrixPolynomial":
        return cls(values, nvars)

    @classmethod
    def diagonal(cls, entries: Sequence[Polynomial]) -> "MatrixPolynomial":
        n = entries[0].nvars
        m = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(m)] for i in range(m)], n)

    # -- shape --------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.rows[0])

    @property
    def size(self) -> int:
        r, c = self.shape
        if r != c:
            raise ValueError(f"matrix is not square: {r}x{c}")
        return r

    def __getitem__(self, ij: tuple[int, int]) -> Polynomial:
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other) -> bool:
        return isinstance(other, MatrixPolynomial) and self.nvars == other.nvars and self.rows == other.rows

    def __hash__(self) -> int:
        return hash((self.nvars, self.rows))

    def __repr__(self) -> str:
        body = "; ".join(", ".join(str(e) for e in r) for r in self.rows)
        return f"MatrixPolynomial([{body}])"

    # -- algebra ------------------------------------------------------
    def map(self, fn: Callable[[Polynomial], Polynomial], nvars: int | None = None) -> "MatrixPolynomial":
        rows = [[fn(e) for e in r] for r in self.rows]
        return MatrixPolynomial(rows, nvars if nvars is not None else rows[0][0].nvars)

    def __add__(self, other: "MatrixPolynomial") -> "MatrixPolynomial":
        self._same_shape(other)
        return MatrixPolynomial(
            [[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)], self.nvars
        )

    def __sub__(self, other: "MatrixPolynomial") -> "MatrixPolynomial":
        self._same_shape(other)
        return MatrixPolynomial(
            [[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)], self.nvars
        )

    def __neg__(self) -> "MatrixPolynomial":
        return self.map(lambda e: -e, self.nvars)

    def scale(self, c: Polynomial | Fraction | int) -> "MatrixPolynomial":
        if isinstance(c, Polynomial):
            return self.map(lambda e: e * c, self.nvars)
        c = as_fraction(c)
        return self.map(lambda e: e.scale(c), self.nvars)

    def __matmul__(self, other: "MatrixPolynomial") -> "MatrixPolynomial":
        if self.nvars != other.nvars:
            raise ValueError("nvars mismatch")
        r, k = self.shape
        k2, c = other.shape
        if k != k2:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        zero = Polynomial.zero(self.nvars)
        out = []
        for i in range(r):
            row = []
            for j in range(c):
                acc = zero
                for t in range(k):
                    a = self.rows[i][t]
                    if a:
                        b = other.rows[t][j]
                        if b:
                            acc = acc + a * b
                row.append(acc)
            out.append(row)
        return MatrixPolynomial(out, self.nvars)

    def _same_shape(self, other: "MatrixPolynomial") -> None:
        if self.shape != other.shape or self.nvars != other.nvars:
            raise ValueError("shape or ring mismatch")

    @property
    def T(self) -> "MatrixPolynomial":
        return MatrixPolynomial([list(c) for c in zip(*self.rows)], self.nvars)

    def gram(self) -> "MatrixPolynomial":
        """The hermitian square ``U^T U``."""
        return self.T @ self

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "MatrixPolynomial":
        return MatrixPolynomial([[self.rows[i][j] for j in cols] for i in rows], self.nvars)

    def embed(self, m: int, positions: Sequence[int]) -> "MatrixPolynomial":
        """Place this square matrix at ``positions`` inside an ``m x m`` zero matrix."""
        out = [[Polynomial.zero(self.nvars)] * m for _ in range(m)]
        for a, i in enumerate(positions):
            for b, j in enumerate(positions):
                out[i][j] = self.rows[a][b]
        return MatrixPolynomial(out, self.nvars)

    # -- predicates ---------------------------------------------------
    def is_symmetric(self) -> bool:
        r, c = self.shape
        return r == c and all(self.rows[i][j] == self.rows[j][i] for i in range(r) for j in range(i))

    def is_homogeneous(self, d: int | None = None) -> bool:
        degrees = {e.degree for r in self.rows for e in r if e}
        if len(degrees) > 1:
            return False
        return all(e.is_homogeneous(d) for r in self.rows for e in r)

    def is_constant(self) -> bool:
        return all(e.is_constant() for r in self.rows for e in r)

    def is_zero(self) -> bool:
        return all(e.is_zero() for r in self.rows for e in r)

    def is_diagonal(self) -> bool:
        return all(not self.rows[i][j] for i in range(len(self.rows)) for j in range(len(self.rows[0])) if i != j)

    @property
    def degree(self) -> int:
        return max(e.degree for r in self.rows for e in r)

    # -- evaluation ---------------------------------------------------
    def evaluate(self, point: Sequence[object]) -> list[list[Fraction]]:
        return [[e.evaluate(point) for e in r] for r in self.rows]

    def constant_values(self) -> list[list[Fraction]]:
        if not self.is_constant():
            raise ValueError("matrix is not constant")
        return [[e.constant_term() for e in r] for r in self.rows]

    def taylor_shift(self, x0: Sequence[object], signs: Sequence[int] | None = None) -> "MatrixPolynomial":
        return self.map(lambda e: e.taylor_shift(x0, signs), self.nvars)

    def substitute(self, images: Sequence[Polynomial]) -> "MatrixPolynomial":
        return self.map(lambda e: e.substitute(images), images[0].nvars)


def _as_poly(e, nvars: int) -> Polynomial:
    if isinstance(e, Polynomial):
        if e.nvars != nvars:
            raise ValueError("entries live in different rings")
        return e
    return Polynomial.const(as_fraction(e), nvars)


def rational_matrix(values: Iterable[Iterable[object]]) -> list[list[Fraction]]:
    return [[as_fraction(v) for v in r] for r in values]


# -- biforms ------------------------------------------------------------


@dataclass(frozen=True)
class Biform:
    """Polynomial in ``n + m`` variables, of degree ``d1`` in the first block and ``d2`` in the second."""

    poly: Polynomial
    n: int
    d1: int
    m: int
    d2: int

    def __post_init__(self):
        if self.poly.nvars != self.n + self.m:
            raise ValueError("biform ring has the wrong number of variables")
        if not self.has_bidegree():
            raise ValueError(f"polynomial is not of bidegree ({self.d1}, {self.d2})")

    def has_bidegree(self) -> bool:
        for exps in self.poly.terms:
            if sum(exps[: self.n]) != self.d1 or sum(exps[self.n :]) != self.d2:
                return False
        return True

    def evaluate(self, x: Sequence[object], y: Sequence[object]) -> Fraction:
        return self.poly.evaluate(list(x) + list(y))


def to_biform(A: MatrixPolynomial) -> Biform:
    """``f_A(x, y) = sum_ij a_ij(x) y_i y_j`` for a symmetric homogeneous ``A``."""
    if not A.is_symmetric():
        raise ValueError("to_biform needs a symmetric matrix")
    if not A.is_homogeneous():
        raise ValueError("to_biform needs entries that are forms of one common degree")
    m = A.size
    n = A.nvars
    total = n + m
    acc = Polynomial.zero(total)
    for i in range(m):
        for j in range(m):
            a = A[i, j]
            if a:
                yy = Polynomial.var(n + i, total) * Polynomial.var(n + j, total)
                acc = acc + a.embed(total) * yy
    d = A.degree
    return Biform(acc, n, max(d, 0) if not acc.is_zero() else 0, m, 2 if not acc.is_zero() else 0)


# -- determinants --------------------------------------------------------


def determinant(A: MatrixPolynomial) -> Polynomial:
    """Fraction-free (Bareiss) determinant, exact in the polynomial ring."""
    m = A.size
    M = [list(r) for r in A.rows]
    sign = 1
    prev = Polynomial.const(1, A.nvars)
    for k in range(m - 1):
        if not M[k][k]:
            swap = next((i for i in range(k + 1, m) if M[i][k]), None)
            if swap is None:
                return Polynomial.zero(A.nvars)
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        pivot = M[k][k]
        for i in range(k + 1, m):
            for j in range(k + 1, m):
                num = M[i][j] * pivot - M[i][k] * M[k][j]
                M[i][j] = num.exact_div(prev) if k else num
            M[i][k] = Polynomial.zero(A.nvars)
        prev = pivot
    det = M[m - 1][m - 1]
    return det if sign > 0 else -det


def determinant_expansion(A: MatrixPolynomial) -> Polynomial:
    """Cofactor expansion along the first row; an independent check on :func:`determinant`."""
    m = A.size
    if m == 1:
        return A[0, 0]
    acc = Polynomial.zero(A.nvars)
    for j in range(m):
        if A[0, j]:
            minor = A.submatrix(range(1, m), [c for c in range(m) if c != j])
            term = A[0, j] * determinant_expansion(minor)
            acc = acc + term if j % 2 == 0 else acc - term
    return acc


def principal_minor(A: MatrixPolynomial, subset: Sequence[int]) -> Polynomial:
    """Determinant of the principal submatrix on ``subset`` (0-based indices)."""
    subset = list(subset)
    m = A.size
    if not subset or len(set(subset)) != len(subset) or any(not 0 <= i < m for i in subset):
        raise ValueError(f"bad index subset {subset} for size {m}")
    return determinant(A.submatrix(subset, subset))


def cauchy_binet_expand(A: MatrixPolynomial) -> tuple[Polynomial, list[Polynomial]]:
    """For ``A`` of shape ``s x m`` (``s >= m``): ``det(A^T A)`` and the minors ``det(A_S)``.

    Raises ``ArithmeticError`` if ``det(A^T A) != sum det(A_S)^2``.
    """
    s, m = A.shape
    if s < m:
        raise ValueError(f"need at least as many rows as columns, got {s}x{m}")
    det_gram = determinant(A.gram())
    minors = [determinant(A.submatrix(S, range(m))) for S in combinations(range(s), m)]
    total = Polynomial.zero(A.nvars)
    for d in minors:
        total = total + d * d
    if total != det_gram:
        raise ArithmeticError("Cauchy-Binet identity failed")
    return det_gram, minors


# -- Smith normal form over Q[t] ------------------------------------------


@dataclass(frozen=True)
class SmithDecomposition:
    """``M = E @ D @ F`` with ``E``, ``F`` unimodular and ``D`` diagonal (monic, divisibility chain)."""

    E: MatrixPolynomial
    D: MatrixPolynomial
    F: MatrixPolynomial

    @property
    def diagonal(self) -> list[Polynomial]:
        return [self.D[i, i] for i in range(self.D.size)]

    def product(self) -> MatrixPolynomial:
        return self.E @ self.D @ self.F


def smith_normal_form(M: MatrixPolynomial) -> SmithDecomposition:
    """Smith form of a square univariate matrix polynomial by gcd row/column reduction."""
    if M.nvars != 1:
        raise ValueError("Smith normal form needs a univariate matrix polynomial")
    m = M.size
    zero = Polynomial.zero(1)
    one = Polynomial.const(1, 1)
    cur = [list(r) for r in M.rows]
    E = [[one if i == j else zero for j in range(m)] for i in range(m)]
    F = [[one if i == j else zero for j in range(m)] for i in range(m)]

    # invariant: M == E @ cur @ F
    def swap_rows(i, j):
        cur[i], cur[j] = cur[j], cur[i]
        for r in E:
            r[i], r[j] = r[j], r[i]

    def swap_cols(i, j):
        for r in cur:
            r[i], r[j] = r[j], r[i]
        F[i], F[j] = F[j], F[i]

    def add_row(i, j, c):  # row_i += c * row_j
        cur[i] = [a + c * b for a, b in zip(cur[i], cur[j])]
        for r in E:
            r[j] = r[j] - c * r[i]

    def add_col(i, j, c):  # col_i += c * col_j
        for r in cur:
            r[i] = r[i] + c * r[j]
        F[j] = [a - c * b for a, b in zip(F[j], F[i])]

    def scale_row(i, s: Fraction):
        cur[i] = [a.scale(s) for a in cur[i]]
        for r in E:
            r[i] = r[i].scale(1 / s)

    for k in range(m):
        while True:
            nonzero = [(cur[i][j].degree, i, j) for i in range(k, m) for j in range(k, m) if cur[i][j]]
            if not nonzero:
                break
            _, i, j = min(nonzero)
            if i != k:
                swap_rows(i, k)
            if j != k:
                swap_cols(j, k)
            dirty = False
            for i in range(k + 1, m):
                if cur[i][k]:
                    q, r = uv.divmod_poly(cur[i][k], cur[k][k])
                    add_row(i, k, -q)
                    dirty = dirty or bool(r)
            for j in range(k + 1, m):
                if cur[k][j]:
                    q, r = uv.divmod_poly(cur[k][j], cur[k][k])
                    add_col(j, k, -q)
                    dirty = dirty or bool(r)
            if dirty:
                continue
            bad = next(
                (i for i in range(k + 1, m) for j in range(k + 1, m)
                 if cur[i][j] and uv.divmod_poly(cur[i][j], cur[k][k])[1]),
                None,
            )
            if bad is None:
                break
            add_row(k, bad, one)
        if cur[k][k]:
            lead = cur[k][k].leading_term()[1]
            if lead != 1:
                scale_row(k, 1 / lead)
        else:
            break
    return SmithDecomposition(MatrixPolynomial(E, 1), MatrixPolynomial(cur, 1), MatrixPolynomial(F, 1))


def is_unimodular(U: MatrixPolynomial) -> bool:
    d = determinant(U)
    return d.is_constant() and not d.is_zero()


def adjugate(A: MatrixPolynomial) -> MatrixPolynomial:
    m = A.size
    if m == 1:
        return MatrixPolynomial([[1]], A.nvars)
    out = []
    for i in range(m):
        row = []
        for j in range(m):
            minor = A.submatrix([r for r in range(m) if r != j], [c for c in range(m) if c != i])
            d = determinant(minor)
            row.append(d if (i + j) % 2 == 0 else -d)
        out.append(row)
    return MatrixPolynomial(out, A.nvars)


def unimodular_inverse(U: MatrixPolynomial) -> MatrixPolynomial:
    """Inverse of a matrix whose determinant is a nonzero constant (checked)."""
    d = determinant(U)
    if not d.is_constant() or d.is_zero():
        raise ValueError("matrix is not unimodular; its inverse is not polynomial")
    return adjugate(U).scale(1 / d.constant_term())


def block_sequence(diagonal: Sequence[Polynomial]) -> list[int]:
    """1-based indices ``k_0 = 1 < k_1 < ...`` where ``d_j / d_{j-1}`` vanishes at 0.

    Each ``d_j`` must be a nonzero univariate polynomial, nonnegative on some ``(0, delta)``.
    """
    if not diagonal:
        raise ValueError("empty diagonal")
    for j, d in enumerate(diagonal):
        if d.is_zero():
            raise ValueError(f"d_{j + 1} is identically zero; recurse on the leading block")
        if uv.sign_near_zero_plus(d) < 0:
            raise ValueError(f"d_{j + 1} is negative near 0+")
    ks = [1]
    for j in range(1, len(diagonal)):
        q, r = uv.divmod_poly(diagonal[j], diagonal[j - 1])
        if r:
            raise ValueError(f"d_{j} does not divide d_{j + 1}")
        if q.constant_term() == 0:
            ks.append(j + 1)
    return ks

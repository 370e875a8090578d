"""Quadratic determinantal representations of psd univariate polynomials, and Cauchy-Binet SOS evidence.

A psd ``f`` of degree ``2d`` is a product of ``d`` psd quadratics, so ``diag(q_1, ..., q_d)``
is a psd matrix polynomial with determinant ``f``. Rational factors are found exactly;
irrational roots are isolated (real: Sturm bisection, complex: high precision) and
replaced by rational midpoints, and the resulting coefficient gap is reported.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath
import sympy

from . import univariate as uv
from .certkit import psd_constant, psd_univariate_scalar
from .matpoly import MatrixPolynomial, cauchy_binet_expand, determinant
from .polycore import Polynomial, as_fraction

ISOLATION_WIDTH = Fraction(1, 2**40)
DEFAULT_TOLERANCE = 1e-8


@dataclass(frozen=True)
class RealRoot:
    interval: tuple[Fraction, Fraction]
    multiplicity: int

    @property
    def midpoint(self) -> Fraction:
        return (self.interval[0] + self.interval[1]) / 2


@dataclass(frozen=True)
class ComplexPair:
    """Roots ``-beta +- i*gamma``; the quadratic is ``(x + beta)^2 + gamma^2``."""

    beta: tuple[Fraction, Fraction]
    gamma: tuple[Fraction, Fraction]
    multiplicity: int = 1

    @property
    def midpoints(self) -> tuple[Fraction, Fraction]:
        return (sum(self.beta) / 2, sum(self.gamma) / 2)


@dataclass(frozen=True)
class QuadraticFactorization:
    leading: Fraction
    exact_quadratics: tuple[tuple[Polynomial, int], ...] = ()
    real_roots: tuple[RealRoot, ...] = ()
    complex_pairs: tuple[ComplexPair, ...] = ()

    @property
    def is_exact(self) -> bool:
        return not self.real_roots and not self.complex_pairs

    def quadratics(self) -> list[Polynomial]:
        """Monic psd quadratics (with repetition) whose product times ``leading`` approximates ``f``."""
        x = Polynomial.var(0, 1)
        out: list[Polynomial] = []
        for q, k in self.exact_quadratics:
            out += [q] * k
        for r in self.real_roots:
            out += [(x - r.midpoint) ** 2] * (r.multiplicity // 2)
        for c in self.complex_pairs:
            b, g = c.midpoints
            out += [(x + b) ** 2 + g * g] * c.multiplicity
        return out

    def product(self) -> Polynomial:
        acc = Polynomial.const(self.leading, 1)
        for q in self.quadratics():
            acc = acc * q
        return acc


def _from_sympy(expr, sym) -> Polynomial:
    coeffs = sympy.Poly(expr, sym).all_coeffs()[::-1]
    return Polynomial.from_coeffs([Fraction(int(c.p), int(c.q)) for c in coeffs])


def _to_sympy(p: Polynomial, sym):
    return sum(sympy.Rational(c.numerator, c.denominator) * sym**k for (k,), c in p.terms.items())


def _rational_interval(v: mpmath.mpf, width: Fraction) -> tuple[Fraction, Fraction]:
    den = width.denominator
    mid = Fraction(int(mpmath.nint(v * den)), den)
    return (mid - width / 2, mid + width / 2)


def factor_psd_univariate(f: Polynomial, width: Fraction = ISOLATION_WIDTH) -> QuadraticFactorization:
    """Split a psd univariate ``f`` into psd quadratic factors."""
    if f.nvars != 1:
        raise ValueError("need a univariate polynomial")
    if f.is_zero() or not psd_univariate_scalar(f):
        raise ValueError("f is not a nonzero psd polynomial")
    x = sympy.Symbol("x")
    lc, factors = sympy.factor_list(_to_sympy(f, x), x)
    leading = Fraction(int(sympy.Rational(lc).p), int(sympy.Rational(lc).q))
    exact: list[tuple[Polynomial, int]] = []
    real: list[RealRoot] = []
    pairs: list[ComplexPair] = []
    for g_expr, e in factors:
        g = _from_sympy(g_expr, x)
        glc = g.leading_term()[1]
        leading *= glc**e
        g = g.scale(1 / glc)
        deg = g.degree
        if deg == 1:
            if e % 2:
                raise ArithmeticError("odd multiplicity real root in a psd polynomial")
            exact.append((g * g, e // 2))
            continue
        nreal = uv.count_real_roots(g)
        if deg == 2 and nreal == 0:
            exact.append((g, e))
            continue
        if nreal and e % 2:
            raise ArithmeticError("odd multiplicity real root in a psd polynomial")
        for iv in uv.isolate_real_roots(g, width):
            real.append(RealRoot(iv, e))
        if deg > nreal:
            with mpmath.workdps(80):
                coeffs = [mpmath.mpf(c.numerator) / c.denominator for c in reversed(uv.coeffs(g))]
                roots = mpmath.polyroots(coeffs, maxsteps=400, extraprec=400)
                upper = sorted((r for r in roots if mpmath.im(r) > 0),
                               key=lambda r: (float(mpmath.re(r)), float(mpmath.im(r))))
                if 2 * len(upper) != deg - nreal:
                    raise ArithmeticError("complex root count mismatch")
                for r in upper:
                    pairs.append(ComplexPair(_rational_interval(-mpmath.re(r), width),
                                             _rational_interval(mpmath.im(r), width), e))
    if leading <= 0:
        raise ArithmeticError("leading coefficient must be positive")
    return QuadraticFactorization(leading, tuple(exact), tuple(real), tuple(pairs))


@dataclass(frozen=True)
class DeterminantalRepresentation:
    matrix: MatrixPolynomial
    residual: float
    tolerance: float
    factorization: QuadraticFactorization
    entries_psd: bool

    @property
    def ok(self) -> bool:
        return self.residual <= self.tolerance and self.entries_psd and self.matrix.is_diagonal()


def relative_residual(p: Polynomial, f: Polynomial) -> float:
    diff = p - f
    if diff.is_zero():
        return 0.0
    scale = max(abs(c) for c in f.terms.values())
    return float(max(abs(c) for c in diff.terms.values()) / scale)


def quadratic_determinantal_representation(f: Polynomial, tolerance: float = DEFAULT_TOLERANCE,
                                           width: Fraction = ISOLATION_WIDTH) -> DeterminantalRepresentation:
    """Diagonal ``d x d`` matrix of psd quadratics with determinant ``f`` (up to the reported residual)."""
    if f.nvars != 1:
        raise ValueError("need a univariate polynomial")
    if f.degree % 2:
        raise ValueError("f must have even degree")
    fac = factor_psd_univariate(f, width)
    qs = fac.quadratics()
    if qs:
        qs[0] = qs[0].scale(fac.leading)
    else:
        qs = [Polynomial.const(fac.leading, 1)]
    M = MatrixPolynomial.diagonal(qs)
    res = relative_residual(determinant(M), f)
    entries_psd = all(psd_univariate_scalar(q) for q in qs)
    return DeterminantalRepresentation(M, res, tolerance, fac, entries_psd)


# -- verification hooks -------------------------------------------------------------------


@dataclass
class CauchyBinetReport:
    determinant: Polynomial
    minors: list[Polynomial]
    identity_exact: bool

    def squares_sum(self) -> Polynomial:
        acc = Polynomial.zero(self.determinant.nvars)
        for q in self.minors:
            acc = acc + q * q
        return acc


def cauchy_binet_sos_evidence(M: MatrixPolynomial, A: MatrixPolynomial) -> CauchyBinetReport:
    """Given ``M = A^T A`` exactly, write ``det M`` as the sum of squared maximal minors of ``A``."""
    s, m = A.shape
    if M.shape != (m, m):
        raise ValueError("shape mismatch between M and A")
    if s < m:
        raise ValueError(f"A has {s} rows, fewer than {m} columns; use a square or tall factor")
    if A.gram() != M:
        raise ValueError("A^T A does not equal M")
    det, minors = cauchy_binet_expand(A)
    rep = CauchyBinetReport(det, minors, False)
    rep.identity_exact = rep.squares_sum() == det and det == determinant(M)
    return rep


@dataclass
class DeterminantCheck:
    identity_exact: bool
    samples: int
    psd_witness: tuple[Fraction, ...] | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.identity_exact and self.psd_witness is None


def verify_determinantal(M: MatrixPolynomial, f: Polynomial, samples: int = 200, seed: int = 0) -> DeterminantCheck:
    """Exact check of ``det M == f``; psd-ness of ``M`` only by sampling rational points in ``[-1,1]^n``."""
    if not M.is_symmetric():
        raise ValueError("M must be symmetric")
    ok = determinant(M) == f
    rng = random.Random(seed)
    for _ in range(samples):
        pt = tuple(Fraction(rng.randint(-1024, 1024), 1024) for _ in range(M.nvars))
        if not psd_constant(M.evaluate(pt)):
            return DeterminantCheck(ok, samples, pt)
    return DeterminantCheck(ok, samples)


def random_psd_factor(rng: random.Random, exact: bool = False) -> Polynomial:
    """A random psd building block.

    ``(x + b)^2 + c`` always factors over Q. Unless ``exact`` is set, also draws
    ``((x + b)^2 - c)^2`` with irrational real roots and ``x^4 + c``, which need the
    approximate root path.
    """
    x = Polynomial.var(0, 1)
    b = rng.randint(-5, 5)
    kind = "quadratic" if exact else rng.choice(["quadratic", "squared-real", "quartic"])
    if kind == "quadratic":
        return (x + b) ** 2 + rng.randint(0, 9)
    if kind == "squared-real":
        return ((x + b) ** 2 - rng.choice([2, 3, 5, 6, 7])) ** 2
    return x**4 + rng.choice([1, 2, 3, 5])


def random_psd_polynomial(rng: random.Random, max_degree: int = 10, exact: bool = False) -> Polynomial:
    """Product of random psd factors with degree at most ``max_degree`` and a positive leading constant."""
    acc = Polynomial.const(rng.randint(1, 5), 1)
    target = 2 * rng.randint(1, max_degree // 2)
    while acc.degree < target:
        f = random_psd_factor(rng, exact or target - acc.degree < 4)
        acc = acc * f
    return acc


def as_polynomial(value: Polynomial | Sequence[object]) -> Polynomial:
    if isinstance(value, Polynomial):
        return value
    return Polynomial.from_coeffs([as_fraction(v) for v in value])

"""Univariate helpers: division, gcd, squarefree decomposition, Sturm sequences.

Everything works on :class:`Polynomial` objects with ``nvars == 1`` and stays exact.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .polycore import Polynomial, as_fraction


def _check(p: Polynomial) -> None:
    if p.nvars != 1:
        raise ValueError(f"expected a univariate polynomial, got nvars={p.nvars}")


def coeffs(p: Polynomial) -> list[Fraction]:
    """Dense coefficients, constant term first; ``[]`` for zero."""
    _check(p)
    out = [Fraction(0)] * (p.degree + 1)
    for (k,), c in p.terms.items():
        out[k] = c
    return out


def from_coeffs(c: Sequence[object]) -> Polynomial:
    return Polynomial.from_coeffs(c)


def _trim(c: list[Fraction]) -> list[Fraction]:
    while c and not c[-1]:
        c.pop()
    return c


def _divmod_dense(a: list[Fraction], b: list[Fraction]) -> tuple[list[Fraction], list[Fraction]]:
    a = list(a)
    if not b:
        raise ZeroDivisionError("division by zero polynomial")
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    lead = b[-1]
    for k in range(len(a) - len(b), -1, -1):
        f = a[k + len(b) - 1] / lead
        q[k] = f
        if f:
            for j, bj in enumerate(b):
                a[k + j] -= f * bj
    return _trim(q), _trim(a[: len(b) - 1])


def divmod_poly(a: Polynomial, b: Polynomial) -> tuple[Polynomial, Polynomial]:
    q, r = _divmod_dense(coeffs(a), coeffs(b))
    return from_coeffs(q), from_coeffs(r)


def monic(p: Polynomial) -> Polynomial:
    if p.is_zero():
        return p
    return p / p.leading_term()[1]


def gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    """Monic gcd; ``gcd(p, 0)`` is ``p`` made monic."""
    _check(a)
    _check(b)
    if a.is_zero() and b.is_zero():
        raise ValueError("gcd of two zero polynomials is undefined")
    x, y = coeffs(a), coeffs(b)
    while y:
        _, r = _divmod_dense(x, y)
        x, y = y, r
    return monic(from_coeffs(x))


def squarefree_part(p: Polynomial) -> Polynomial:
    """``p / gcd(p, p')``, made monic."""
    if p.is_zero():
        raise ValueError("zero polynomial has no squarefree part")
    if p.degree == 0:
        return Polynomial.const(1, 1)
    g = gcd(p, p.derivative(0))
    return monic(divmod_poly(p, g)[0])


def squarefree_decomposition(p: Polynomial) -> tuple[Fraction, list[Polynomial]]:
    """Yun's algorithm: ``p = lc * prod(factors[i] ** (i + 1))`` with monic squarefree factors."""
    if p.is_zero():
        raise ValueError("zero polynomial")
    lc = p.leading_term()[1]
    f = monic(p)
    factors: list[Polynomial] = []
    if f.degree == 0:
        return lc, factors
    a0 = gcd(f, f.derivative(0))
    b = divmod_poly(f, a0)[0]
    c = divmod_poly(f.derivative(0), a0)[0]
    d = c - b.derivative(0)
    while b.degree > 0:
        a = gcd(b, d)
        factors.append(a)
        b = divmod_poly(b, a)[0]
        c = divmod_poly(d, a)[0]
        d = c - b.derivative(0)
    while factors and factors[-1].degree == 0:
        factors.pop()
    return lc, factors


def sign_near_zero_plus(p: Polynomial) -> int:
    """Sign of ``p(t)`` for all sufficiently small ``t > 0``."""
    c = coeffs(p)
    for v in c:
        if v:
            return 1 if v > 0 else -1
    return 0


def order_at_zero(p: Polynomial) -> int:
    """Multiplicity of the root 0 (``-1`` for the zero polynomial)."""
    for k, v in enumerate(coeffs(p)):
        if v:
            return k
    return -1


def sturm_sequence(p: Polynomial) -> list[list[Fraction]]:
    c = _trim(coeffs(p))
    seq = [c, _trim(coeffs(p.derivative(0)))]
    while seq[-1]:
        _, r = _divmod_dense(seq[-2], seq[-1])
        seq.append([-v for v in r])
    return seq[:-1]


def _eval_dense(c: list[Fraction], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for v in reversed(c):
        acc = acc * x + v
    return acc


def _sign_changes(seq: list[list[Fraction]], x: Fraction | None, at_minus_inf: bool = False) -> int:
    signs = []
    for c in seq:
        if x is None:
            s = c[-1]
            if at_minus_inf and (len(c) - 1) % 2:
                s = -s
        else:
            s = _eval_dense(c, x)
        if s:
            signs.append(s > 0)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def cauchy_bound(p: Polynomial) -> Fraction:
    c = _trim(coeffs(p))
    lead = abs(c[-1])
    return 1 + max((abs(v) / lead for v in c[:-1]), default=Fraction(0))


def count_real_roots(p: Polynomial, lo=None, hi=None) -> int:
    """Number of distinct real roots in ``(lo, hi]`` (``None`` means infinite)."""
    if p.is_zero():
        raise ValueError("zero polynomial has infinitely many roots")
    seq = sturm_sequence(p)
    left = _sign_changes(seq, None, at_minus_inf=True) if lo is None else _sign_changes(seq, as_fraction(lo))
    right = _sign_changes(seq, None) if hi is None else _sign_changes(seq, as_fraction(hi))
    return left - right


def isolate_real_roots(p: Polynomial, width=Fraction(1, 2**40)) -> list[tuple[Fraction, Fraction]]:
    """Disjoint intervals ``(lo, hi]`` each holding exactly one distinct real root, narrower than ``width``."""
    if p.is_zero():
        raise ValueError("zero polynomial")
    sf = squarefree_part(p)
    if sf.degree < 1:
        return []
    seq = sturm_sequence(sf)
    bound = cauchy_bound(sf)
    width = as_fraction(width)

    def changes(x):
        return _sign_changes(seq, x)

    out = []
    stack = [(-bound, bound, changes(-bound), changes(bound))]
    while stack:
        lo, hi, clo, chi = stack.pop()
        n = clo - chi
        if n == 0:
            continue
        if n == 1 and hi - lo < width:
            out.append((lo, hi))
            continue
        mid = (lo + hi) / 2
        cm = changes(mid)
        stack.append((mid, hi, cm, chi))
        stack.append((lo, mid, clo, cm))
    return sorted(out)

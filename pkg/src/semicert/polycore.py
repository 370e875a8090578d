"""Exact sparse multivariate polynomials over the rationals.

A :class:`Polynomial` maps exponent tuples to nonzero :class:`~fractions.Fraction`
coefficients. Values are immutable; every operation returns a new polynomial.
Canonical term order is lexicographic (largest exponent tuple first).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, Mapping, Sequence

Exponents = tuple[int, ...]


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, float):
        raise TypeError("floats are not accepted; pass an int, Fraction or 'p/q' string")
    return Fraction(value)


def multi_factorial(alpha: Sequence[int]) -> int:
    out = 1
    for a in alpha:
        out *= math.factorial(a)
    return out


class Polynomial:
    """Sparse polynomial in ``nvars`` variables with rational coefficients."""

    __slots__ = ("nvars", "_terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[Sequence[int], object] | None = None):
        if nvars < 0:
            raise ValueError("nvars must be nonnegative")
        self.nvars = nvars
        clean: dict[Exponents, Fraction] = {}
        for exps, coef in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != nvars:
                raise ValueError(f"exponent {exps} has length {len(exps)}, expected {nvars}")
            if any(e < 0 for e in exps):
                raise ValueError(f"negative exponent in {exps}")
            c = as_fraction(coef)
            if c:
                clean[exps] = clean.get(exps, Fraction(0)) + c
                if not clean[exps]:
                    del clean[exps]
        self._terms = clean
        self._hash = None

    # -- constructors -------------------------------------------------
    @classmethod
    def _raw(cls, nvars: int, terms: dict[Exponents, Fraction]) -> "Polynomial":
        p = cls.__new__(cls)
        p.nvars = nvars
        p._terms = terms
        p._hash = None
        return p

    @classmethod
    def zero(cls, nvars: int) -> "Polynomial":
        return cls._raw(nvars, {})

    @classmethod
    def const(cls, value, nvars: int) -> "Polynomial":
        c = as_fraction(value)
        return cls._raw(nvars, {(0,) * nvars: c} if c else {})

    @classmethod
    def var(cls, index: int, nvars: int) -> "Polynomial":
        if not 0 <= index < nvars:
            raise IndexError(f"variable index {index} out of range for {nvars} variables")
        exps = [0] * nvars
        exps[index] = 1
        return cls._raw(nvars, {tuple(exps): Fraction(1)})

    @classmethod
    def monomial(cls, exps: Sequence[int], coef=1) -> "Polynomial":
        return cls(len(exps), {tuple(exps): coef})

    @classmethod
    def from_coeffs(cls, coeffs: Sequence[object]) -> "Polynomial":
        """Univariate polynomial from coefficients, constant term first."""
        return cls(1, {(k,): c for k, c in enumerate(coeffs)})

    # -- inspection ---------------------------------------------------
    @property
    def terms(self) -> dict[Exponents, Fraction]:
        return dict(self._terms)

    def items(self) -> list[tuple[Exponents, Fraction]]:
        """Terms in canonical (lexicographically decreasing) order."""
        return sorted(self._terms.items(), reverse=True)

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self._terms)

    @property
    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self._terms), default=-1)

    def degree_in(self, index: int) -> int:
        return max((e[index] for e in self._terms), default=-1)

    def coefficient(self, exps: Sequence[int]) -> Fraction:
        return self._terms.get(tuple(exps), Fraction(0))

    def constant_term(self) -> Fraction:
        return self._terms.get((0,) * self.nvars, Fraction(0))

    def leading_term(self) -> tuple[Exponents, Fraction]:
        if not self._terms:
            raise ValueError("zero polynomial has no leading term")
        exps = max(self._terms)
        return exps, self._terms[exps]

    def is_homogeneous(self, d: int | None = None) -> bool:
        degrees = {sum(e) for e in self._terms}
        if not degrees:
            return True
        if len(degrees) != 1:
            return False
        return d is None or degrees == {d}

    def variables_used(self) -> set[int]:
        return {i for e in self._terms for i, k in enumerate(e) if k}

    # -- arithmetic ---------------------------------------------------
    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.nvars != self.nvars:
                raise ValueError(f"nvars mismatch: {self.nvars} vs {other.nvars}")
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial.const(other, self.nvars)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for e, c in other._terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return Polynomial._raw(self.nvars, out)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial._raw(self.nvars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict[Exponents, Fraction] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = out.get(e, 0) + c1 * c2
                if v:
                    out[e] = v
                else:
                    out.pop(e, None)
        return Polynomial._raw(self.nvars, out)

    __rmul__ = __mul__

    def scale(self, c) -> "Polynomial":
        c = as_fraction(c)
        if not c:
            return Polynomial.zero(self.nvars)
        return Polynomial._raw(self.nvars, {e: v * c for e, v in self._terms.items()})

    def __truediv__(self, other):
        if isinstance(other, Polynomial):
            if not other.is_constant() or other.is_zero():
                raise ZeroDivisionError("can only divide by a nonzero constant; use exact_div")
            other = other.constant_term()
        other = as_fraction(other)
        if not other:
            raise ZeroDivisionError("division by zero")
        return self.scale(1 / other)

    def __pow__(self, k: int) -> "Polynomial":
        if k < 0:
            raise ValueError("negative power")
        result = Polynomial.const(1, self.nvars)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def exact_div(self, divisor: "Polynomial") -> "Polynomial":
        """Quotient of an exact division; raises ``ValueError`` if a remainder remains."""
        divisor = self._coerce(divisor)
        if divisor.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        lead_e, lead_c = divisor.leading_term()
        remainder = self
        quotient: dict[Exponents, Fraction] = {}
        while remainder:
            e, c = remainder.leading_term()
            diff = tuple(a - b for a, b in zip(e, lead_e))
            if any(k < 0 for k in diff):
                raise ValueError("polynomial division is not exact")
            q = c / lead_c
            quotient[diff] = q
            remainder = remainder - divisor * Polynomial._raw(self.nvars, {diff: q})
        return Polynomial._raw(self.nvars, quotient)

    # -- comparison ---------------------------------------------------
    def __eq__(self, other) -> bool:
        if isinstance(other, Polynomial):
            return self.nvars == other.nvars and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self._terms == Polynomial.const(other, self.nvars)._terms
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self._terms.items())))
        return self._hash

    # -- evaluation and calculus --------------------------------------
    def evaluate(self, point: Sequence[object]) -> Fraction:
        if len(point) != self.nvars:
            raise ValueError(f"point has length {len(point)}, expected {self.nvars}")
        pt = [as_fraction(v) for v in point]
        total = Fraction(0)
        for exps, c in self._terms.items():
            term = c
            for v, k in zip(pt, exps):
                if k:
                    term *= v**k
            total += term
        return total

    __call__ = evaluate

    def partial_derivative(self, alpha: Sequence[int]) -> "Polynomial":
        alpha = tuple(alpha)
        if len(alpha) != self.nvars:
            raise ValueError("multi-index length mismatch")
        out: dict[Exponents, Fraction] = {}
        for exps, c in self._terms.items():
            if any(e < a for e, a in zip(exps, alpha)):
                continue
            factor = 1
            for e, a in zip(exps, alpha):
                factor *= math.factorial(e) // math.factorial(e - a)
            out[tuple(e - a for e, a in zip(exps, alpha))] = c * factor
        return Polynomial._raw(self.nvars, out)

    def derivative(self, index: int) -> "Polynomial":
        alpha = [0] * self.nvars
        alpha[index] = 1
        return self.partial_derivative(alpha)

    def substitute(self, images: Sequence["Polynomial"]) -> "Polynomial":
        """Replace variable ``i`` by ``images[i]`` (all images share one ring)."""
        if len(images) != self.nvars:
            raise ValueError("need one image per variable")
        if not images:
            return Polynomial(0, self._terms)
        target = images[0].nvars
        if any(im.nvars != target for im in images):
            raise ValueError("images live in different rings")
        powers: list[dict[int, Polynomial]] = [{0: Polynomial.const(1, target)} for _ in images]

        def power(i: int, k: int) -> Polynomial:
            cache = powers[i]
            if k not in cache:
                cache[k] = power(i, k - 1) * images[i]
            return cache[k]

        result = Polynomial.zero(target)
        for exps, c in self._terms.items():
            term = Polynomial.const(c, target)
            for i, k in enumerate(exps):
                if k:
                    term = term * power(i, k)
            result = result + term
        return result

    def taylor_shift(self, x0: Sequence[object], signs: Sequence[int] | None = None) -> "Polynomial":
        """Return ``q(X) = p(x0 + signs * X)``; ``q(0) == p(x0)``."""
        if len(x0) != self.nvars:
            raise ValueError("center has wrong length")
        signs = [1] * self.nvars if signs is None else list(signs)
        if len(signs) != self.nvars or any(s not in (1, -1) for s in signs):
            raise ValueError("signs must be a vector of +1/-1 of length nvars")
        images = [
            Polynomial.const(c, self.nvars) + Polynomial.var(i, self.nvars).scale(s)
            for i, (c, s) in enumerate(zip(x0, signs))
        ]
        return self.substitute(images)

    def embed(self, nvars: int, positions: Sequence[int] | None = None) -> "Polynomial":
        """Re-index variables into a ring with ``nvars`` variables."""
        positions = list(range(self.nvars)) if positions is None else list(positions)
        out = {}
        for exps, c in self._terms.items():
            e = [0] * nvars
            for k, pos in zip(exps, positions):
                e[pos] += k
            out[tuple(e)] = c
        return Polynomial._raw(nvars, out)

    def homogenize(self, d: int | None = None) -> "Form":
        """Append a new last variable and homogenize to degree ``d``."""
        deg = self.degree
        d = max(deg, 0) if d is None else d
        if d < deg:
            raise ValueError(f"target degree {d} below polynomial degree {deg}")
        out = {exps + (d - sum(exps),): c for exps, c in self._terms.items()}
        return Form(Polynomial._raw(self.nvars + 1, out), d)

    def dehomogenize(self, index: int, value=1) -> "Polynomial":
        """Set variable ``index`` to ``value`` and drop it from the ring."""
        v = as_fraction(value)
        out: dict[Exponents, Fraction] = {}
        for exps, c in self._terms.items():
            e = exps[:index] + exps[index + 1 :]
            w = out.get(e, 0) + c * v ** exps[index]
            if w:
                out[e] = w
            else:
                out.pop(e, None)
        return Polynomial._raw(self.nvars - 1, out)

    # -- text ---------------------------------------------------------
    def to_string(self, names: Sequence[str] | None = None) -> str:
        return format_polynomial(self, names)

    def __str__(self) -> str:
        return format_polynomial(self)

    def __repr__(self) -> str:
        return f"Polynomial({self.nvars}, {format_polynomial(self)!r})"


@dataclass(frozen=True)
class Form:
    """A polynomial whose terms all have total degree exactly ``degree``."""

    poly: Polynomial
    degree: int

    def __post_init__(self):
        if not self.poly.is_homogeneous(self.degree):
            raise ValueError(f"polynomial is not a form of degree {self.degree}")

    @property
    def nvars(self) -> int:
        return self.poly.nvars

    def dehomogenize(self, index: int, value=1) -> Polynomial:
        return self.poly.dehomogenize(index, value)


def default_names(n: int) -> list[str]:
    if n <= 3:
        return ["x", "y", "z"][:n]
    return [f"x{i + 1}" for i in range(n)]


def variables(names: Sequence[str]) -> list[Polynomial]:
    n = len(names)
    return [Polynomial.var(i, n) for i in range(n)]


def format_polynomial(p: Polynomial, names: Sequence[str] | None = None) -> str:
    names = default_names(p.nvars) if names is None else list(names)
    if len(names) != p.nvars:
        raise ValueError("wrong number of variable names")
    if p.is_zero():
        return "0"
    pieces = []
    for exps, c in p.items():
        mono = "*".join(
            name if k == 1 else f"{name}^{k}" for name, k in zip(names, exps) if k
        )
        mag = abs(c)
        if mono and mag == 1:
            body = mono
        elif mono:
            body = f"{mag}*{mono}"
        else:
            body = str(mag)
        if not pieces:
            pieces.append(("-" if c < 0 else "") + body)
        else:
            pieces.append((" - " if c < 0 else " + ") + body)
    return "".join(pieces)


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))")


class _Parser:
    def __init__(self, text: str, names: Sequence[str]):
        self.names = {n: i for i, n in enumerate(names)}
        self.n = len(names)
        self.tokens: list[tuple[str, str]] = []
        pos = 0
        text = text.strip()
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                raise ValueError(f"cannot parse polynomial near {text[pos:]!r}")
            num, ident, op = m.groups()
            if num is not None:
                self.tokens.append(("num", num))
            elif ident is not None:
                self.tokens.append(("name", ident))
            else:
                self.tokens.append(("op", "^" if op == "**" else op))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None)

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def parse(self) -> Polynomial:
        if not self.tokens:
            raise ValueError("empty polynomial string")
        p = self.expr()
        if self.i != len(self.tokens):
            raise ValueError(f"unexpected token {self.peek()[1]!r}")
        return p

    def expr(self) -> Polynomial:
        p = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            _, op = self.take()
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self) -> Polynomial:
        p = self.unary()
        while self.peek() in (("op", "*"), ("op", "/")):
            _, op = self.take()
            q = self.unary()
            p = p * q if op == "*" else p / q
        return p

    def unary(self) -> Polynomial:
        if self.peek() == ("op", "-"):
            self.take()
            return -self.unary()
        if self.peek() == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> Polynomial:
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            kind, val = self.take()
            if kind != "num":
                raise ValueError("exponent must be a nonnegative integer")
            base = base ** int(val)
        return base

    def atom(self) -> Polynomial:
        kind, val = self.take()
        if kind == "num":
            return Polynomial.const(int(val), self.n)
        if kind == "name":
            if val not in self.names:
                raise ValueError(f"unknown variable {val!r}")
            return Polynomial.var(self.names[val], self.n)
        if (kind, val) == ("op", "("):
            p = self.expr()
            if self.take() != ("op", ")"):
                raise ValueError("missing closing parenthesis")
            return p
        raise ValueError(f"unexpected token {val!r}")


def parse_polynomial(text: str, names: Sequence[str]) -> Polynomial:
    """Parse ``text`` such as ``"3/4*x^2*y - z + 1"`` over the variables ``names``."""
    return _Parser(str(text), names).parse()


def monomials_up_to(nvars: int, degree: int) -> Iterable[Exponents]:
    """All exponent tuples of total degree <= ``degree``, in lex order."""
    for exps in product(range(degree + 1), repeat=nvars):
        if sum(exps) <= degree:
            yield exps

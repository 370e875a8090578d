from fractions import Fraction

import pytest

from semicert import univariate as uv
from semicert.polycore import Polynomial, as_fraction, format_polynomial, parse_polynomial


def motzkin_variant(x, y, z):
    return x**4 * y**2 + y**4 * z**2 + z**4 * x**2 - 3 * x**2 * y**2 * z**2


def test_ring_arithmetic(xy):
    x, y = xy
    assert (x + y) * (x - y) == x * x - y * y
    assert x + Polynomial.zero(2) == x
    assert (x * x + 1) * (x * x + 1) == x**4 + 2 * x**2 + 1


def test_floats_are_rejected():
    with pytest.raises(TypeError):
        as_fraction(0.5)
    assert as_fraction("3/4") == Fraction(3, 4)


def test_evaluate(xyz):
    x, y, z = xyz
    assert motzkin_variant(x, y, z).evaluate((1, 1, 1)) == 0
    p = 3 + x * y - z**3
    assert p.evaluate((0, 0, 0)) == 3


def test_derivatives(xy):
    x, y = xy
    assert (x * x * y).derivative(0) == 2 * x * y
    assert (x * x * y).partial_derivative((2, 0)) == 2 * y
    h, yy = xy
    entry = -2 * yy + 2 * h + h * h - yy * yy + 2 * h * yy
    assert entry.partial_derivative((1, 1)) == Polynomial.const(2, 2)


def test_taylor_shift():
    x = Polynomial.var(0, 1)
    assert (x * x).taylor_shift((1,)) == 1 + 2 * x + x * x
    assert x.taylor_shift((0,), (-1,)) == -x
    assert (x**3).taylor_shift((2,), (1,)).evaluate((0,)) == 8


def test_homogenize_roundtrip(xyz):
    x, y, z = xyz
    one_var = Polynomial.var(0, 1)
    form = (1 + one_var * one_var).homogenize(2)
    u, v = Polynomial.var(0, 2), Polynomial.var(1, 2)
    assert form.poly == v * v + u * u
    m = motzkin_variant(x, y, z)
    deh = m.dehomogenize(2)
    a, b = Polynomial.var(0, 2), Polynomial.var(1, 2)
    assert deh == a**4 * b**2 + b**4 + a**2 - 3 * a**2 * b**2
    assert deh.homogenize(6).poly == m


def test_parse_and_format_roundtrip(xyz):
    x, y, z = xyz
    p = motzkin_variant(x, y, z) - Fraction(1, 3) * x * z + 7
    names = ["x", "y", "z"]
    assert parse_polynomial(format_polynomial(p, names), names) == p
    assert parse_polynomial("(x+y)^2 - 2*x*y", names) == x * x + y * y


def test_exact_div(xy):
    x, y = xy
    assert ((x + y) * (x - 2 * y)).exact_div(x + y) == x - 2 * y
    with pytest.raises(ValueError):
        (x * x + 1).exact_div(x + y)


# -- univariate ------------------------------------------------------------------------


def test_gcd_and_squarefree(t):
    assert uv.gcd(t * t - 1, t - 1) == t - 1
    p = 2 * t * t - 4
    assert uv.gcd(p, Polynomial.zero(1)) == uv.monic(p)
    q = (t - 2) ** 2 * (t * t + 1)
    assert uv.squarefree_part(q) == uv.monic((t - 2) * (t * t + 1))
    lc, parts = uv.squarefree_decomposition(3 * (t - 1) ** 3 * (t + 2))
    assert lc == 3 and parts[0] == t + 2 and parts[2] == t - 1


def test_sturm_counts(t):
    p = (t - 1) * (t - 2) * (t * t + 1)
    assert uv.count_real_roots(p) == 2
    assert uv.count_real_roots(p, 0, Fraction(3, 2)) == 1
    roots = uv.isolate_real_roots(t * t - 2)
    assert len(roots) == 2
    lo, hi = roots[1]
    assert lo * lo <= 2 <= hi * hi and hi - lo <= Fraction(1, 2**40)


def test_sign_near_zero(t):
    assert uv.sign_near_zero_plus(t**3 - t**2) == -1
    assert uv.sign_near_zero_plus(t**2 + t**5) == 1
    assert uv.order_at_zero(t**3 - t**2) == 2

import itertools
import math
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from periodforge.exactnum import (
    FieldError,
    QScalar,
    QVec2,
    bezout,
    det2,
    egcd,
    format_scalar,
    integer_column_reduce,
    integer_kernel,
    parse_scalar,
    rank_q,
    sign,
)

fractions = st.fractions(min_value=-50, max_value=50, max_denominator=30)


def to_sympy(x: QScalar):
    return sympy.Rational(x.p.numerator, x.p.denominator) + sympy.Rational(
        x.q.numerator, x.q.denominator) * sympy.sqrt(x.d or 1)


@given(fractions, fractions, st.sampled_from([2, 3, 5, 7]))
@settings(max_examples=300, deadline=None)
def test_sign_matches_sympy(p, q, d):
    x = QScalar(p, q, d)
    expected = sympy.sign(to_sympy(x)) if x.d else sympy.sign(sympy.Rational(str(p)))
    assert sign(x) == int(expected)


@given(fractions, fractions, fractions, fractions)
@settings(max_examples=200, deadline=None)
def test_field_operations(a, b, c, e):
    x, y = QScalar(a, b, 2), QScalar(c, e, 2)
    sx, sy = to_sympy(x), to_sympy(y)
    assert sympy.simplify(to_sympy(x + y) - (sx + sy)) == 0
    assert sympy.simplify(to_sympy(x * y) - sympy.expand(sx * sy)) == 0
    if not y.is_zero():
        assert (x / y) * y == x


@given(fractions, fractions)
@settings(max_examples=200, deadline=None)
def test_floor_matches_sympy(p, q):
    x = QScalar(p, q, 2)
    assert x.floor() == int(sympy.floor(to_sympy(x)))


@given(fractions, fractions, st.sampled_from([0, 2, 3]))
def test_format_round_trip(p, q, d):
    x = QScalar(p, q if d else 0, d)
    assert parse_scalar(format_scalar(x)) == x


def test_format_examples():
    assert format_scalar(QScalar(3)) == "3/1"
    assert format_scalar(QScalar(3, -2, 2)) == "3/1-2/1*sqrt(2)"
    assert parse_scalar("7") == QScalar(7)
    assert parse_scalar("-1/2+3/4*sqrt(2)") == QScalar(Fraction(-1, 2), Fraction(3, 4), 2)


@pytest.mark.parametrize("bad", ["", "abc", "1/0", "1+sqrt(4)", "2*sqrt(-3)"])
def test_parse_rejects_garbage(bad):
    with pytest.raises(FieldError):
        parse_scalar(bad)


def test_mixed_fields_rejected():
    with pytest.raises(FieldError):
        QScalar.sqrt(2) + QScalar.sqrt(3)


def test_sign_small_cases():
    s2 = QScalar.sqrt(2)
    assert sign(3 - 2 * s2) == 1
    assert sign(1 - s2) == -1
    assert sign(s2 * s2 - 2) == 0


@given(st.integers(-10**6, 10**6), st.integers(-10**6, 10**6))
def test_egcd_identity(a, b):
    g, x, y = egcd(a, b)
    assert g == sympy.gcd(a, b)
    assert a * x + b * y == g


def test_egcd_conventions():
    assert egcd(0, -5)[0] == 5
    assert egcd(4, 6) == (2, -1, 1)


@given(st.lists(st.integers(-500, 500), min_size=1, max_size=6))
def test_bezout(values):
    g, coeffs = bezout(values)
    assert g == math.gcd(*values)
    assert sum(c * v for c, v in zip(coeffs, values)) == g


@given(st.lists(st.lists(st.integers(-6, 6), min_size=4, max_size=4), min_size=1, max_size=3))
@settings(max_examples=150, deadline=None)
def test_kernel_against_sympy(rows):
    kern = integer_kernel(rows)
    M = sympy.Matrix(rows)
    assert len(kern) == 4 - M.rank()
    for k in kern:
        assert M * sympy.Matrix(k) == sympy.zeros(len(rows), 1)
    if kern:
        # the kernel basis is a Z-basis: saturated, so gcd of maximal minors is 1
        K = sympy.Matrix(kern).T
        minors = [K.extract(list(r), list(range(K.shape[1]))).det()
                  for r in itertools.combinations(range(4), K.shape[1])]
        assert sympy.gcd(minors) == 1


@given(st.lists(st.lists(st.integers(-9, 9), min_size=5, max_size=5), min_size=2, max_size=4))
@settings(max_examples=100, deadline=None)
def test_column_reduce_is_unimodular(mat):
    H, U, r = integer_column_reduce(mat)
    assert sympy.Matrix(mat) * sympy.Matrix(U) == sympy.Matrix(H)
    assert abs(sympy.Matrix(U).det()) == 1
    assert r == sympy.Matrix(mat).rank()


@given(st.lists(st.lists(fractions, min_size=3, max_size=3), min_size=1, max_size=4))
@settings(max_examples=100, deadline=None)
def test_rank_q(rows):
    M = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in r] for r in rows])
    assert rank_q(rows) == M.rank()


def test_vectors():
    a, b = QVec2(1, 2), QVec2(3, 4)
    assert det2(a, b) == QScalar(-2)
    assert a + b == QVec2(4, 6)
    assert (a * 2) / 2 == a

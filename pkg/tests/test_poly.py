import pytest
import sympy
from gmpy2 import mpq
from hypothesis import given, strategies as st

from pfl.linalg import primitive_vector
from pfl.poly import (Polynomial, as_rational, compose, divide_by_gcd, evaluate, parse_point,
                      partial_derivative, poly_arith, polynomial_gcd)

from conftest import poly
from strategies import points, polynomials


# -- worked examples -------------------------------------------------------------

def test_difference_of_squares():
    assert poly_arith(poly("x1 + 1", 1), poly("x1 - 1", 1), "mul") == poly("x1^2 - 1", 1)


def test_additive_identity():
    p = poly("3*x1^2*x2 - 1/2*x2", 2)
    assert poly_arith(p, Polynomial.zero(2), "add") == p


def test_cancellation_gives_empty_term_map():
    p = poly("x1*x2", 2)
    z = poly_arith(p, p, "sub")
    assert z.terms() == [] and not z


def test_arith_dimension_mismatch():
    with pytest.raises(ValueError):
        poly_arith(Polynomial.one(1), Polynomial.one(2), "add")


@pytest.mark.parametrize("text, var, expected", [
    ("x1^2*x2", 0, "2*x1*x2"),
    ("x1^3", 1, "0"),
    ("3*x1 + 5", 0, "3"),
])
def test_partial_derivative_examples(text, var, expected):
    got = partial_derivative(poly(text, 2), var)
    assert got == (Polynomial.zero(2) if expected == "0" else poly(expected, 2))


def test_partial_derivative_index_out_of_range():
    with pytest.raises(IndexError):
        partial_derivative(poly("x1", 2), 2)


def test_evaluate_examples():
    assert evaluate(poly("x1^2 + x2", 2), (2, 3)) == 7
    p = poly("4*x1^2*x2 - 7/3", 2)
    assert evaluate(p, (0, 0)) == p.constant_term() == mpq(-7, 3)
    assert evaluate(Polynomial.zero(2), (5, -1)) == 0
    with pytest.raises(ValueError):
        evaluate(p, (1,))


def test_compose_examples():
    x1, x2 = Polynomial.variables(2)
    assert compose(x1 * x2, [x2, x1]) == x1 * x2
    p = poly("x1^3*x2 - 2*x2^2 + 1", 2)
    assert compose(p, [x1, x2]) == p
    y = Polynomial.variable(1, 0)
    assert compose(y * y, [y + 1]) == poly("x1^2 + 2*x1 + 1", 1)
    with pytest.raises(ValueError):
        compose(p, [x1])


def test_text_form_is_grlex_with_rationals():
    p = poly("x2 + x1^2 - 1/2", 2)
    assert p.to_text() == "1 * x1^2 + 1 * x2^1 + -1/2"


def test_parse_point_and_rational_literals():
    assert parse_point("1/2,-3,0", 3) == (mpq(1, 2), mpq(-3), mpq(0))
    with pytest.raises(ValueError):
        parse_point("1,2", 3)
    with pytest.raises(ValueError):
        as_rational("1.5")
    with pytest.raises(ZeroDivisionError):
        as_rational("1/0")


def test_divexact():
    a, b = poly("x1^2 - x2^2", 2), poly("x1 + x2", 2)
    assert a.divexact(b) == poly("x1 - x2", 2)
    with pytest.raises(ArithmeticError):
        b.divexact(poly("x1", 2))


def test_gcd_example():
    a = poly("x1^2*x2 + x1*x2^2 - x1*x3 - x2*x3", 3)   # (x1 + x2)(x1 x2 - x3)
    b = poly("2*x1*x3 + 2*x2*x3 + 2*x1 + 2*x2", 3)     # 2 (x1 + x2)(x3 + 1)
    assert polynomial_gcd([a, b]) == poly("x1 + x2", 3)
    assert polynomial_gcd([a, poly("7", 3)]) == poly("1", 3)
    assert divide_by_gcd([a, Polynomial.zero(3), b]) == [poly("x1*x2 - x3", 3), Polynomial.zero(3),
                                                          poly("2*x3 + 2", 3)]


def test_primitive_vector_clears_content():
    v = [poly("6*x1^2*x2 + 6*x1*x2", 2), poly("-3/2*x1*x2^2", 2)]
    assert primitive_vector(v) == [poly("4*x1 + 4", 2), poly("-x2", 2)]


# -- properties ------------------------------------------------------------------

P3 = polynomials(3)


@given(P3, P3, P3)
def test_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a + b == b + a and a * b == b * a
    assert a * (b + c) == a * b + a * c


@given(P3, P3, st.integers(0, 2))
def test_leibniz(p, q, i):
    assert partial_derivative(p * q, i) == p * partial_derivative(q, i) + q * partial_derivative(p, i)


@given(P3, st.lists(polynomials(2, max_terms=3, max_degree=2), min_size=3, max_size=3), points(2))
def test_evaluate_compose_commute(p, maps, a):
    image = [evaluate(m, a) for m in maps]
    assert evaluate(compose(p, maps), a) == evaluate(p, image)


@given(P3)
def test_text_round_trip(p):
    assert Polynomial.parse(p.to_text(), 3) == p


@given(P3, P3)
def test_product_matches_sympy(a, b):
    xs = sympy.symbols("x1:4")

    def to_sympy(p):
        return sum((sympy.Rational(int(c.numerator), int(c.denominator))
                    * sympy.Mul(*[x ** e for x, e in zip(xs, exps)]) for exps, c in p.terms()),
                   sympy.Integer(0))

    assert sympy.expand(to_sympy(a * b) - to_sympy(a) * to_sympy(b)) == 0


def _sympy_expr(p, xs):
    return sum((sympy.Rational(int(c.numerator), int(c.denominator))
                * sympy.Mul(*[x ** e for x, e in zip(xs, exps)]) for exps, c in p.terms()),
               sympy.Integer(0))


@given(polynomials(3, max_terms=3, max_degree=2), polynomials(3, max_terms=3, max_degree=2),
       polynomials(3, max_terms=2, max_degree=2))
def test_gcd_matches_sympy(a, b, c):
    a, b = a * c, b * c
    g = polynomial_gcd([a, b])
    xs = sympy.symbols("x1:4")
    ref = sympy.gcd(_sympy_expr(a, xs), _sympy_expr(b, xs))
    ratio = sympy.cancel(_sympy_expr(g, xs) / ref) if ref != 0 else None
    if a or b:
        assert ratio is not None and ratio.is_number
    for p in (a, b):
        if p:
            p.divexact(g)


@given(st.lists(polynomials(3, max_terms=3, max_degree=2), min_size=2, max_size=3))
def test_primitive_vector_same_line(v):
    w = primitive_vector(v)
    assert all(v[i] * w[j] == v[j] * w[i] for i in range(len(v)) for j in range(len(v)))
    if any(v):
        assert polynomial_gcd(w).is_constant()

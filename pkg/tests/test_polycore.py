from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from reflekta.polycore import (
    DimensionMismatch,
    NotDivisible,
    Polynomial,
    PolynomialSyntaxError,
    SpaceMismatch,
    U,
    UnknownVariable,
    X,
    ZeroPolynomialError,
    degree_and_homogeneity,
    exact_divide,
    monomials_of_degree,
    parse_polynomial,
    partial_derivative,
    render,
    substitute,
)

from conftest import polynomials, pu, px


def convolve(a, b):
    """Naive term-pair product on raw dictionaries."""
    out = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            e = tuple(x + y for x, y in zip(e1, e2))
            out[e] = out.get(e, 0) + Fraction(c1) * Fraction(c2)
    return {e: c for e, c in out.items() if c}


class TestArithmetic:
    def test_difference_of_squares(self):
        assert px("x1+x2") * px("x1-x2") == px("x1^2 - x2^2")

    def test_cube_matches_convolution(self):
        base = {(2, 0): 1, (0, 2): 1}
        expected = convolve(convolve(base, base), base)
        got = px("x1^2+x2^2") ** 3
        assert got.terms == expected
        # binomial coefficients 1, 3, 3, 1
        assert [got.coefficient((6 - 2 * k, 2 * k)) for k in range(4)] == [comb(3, k) for k in range(4)]

    @given(polynomials(n=3))
    def test_additive_identity(self, p):
        assert p + Polynomial.zero(X(3)) == p
        assert p - p == 0

    def test_space_mismatch(self):
        with pytest.raises(SpaceMismatch):
            px("x1") + px("x1", 3)
        with pytest.raises(SpaceMismatch):
            px("x1") * pu("u1")

    def test_zero_coefficients_dropped(self):
        p = Polynomial(X(2), {(1, 0): 0, (0, 1): Fraction(2, 2)})
        assert p.terms == {(0, 1): 1}

    def test_coefficient_types(self):
        p = px("3/2*x1") * 2
        assert p.coefficient((1, 0)) == 3 and type(p.coefficient((1, 0))) is int

    def test_floats_rejected(self):
        with pytest.raises(TypeError):
            Polynomial(X(1), {(1,): 0.5})

    def test_evaluate(self):
        assert px("x1^2 - 3/2*x2")(2, 4) == -2


class TestDerivative:
    def test_power_rule(self):
        assert partial_derivative(px("x1^2*x2"), 1) == px("2*x1*x2")

    def test_index_range(self):
        with pytest.raises(IndexError):
            partial_derivative(px("x1"), 3)

    @given(polynomials(n=3), polynomials(n=3), st.integers(1, 3))
    def test_leibniz(self, p, q, i):
        assert (p * q).diff(i) == p * q.diff(i) + q * p.diff(i)

    @given(st.integers(0, 6), st.data())
    def test_euler(self, d, data):
        p = data.draw(polynomials(n=3, homogeneous=d))
        xs = [Polynomial.variable(X(3), i) for i in (1, 2, 3)]
        assert sum((x * p.diff(i) for i, x in enumerate(xs, 1)), Polynomial.zero(X(3))) == p * d


class TestDivision:
    def test_exact(self):
        assert exact_divide(px("x1^2-x2^2"), px("x1-x2")) == px("x1+x2")

    def test_b2_discriminant_by_u2(self):
        # expanded det [[4u1, 8u2], [8u2, 4u1u2]]
        delta = pu("4*u1") * pu("4*u1*u2") - pu("8*u2") * pu("8*u2")
        assert delta == pu("16*u1^2*u2 - 64*u2^2")
        assert exact_divide(delta, pu("u2")) == pu("16*u1^2 - 64*u2")

    def test_not_divisible(self):
        with pytest.raises(NotDivisible):
            exact_divide(px("x1^2+x2^2"), px("x1-x2"))

    def test_division_by_zero(self):
        with pytest.raises(ZeroDivisionError):
            exact_divide(px("x1"), px("0"))

    def test_rational_leading_coefficient(self):
        b = px("3/2*x1 - x2")
        assert exact_divide(b * px("x1 + 1/3"), b) == px("x1 + 1/3")

    @given(polynomials(n=3, max_degree=4), polynomials(n=3, max_degree=4))
    def test_round_trip(self, a, b):
        if b.is_zero:
            return
        assert exact_divide(a * b, b) == a


class TestSubstitute:
    images = [px("x1^2+x2^2"), px("x1^2*x2^2")]

    def test_generator_image(self):
        assert substitute(pu("u1"), self.images) == px("x1^2+x2^2")

    def test_b2_square_difference(self):
        assert substitute(pu("u1^2 - 4*u2"), self.images) == px("(x1^2-x2^2)^2")

    def test_i2_3_discriminant_is_jacobian_squared(self):
        images = [px("x1^2+x2^2"), px("x1^3 - 3*x1*x2^2")]
        delta = pu("36*u1^3 - 36*u2^2")
        # J = det [[2x, 2y], [3x^2-3y^2, -6xy]]
        J = px("2*x1") * px("-6*x1*x2") - px("2*x2") * px("3*x1^2 - 3*x2^2")
        assert substitute(delta, images) == J ** 2

    @settings(max_examples=50)
    @given(polynomials(space=U(2), max_degree=3), polynomials(space=U(2), max_degree=3))
    def test_homomorphism(self, a, b):
        assert substitute(a * b, self.images) == substitute(a, self.images) * substitute(b, self.images)
        assert substitute(a + b, self.images) == substitute(a, self.images) + substitute(b, self.images)

    def test_wrong_image_count(self):
        with pytest.raises(SpaceMismatch):
            substitute(pu("u1"), [px("x1")])


class TestDegree:
    def test_values(self):
        assert degree_and_homogeneity(px("x1^2+x2^2")) == (2, True)
        assert degree_and_homogeneity(px("x1^2+x2")) == (2, False)
        assert degree_and_homogeneity(px("4*x1^3*x2 - 4*x1*x2^3")) == (4, True)

    def test_zero(self):
        with pytest.raises(ZeroPolynomialError):
            degree_and_homogeneity(px("0"))

    def test_monomial_count(self):
        assert len(monomials_of_degree(3, 4)) == comb(6, 2)


class TestParser:
    def test_simple(self):
        assert px("x1^2 + x2^2").terms == {(2, 0): 1, (0, 2): 1}

    def test_binomial(self):
        p = px("(x1+x2)^3")
        assert [p.coefficient((3 - k, k)) for k in range(4)] == [1, 3, 3, 1]

    def test_rational(self):
        p = pu("3/2*u1*u2 - u1^3")
        assert p.terms == {(1, 1): Fraction(3, 2), (3, 0): -1}

    def test_implicit_multiplication_rejected(self):
        with pytest.raises(PolynomialSyntaxError) as info:
            px("2x1")
        assert info.value.position == 1

    @pytest.mark.parametrize("text,pos", [("x1 +", 4), ("(x1", 3), ("x1 ^ x2", 5), ("x1 $ 2", 3)])
    def test_syntax_positions(self, text, pos):
        with pytest.raises(PolynomialSyntaxError) as info:
            px(text)
        assert info.value.position == pos

    def test_unknown_variable(self):
        with pytest.raises(UnknownVariable):
            px("y1")
        with pytest.raises(UnknownVariable):
            px("u1")

    def test_dimension(self):
        with pytest.raises(DimensionMismatch):
            px("x3")
        with pytest.raises(DimensionMismatch):
            px("x0")

    def test_whitespace_and_sign(self):
        assert px(" - x1 *  x2 + 1/2 ") == Polynomial(X(2), {(1, 1): -1, (0, 0): Fraction(1, 2)})

    def test_render(self):
        assert render(pu("u1^3 - 3/2*u1*u2")) == "u1^3 - 3/2*u1*u2"
        assert render(px("0")) == "0"
        assert render(px("-x1 - 1")) == "-x1 - 1"

    @given(polynomials())
    def test_round_trip(self, p):
        assert parse_polynomial(render(p), p.space) == p

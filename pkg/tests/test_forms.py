from fractions import Fraction

import pytest
from hypothesis import given

from reflekta.forms import (
    BilinearForm,
    CodomainMetric,
    NotDerivation,
    NotPolynomial,
    ZeroDiscriminant,
    codomain_gradient_product,
    covariant_laplacian,
    det,
    gradient_product,
    laplacian,
    log_derivation_apply,
)
from reflekta.polycore import SpaceMismatch, substitute

from conftest import polynomials, pu, px

E2 = BilinearForm.euclidean(2)


class TestBilinearForm:
    def test_rejects_asymmetric(self):
        with pytest.raises(ValueError):
            BilinearForm([[1, 2], [0, 1]])

    def test_rejects_singular(self):
        with pytest.raises(ValueError):
            BilinearForm([[1, 1], [1, 1]])

    def test_string_entries(self):
        B = BilinearForm([["3/2", "0"], ["0", "-1"]])
        assert B.determinant == Fraction(-3, 2)
        assert B.signature() == (1, 1)
        assert not B.is_positive_definite()

    def test_signature_zero_diagonal(self):
        assert BilinearForm([[0, 1], [1, 0]]).signature() == (1, 1)
        assert BilinearForm([[2, 1, 0], [1, 2, 0], [0, 0, 5]]).signature() == (3, 0)

    def test_det_brute_force(self):
        m = [[2, -1, 0, 3], [1, 1, 4, 0], [0, 5, -2, 1], [7, 0, 1, 1]]
        from itertools import permutations
        oracle = 0
        for perm in permutations(range(4)):
            sign = 1
            for i in range(4):
                for j in range(i + 1, 4):
                    if perm[i] > perm[j]:
                        sign = -sign
            prod = 1
            for i in range(4):
                prod *= m[i][perm[i]]
            oracle += sign * prod
        assert det(m) == oracle


class TestGradientProduct:
    def test_euclidean_square_norm(self):
        assert gradient_product(px("x1^2+x2^2"), px("x1^2+x2^2"), E2) == px("4*x1^2 + 4*x2^2")

    def test_null_vector(self):
        M = BilinearForm.diagonal([1, -1])
        assert gradient_product(px("x1+x2"), px("x1+x2"), M) == 0

    def test_space_mismatch(self):
        with pytest.raises(SpaceMismatch):
            gradient_product(px("x1", 3), px("x1", 3), E2)

    @given(polynomials(n=2, max_degree=4), polynomials(n=2, max_degree=4), polynomials(n=2, max_degree=4))
    def test_symmetric_bilinear_leibniz(self, p, q, r):
        B = BilinearForm([[2, 1], [1, Fraction(-1, 3)]])
        assert gradient_product(p, q, B) == gradient_product(q, p, B)
        assert gradient_product(p, q + r, B) == gradient_product(p, q, B) + gradient_product(p, r, B)
        assert gradient_product(p, q * r, B) == q * gradient_product(p, r, B) + r * gradient_product(p, q, B)


class TestLaplacian:
    def test_values(self):
        assert laplacian(px("x1^2+x2^2"), E2) == 4
        assert laplacian(px("x1*x2"), E2) == 0
        assert laplacian(px("4*x1^3*x2 - 4*x1*x2^3"), E2) == 0

    def test_indefinite(self):
        assert laplacian(px("x1^2+x2^2"), BilinearForm.diagonal([1, -1])) == 0


class TestCodomain:
    def test_orthogonal_pair(self, b2_metric):
        assert codomain_gradient_product(pu("u2"), pu("u1^2 - 4*u2"), b2_metric) == 0

    def test_picks_g11(self, b2_metric):
        assert codomain_gradient_product(pu("u1"), pu("u1"), b2_metric) == pu("4*u1")

    def test_constant(self, b2_metric):
        assert codomain_gradient_product(pu("7"), pu("u1*u2"), b2_metric) == 0

    def test_metric_must_be_symmetric(self):
        with pytest.raises(ValueError):
            CodomainMetric([[pu("u1"), pu("u2")], [pu("u1"), pu("u1")]])

    def test_compatibility_with_pullback_b2(self, b2_metric):
        images = [px("x1^2+x2^2"), px("x1^2*x2^2")]
        for a, b in [("u1", "u2"), ("u1^2 - u2", "u1*u2"), ("u2^2", "u1^3 + 2")]:
            lhs = substitute(codomain_gradient_product(pu(a), pu(b), b2_metric), images)
            rhs = gradient_product(substitute(pu(a), images), substitute(pu(b), images), E2)
            assert lhs == rhs


class TestCovariantLaplacian:
    delta = pu("16*u1^2*u2 - 64*u2^2")

    def test_u1_worked_value(self, b2_metric):
        # divergence term 4 + 8 = 12, grad delta . grad u1 = 16 delta
        assert codomain_gradient_product(self.delta, pu("u1"), b2_metric) == self.delta * 16
        assert covariant_laplacian(pu("u1"), b2_metric, self.delta) == 4

    def test_constant(self, b2_metric):
        assert covariant_laplacian(pu("5"), b2_metric, self.delta) == 0

    def test_pullback_u2(self, b2_metric):
        images = [px("x1^2+x2^2"), px("x1^2*x2^2")]
        lhs = substitute(covariant_laplacian(pu("u2"), b2_metric, self.delta), images)
        rhs = laplacian(px("x1^2*x2^2"), E2)
        assert rhs == px("2*x1^2 + 2*x2^2")
        assert lhs == rhs

    def test_scaled_delta(self, b2_metric):
        # only grad log delta enters, so constant rescaling is harmless
        r = pu("u1*u2 - u2")
        assert covariant_laplacian(r, b2_metric, self.delta) == covariant_laplacian(r, b2_metric, self.delta * Fraction(3, 7))

    def test_not_polynomial(self):
        G = CodomainMetric([[pu("1"), pu("0")], [pu("0"), pu("1")]])
        with pytest.raises(NotPolynomial):
            covariant_laplacian(pu("u1"), G, pu("u1"))

    def test_zero_discriminant(self, b2_metric):
        with pytest.raises(ZeroDiscriminant):
            covariant_laplacian(pu("u1"), b2_metric, pu("0"))


class TestLogDerivation:
    def test_u2(self, b2_metric):
        assert log_derivation_apply(pu("u2"), pu("u1"), b2_metric) == 8

    def test_orthogonal_factor(self, b2_metric):
        assert log_derivation_apply(pu("u1^2 - 4*u2"), pu("u2"), b2_metric) == 0

    def test_not_derivation_identity_metric(self):
        G = CodomainMetric([[pu("1"), pu("0")], [pu("0"), pu("1")]])
        with pytest.raises(NotDerivation) as info:
            log_derivation_apply(pu("u1"), pu("u1"), G)
        assert info.value.witness == 1

import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from reflekta.forms import BilinearForm, gradient_product
from reflekta.groups import (
    CapExceeded,
    LinearMap,
    SingularGenerator,
    act,
    average_form,
    generate_group,
    is_invariant,
    is_reflection,
    permutation_matrix,
    preserves_form,
    reynolds,
)


from conftest import polynomials, px

SWAP = [[0, 1], [1, 0]]
FLIP = [[-1, 0], [0, 1]]


def signed_permutations(n):
    for perm in itertools.permutations(range(n)):
        for signs in itertools.product((1, -1), repeat=n):
            m = [[0] * n for _ in range(n)]
            for j, i in enumerate(perm):
                m[i][j] = signs[j]
            yield tuple(tuple(r) for r in m)


@pytest.fixture(scope="module")
def b2():
    return generate_group([SWAP, FLIP])


class TestGenerate:
    def test_s3(self):
        g = generate_group([permutation_matrix([1, 0, 2]), permutation_matrix([0, 2, 1])])
        assert g.order == 6

    def test_b2_matches_enumeration(self, b2):
        assert b2.order == 8
        assert {g.matrix for g in b2} == set(signed_permutations(2))

    def test_rational_rotation_is_infinite(self):
        rot = [[Fraction(3, 5), Fraction(-4, 5)], [Fraction(4, 5), Fraction(3, 5)]]
        with pytest.raises(CapExceeded):
            generate_group([rot], cap=10000)

    def test_singular(self):
        with pytest.raises(SingularGenerator):
            generate_group([[[1, 1], [1, 1]]])

    def test_closure_and_inverses(self, b2):
        b2.verify_closed()
        for g in b2:
            assert g.inverse() in b2


class TestReflection:
    def test_examples(self):
        assert is_reflection(LinearMap(FLIP))
        assert not is_reflection(LinearMap([[-1, 0], [0, -1]]))
        assert is_reflection(LinearMap(SWAP))

    def test_b2_count(self, b2):
        assert len(b2.reflections()) == 4


class TestAction:
    def test_swap(self):
        assert act(LinearMap(SWAP), px("x1^2")) == px("x2^2")

    def test_orthogonal_fixes_norm(self, b2):
        for g in b2:
            assert act(g, px("x1^2+x2^2")) == px("x1^2+x2^2")

    def test_inverse_convention(self):
        # (g.p)(x) = p(g^-1 x) with a non-involutive g
        g = LinearMap([[1, 1], [0, 1]])
        assert act(g, px("x1")) == px("x1 - x2")

    @settings(max_examples=50)
    @given(polynomials(n=2, max_degree=4), st.integers(0, 7), st.integers(0, 7))
    def test_action_law(self, p, i, j):
        mats = [LinearMap(m) for m in ([[1, 2], [0, 1]], [[0, -1], [1, 1]], [[2, 0], [1, Fraction(1, 2)]],
                                       SWAP, FLIP, [[1, 0], [3, 1]], [[0, 1], [-1, 0]], [[1, -1], [1, 1]])]
        g, h = mats[i], mats[j]
        assert act(g @ h, p) == act(g, act(h, p))
        assert act(g, act(g.inverse(), p)) == p

    def test_preserves_gradient_product(self, b2):
        p, q = px("x1^3 - x1*x2 + 2"), px("x2^2*x1 + x1")
        E = BilinearForm.euclidean(2)
        for g in b2:
            assert preserves_form(g, E)
            assert gradient_product(act(g, p), act(g, q), E) == act(g, gradient_product(p, q, E))


class TestInvariance:
    def test_s2(self):
        s2 = generate_group([SWAP])
        assert is_invariant(px("x1+x2"), s2)
        assert not is_invariant(px("x1-x2"), s2)

    def test_b2_by_all_elements(self, b2):
        p = px("x1^2*x2^2")
        assert is_invariant(p, b2)
        assert all(act(g, p) == p for g in b2)


class TestReynolds:
    def test_linear(self):
        assert reynolds(px("x1"), generate_group([SWAP])) == px("1/2*x1 + 1/2*x2")

    def test_quartic_b2(self, b2):
        assert reynolds(px("x1^4"), b2) == px("1/2*x1^4 + 1/2*x2^4")

    def test_odd_vanishes(self, b2):
        assert reynolds(px("x1^3*x2^2"), b2) == 0

    @given(polynomials(n=2, max_degree=5))
    def test_idempotent_and_invariant(self, p):
        g = generate_group([SWAP, FLIP])
        r = reynolds(p, g)
        assert is_invariant(r, g)
        assert reynolds(r, g) == r


class TestAverageForm:
    def test_euclidean_unchanged(self, b2):
        E = BilinearForm.euclidean(2)
        assert average_form(E, b2) == E

    def test_swap_average(self):
        avg = average_form(BilinearForm.diagonal([1, 2]), generate_group([SWAP]))
        assert avg == BilinearForm.diagonal([Fraction(3, 2), Fraction(3, 2)])

    def test_invariance_and_definiteness(self):
        shear_group = generate_group([[[0, -1], [1, -1]]])  # order 3, not orthogonal
        assert shear_group.order == 3
        avg = average_form(BilinearForm.euclidean(2), shear_group)
        assert avg.is_positive_definite()
        from reflekta.groups import matmul, transpose
        for g in shear_group:
            assert matmul(matmul(transpose(g.matrix), avg.matrix), g.matrix) == avg.matrix


class TestInfiniteOrder:
    def test_trace_criterion_is_exact_for_finite_groups(self):
        from reflekta.groups import _finite_order_possible
        for g in generate_group([SWAP, FLIP]):
            assert _finite_order_possible(g.matrix)

    def test_integer_trace_infinite_order_hits_cap(self):
        # shear has trace 2 but infinite order: only the cap stops it
        with pytest.raises(CapExceeded) as info:
            generate_group([[[1, 1], [0, 1]]], cap=50)
        assert info.value.cap == 50

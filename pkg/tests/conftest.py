from fractions import Fraction

import pytest
from hypothesis import strategies as st

from reflekta.polycore import Polynomial, U, X, parse_polynomial


def px(text, n=2):
    return parse_polynomial(text, X(n))


def pu(text, n=2):
    return parse_polynomial(text, U(n))


coefficients = st.one_of(
    st.integers(-5, 5),
    st.builds(Fraction, st.integers(-5, 5), st.integers(1, 4)),
)


@st.composite
def polynomials(draw, space=None, max_degree=6, max_terms=5, n=None, homogeneous=None):
    if space is None:
        space = X(n if n is not None else draw(st.integers(1, 4)))
    k = space.n
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        if homogeneous is not None:
            parts = draw(st.lists(st.integers(0, homogeneous), min_size=k - 1, max_size=k - 1))
            cuts = sorted(parts)
            exp = tuple(b - a for a, b in zip([0] + cuts, cuts + [homogeneous]))
        else:
            exp = tuple(draw(st.lists(st.integers(0, max_degree), min_size=k, max_size=k)))
            while sum(exp) > max_degree:
                i = max(range(k), key=lambda j: exp[j])
                exp = exp[:i] + (exp[i] - 1,) + exp[i + 1:]
        terms[exp] = draw(coefficients)
    return Polynomial(space, terms)


@pytest.fixture
def b2_metric():
    from reflekta.forms import CodomainMetric
    return CodomainMetric([[pu("4*u1"), pu("8*u2")], [pu("8*u2"), pu("4*u1*u2")]])


def pytest_terminal_summary(terminalreporter):
    import sys
    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance")
    for line in module.summary_lines():
        terminalreporter.write_line(line)

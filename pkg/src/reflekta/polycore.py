"""Sparse multivariate polynomials with exact rational coefficients.

A polynomial lives in a :class:`Space`, either the domain ``x1..xn`` or the
codomain ``u1..un``.  Terms are stored as a map from exponent tuples to
coefficients; coefficients are ``int`` when integral and ``Fraction``
otherwise, so arithmetic never leaves the rationals.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

Scalar = Union[int, Fraction]
Exponent = tuple


class SpaceMismatch(ValueError):
    pass


class NotDivisible(ArithmeticError):
    """Raised by :func:`exact_divide` when the quotient is not a polynomial."""

    def __init__(self, dividend, divisor, remainder_term=None):
        super().__init__(f"{dividend} is not divisible by {divisor}")
        self.dividend = dividend
        self.divisor = divisor
        self.remainder_term = remainder_term


class ZeroPolynomialError(ValueError):
    pass


class PolynomialSyntaxError(ValueError):
    def __init__(self, message: str, position: int, text: str = ""):
        super().__init__(f"{message} at position {position}")
        self.position = position
        self.text = text


class UnknownVariable(PolynomialSyntaxError):
    pass


class DimensionMismatch(PolynomialSyntaxError):
    pass


@dataclass(frozen=True)
class Space:
    kind: str
    n: int

    def __post_init__(self):
        if self.kind not in ("x", "u"):
            raise ValueError(f"unknown space kind {self.kind!r}")
        if self.n < 1:
            raise ValueError("dimension must be positive")

    def __str__(self):
        return f"{self.kind}[{self.n}]"


def X(n: int) -> Space:
    return Space("x", n)


def U(n: int) -> Space:
    return Space("u", n)


def as_scalar(c) -> Scalar:
    """Coerce ``c`` to an exact rational, returning an ``int`` when integral."""
    if isinstance(c, bool):
        c = int(c)
    if isinstance(c, int):
        return c
    if isinstance(c, Fraction):
        return c.numerator if c.denominator == 1 else c
    if isinstance(c, str):
        c = Fraction(c.strip())
        return c.numerator if c.denominator == 1 else c
    if isinstance(c, float):
        raise TypeError("floating point coefficients are not exact; use Fraction")
    c = Fraction(c)
    return c.numerator if c.denominator == 1 else c


def _clean(c):
    if type(c) is Fraction and c.denominator == 1:
        return c.numerator
    return c


def grevlex_key(exp: Exponent):
    """Sort key; larger key means larger monomial in graded reverse lex order."""
    return (sum(exp), tuple(-e for e in reversed(exp)))


class Polynomial:
    __slots__ = ("space", "_terms", "_hash")

    def __init__(self, space: Space, terms: Mapping[Exponent, object] | None = None):
        self.space = space
        clean = {}
        if terms:
            n = space.n
            for exp, c in terms.items():
                exp = tuple(int(e) for e in exp)
                if len(exp) != n or any(e < 0 for e in exp):
                    raise SpaceMismatch(f"exponent {exp} does not fit {space}")
                c = as_scalar(c)
                if c:
                    clean[exp] = clean.get(exp, 0) + c
                    if not clean[exp]:
                        del clean[exp]
                    else:
                        clean[exp] = _clean(clean[exp])
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, space: Space, terms: dict) -> "Polynomial":
        p = object.__new__(cls)
        p.space = space
        p._terms = terms
        p._hash = None
        return p

    @classmethod
    def zero(cls, space: Space) -> "Polynomial":
        return cls._raw(space, {})

    @classmethod
    def constant(cls, space: Space, c) -> "Polynomial":
        c = as_scalar(c)
        return cls._raw(space, {(0,) * space.n: c} if c else {})

    @classmethod
    def variable(cls, space: Space, i: int) -> "Polynomial":
        if not 1 <= i <= space.n:
            raise IndexError(f"variable index {i} out of range for {space}")
        exp = [0] * space.n
        exp[i - 1] = 1
        return cls._raw(space, {tuple(exp): 1})

    @classmethod
    def monomial(cls, space: Space, exp: Sequence[int], c=1) -> "Polynomial":
        return cls(space, {tuple(exp): c})

    # -- inspection -------------------------------------------------------

    @property
    def terms(self) -> Mapping[Exponent, Scalar]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    @property
    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and not any(next(iter(self._terms))))

    def constant_value(self) -> Scalar:
        return self._terms.get((0,) * self.space.n, 0)

    def coefficient(self, exp: Sequence[int]) -> Scalar:
        return self._terms.get(tuple(exp), 0)

    def degree(self) -> int:
        if not self._terms:
            raise ZeroPolynomialError("degree of the zero polynomial is undefined")
        return max(sum(e) for e in self._terms)

    def is_homogeneous(self) -> bool:
        if not self._terms:
            raise ZeroPolynomialError("homogeneity of the zero polynomial is undefined")
        degs = {sum(e) for e in self._terms}
        return len(degs) == 1

    def homogeneous_parts(self) -> dict[int, "Polynomial"]:
        parts: dict[int, dict] = {}
        for e, c in self._terms.items():
            parts.setdefault(sum(e), {})[e] = c
        return {d: Polynomial._raw(self.space, t) for d, t in sorted(parts.items())}

    def sorted_terms(self):
        """Terms in descending graded reverse lexicographic order."""
        return sorted(self._terms.items(), key=lambda t: grevlex_key(t[0]), reverse=True)

    def leading_term(self):
        if not self._terms:
            raise ZeroPolynomialError("zero polynomial has no leading term")
        return max(self._terms.items(), key=lambda t: grevlex_key(t[0]))

    # -- arithmetic -------------------------------------------------------

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.space != self.space:
                raise SpaceMismatch(f"cannot combine {self.space} with {other.space}")
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial.constant(self.space, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for e, c in other._terms.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = _clean(s)
            else:
                out.pop(e, None)
        return Polynomial._raw(self.space, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw(self.space, {e: -c for e, c in self._terms.items()})

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

    def scale(self, c) -> "Polynomial":
        c = as_scalar(c)
        if not c:
            return Polynomial.zero(self.space)
        return Polynomial._raw(self.space, {e: _clean(v * c) for e, v in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self._terms, other._terms
        if len(a) < len(b):
            a, b = b, a
        out: dict = {}
        get = out.get
        for e2, c2 in b.items():
            for e1, c1 in a.items():
                e = tuple([x + y for x, y in zip(e1, e2)])
                out[e] = get(e, 0) + c1 * c2
        return Polynomial._raw(self.space, {e: _clean(c) for e, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only non-negative integer powers are supported")
        result = Polynomial.constant(self.space, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                raise ZeroDivisionError("division by zero")
            return self.scale(Fraction(1) / as_scalar(other))
        return exact_divide(self, other)

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.space == other.space and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            other = as_scalar(other)
            if not other:
                return not self._terms
            return self._terms == {(0,) * self.space.n: other}
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.space, frozenset(self._terms.items())))
        return self._hash

    # -- calculus and substitution -----------------------------------------

    def diff(self, i: int) -> "Polynomial":
        return partial_derivative(self, i)

    def gradient(self) -> list["Polynomial"]:
        return [partial_derivative(self, i) for i in range(1, self.space.n + 1)]

    def substitute(self, images: Sequence["Polynomial"]) -> "Polynomial":
        return substitute(self, images)

    def __call__(self, *values):
        """Evaluate at a point of rationals."""
        if len(values) != self.space.n:
            raise SpaceMismatch(f"expected {self.space.n} values, got {len(values)}")
        vals = [as_scalar(v) for v in values]
        total = 0
        for e, c in self._terms.items():
            t = c
            for v, k in zip(vals, e):
                if k:
                    t *= v**k
            total += t
        return _clean(Fraction(total)) if isinstance(total, Fraction) else total

    def __str__(self):
        return render(self)

    def __repr__(self):
        return f"Polynomial({self.space.kind}{self.space.n}: {render(self)})"


def _check_same(*polys: Polynomial):
    space = polys[0].space
    for p in polys[1:]:
        if p.space != space:
            raise SpaceMismatch(f"cannot combine {space} with {p.space}")
    return space


def partial_derivative(p: Polynomial, i: int) -> Polynomial:
    """Formal partial derivative with respect to variable ``i`` (1-based)."""
    n = p.space.n
    if not 1 <= i <= n:
        raise IndexError(f"variable index {i} out of range for {p.space}")
    k = i - 1
    out = {}
    for e, c in p._terms.items():
        a = e[k]
        if a:
            out[e[:k] + (a - 1,) + e[k + 1:]] = c * a
    return Polynomial._raw(p.space, out)


def degree_and_homogeneity(p: Polynomial) -> tuple[int, bool]:
    return p.degree(), p.is_homogeneous()


def exact_divide(a: Polynomial, b: Polynomial) -> Polynomial:
    """Return ``q`` with ``a == q * b`` or raise :class:`NotDivisible`.

    Leading-term division in graded reverse lex order.  If ``b`` divides
    ``a`` then every intermediate remainder is a multiple of ``b``, so a
    leading term not divisible by ``lt(b)`` proves non-divisibility.
    """
    _check_same(a, b)
    if b.is_zero:
        raise ZeroDivisionError("division by the zero polynomial")
    if a.is_zero:
        return Polynomial.zero(a.space)
    space = a.space
    lb_exp, lb_c = b.leading_term()
    lb_inv = Fraction(1, 1) / lb_c
    b_rest = [(e, c) for e, c in b._terms.items() if e != lb_exp]

    rem = dict(a._terms)
    heap = [(_neg_key(e), e) for e in rem]
    heapq.heapify(heap)
    quotient = {}
    while heap:
        _, e = heapq.heappop(heap)
        c = rem.pop(e, 0)
        if not c:
            continue
        diff = tuple(x - y for x, y in zip(e, lb_exp))
        if any(d < 0 for d in diff):
            raise NotDivisible(a, b, Polynomial._raw(space, {e: c}))
        qc = c // lb_c if type(c) is int and type(lb_c) is int and not c % lb_c else _clean(c * lb_inv)
        quotient[diff] = qc
        for eb, cb in b_rest:
            m = tuple(x + y for x, y in zip(diff, eb))
            old = rem.get(m)
            v = (old or 0) - qc * cb
            if v:
                rem[m] = _clean(v)
                if old is None:
                    heapq.heappush(heap, (_neg_key(m), m))
            elif old is not None:
                del rem[m]
    q = Polynomial._raw(space, quotient)
    return q


def _neg_key(e):
    return (-sum(e), tuple(reversed(e)))


def divides(b: Polynomial, a: Polynomial) -> bool:
    try:
        exact_divide(a, b)
    except NotDivisible:
        return False
    return True


def substitute(p: Polynomial, images: Sequence[Polynomial]) -> Polynomial:
    """Ring homomorphism sending the j-th variable of ``p`` to ``images[j]``."""
    if len(images) != p.space.n:
        raise SpaceMismatch(f"{p.space} needs {p.space.n} images, got {len(images)}")
    if not images:
        raise SpaceMismatch("no images supplied")
    target = _check_same(*images)
    powers = [_PowerCache(img) for img in images]
    out = Polynomial.zero(target)
    # group terms by all-but-last exponent to share partial products
    groups: dict = {}
    for e, c in p._terms.items():
        groups.setdefault(e[:-1], []).append((e[-1], c))
    last = powers[-1]
    for head, tail in groups.items():
        inner_terms: dict = {}
        for k, c in tail:
            for e2, c2 in last[k]._terms.items():
                inner_terms[e2] = inner_terms.get(e2, 0) + c * c2
        inner = Polynomial._raw(target, {e: _clean(c) for e, c in inner_terms.items() if c})
        prefix = None
        for j, k in enumerate(head):
            if k:
                prefix = powers[j][k] if prefix is None else prefix * powers[j][k]
        out = out + (inner if prefix is None else prefix * inner)
    return out


class _PowerCache:
    def __init__(self, base: Polynomial):
        self._powers = [Polynomial.constant(base.space, 1), base]

    def __getitem__(self, k: int) -> Polynomial:
        pw = self._powers
        while len(pw) <= k:
            pw.append(pw[-1] * pw[1])
        return pw[k]


def linear_change(p: Polynomial, matrix: Sequence[Sequence]) -> Polynomial:
    """Return ``p(M x)``: substitute ``x_i -> sum_j M[i][j] x_j``."""
    n = p.space.n
    images = []
    for i in range(n):
        images.append(Polynomial(p.space, {_unit(n, j): matrix[i][j] for j in range(n)}))
    return substitute(p, images)


def _unit(n, j):
    e = [0] * n
    e[j] = 1
    return tuple(e)


def monomials_of_degree(n: int, d: int) -> list[Exponent]:
    """All exponent tuples of length ``n`` and total degree ``d``."""
    if n == 1:
        return [(d,)]
    out = []
    for first in range(d, -1, -1):
        for rest in monomials_of_degree(n - 1, d - first):
            out.append((first,) + rest)
    return out


# -- rendering and parsing ---------------------------------------------------


def _format_coeff(c: Scalar) -> str:
    if isinstance(c, Fraction):
        return f"{c.numerator}/{c.denominator}"
    return str(c)


def render(p: Polynomial) -> str:
    """Render in the textual grammar accepted by :func:`parse_polynomial`."""
    if p.is_zero:
        return "0"
    kind = p.space.kind
    pieces = []
    for i, (e, c) in enumerate(p.sorted_terms()):
        neg = c < 0
        mag = -c if neg else c
        factors = []
        for j, k in enumerate(e):
            if k == 1:
                factors.append(f"{kind}{j + 1}")
            elif k > 1:
                factors.append(f"{kind}{j + 1}^{k}")
        if not factors:
            body = _format_coeff(mag)
        elif mag == 1:
            body = "*".join(factors)
        else:
            body = _format_coeff(mag) + "*" + "*".join(factors)
        if i == 0:
            pieces.append(("-" if neg else "") + body)
        else:
            pieces.append(("- " if neg else "+ ") + body)
    return " ".join(pieces)


class _Parser:
    def __init__(self, text: str, space: Space):
        self.text = text
        self.space = space
        self.tokens = list(self._tokenize(text))
        self.pos = 0

    def _tokenize(self, text):
        i = 0
        n = len(text)
        while i < n:
            ch = text[i]
            if ch.isspace():
                i += 1
            elif ch.isdigit():
                j = i
                while j < n and text[j].isdigit():
                    j += 1
                if j < n and (text[j].isalpha() or text[j] == "_"):
                    raise PolynomialSyntaxError(
                        "implicit multiplication is not allowed", j, text)
                yield ("int", int(text[i:j]), i)
                i = j
            elif ch.isalpha():
                j = i + 1
                while j < n and text[j].isalnum():
                    j += 1
                yield ("name", text[i:j], i)
                i = j
            elif ch in "+-*/^()":
                yield (ch, ch, i)
                i += 1
            else:
                raise PolynomialSyntaxError(f"unexpected character {ch!r}", i, text)
        yield ("end", None, n)

    def peek(self):
        return self.tokens[self.pos]

    def take(self, kind=None):
        tok = self.tokens[self.pos]
        if kind is not None and tok[0] != kind:
            expected = "end of input" if kind == "end" else repr(kind)
            raise PolynomialSyntaxError(f"expected {expected}, found {tok[1]!r}", tok[2], self.text)
        self.pos += 1
        return tok

    def parse(self) -> Polynomial:
        p = self.expr()
        self.take("end")
        return p

    def expr(self) -> Polynomial:
        sign = 1
        if self.peek()[0] in ("+", "-"):
            sign = -1 if self.take()[0] == "-" else 1
        acc = self.term()
        if sign < 0:
            acc = -acc
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            t = self.term()
            acc = acc + t if op == "+" else acc - t
        return acc

    def term(self) -> Polynomial:
        acc = self.factor()
        while self.peek()[0] == "*":
            self.take()
            acc = acc * self.factor()
        return acc

    def factor(self) -> Polynomial:
        base = self.base()
        if self.peek()[0] == "^":
            self.take()
            tok = self.peek()
            if tok[0] != "int":
                raise PolynomialSyntaxError("exponent must be a non-negative integer", tok[2], self.text)
            self.take()
            base = base ** tok[1]
        return base

    def base(self) -> Polynomial:
        kind, val, pos = self.peek()
        if kind == "int":
            self.take()
            num = val
            if self.peek()[0] == "/":
                self.take()
                tok = self.peek()
                if tok[0] != "int":
                    raise PolynomialSyntaxError("expected denominator", tok[2], self.text)
                self.take()
                if tok[1] == 0:
                    raise PolynomialSyntaxError("zero denominator", tok[2], self.text)
                return Polynomial.constant(self.space, Fraction(num, tok[1]))
            return Polynomial.constant(self.space, num)
        if kind == "name":
            self.take()
            return self._variable(val, pos)
        if kind == "(":
            self.take()
            inner = self.expr()
            self.take(")")
            return inner
        what = "end of input" if kind == "end" else repr(val)
        raise PolynomialSyntaxError(f"unexpected {what}", pos, self.text)

    def _variable(self, name: str, pos: int) -> Polynomial:
        letter, digits = name[0], name[1:]
        if letter not in ("x", "u") or not digits.isdigit():
            raise UnknownVariable(f"unknown variable {name!r}", pos, self.text)
        if letter != self.space.kind:
            raise UnknownVariable(
                f"variable {name!r} does not belong to the {self.space.kind}-space", pos, self.text)
        idx = int(digits)
        if not 1 <= idx <= self.space.n:
            raise DimensionMismatch(
                f"variable {name!r} exceeds dimension {self.space.n}", pos, self.text)
        return Polynomial.variable(self.space, idx)


def parse_polynomial(text: str, space: Space) -> Polynomial:
    """Parse ``text`` into a polynomial of ``space``.

    >>> str(parse_polynomial("(x1+x2)^2", X(2)))
    'x1^2 + 2*x1*x2 + x2^2'
    """
    return _Parser(text, space).parse()


def poly_sum(polys: Iterable[Polynomial], space: Space) -> Polynomial:
    acc: dict = {}
    for p in polys:
        if p.space != space:
            raise SpaceMismatch(f"cannot combine {space} with {p.space}")
        for e, c in p._terms.items():
            acc[e] = acc.get(e, 0) + c
    return Polynomial._raw(space, {e: _clean(c) for e, c in acc.items() if c})

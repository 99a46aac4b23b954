"""Bilinear forms and the gradient/Laplacian operators they induce.

On the domain side a constant symmetric form ``B`` gives

    grad p . grad q = sum_ij B[i][j] * dp/dx_i * dq/dx_j

and on the codomain side a matrix of u-polynomials ``g`` plays the same role.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .polycore import (
    NotDivisible,
    Polynomial,
    Space,
    SpaceMismatch,
    as_scalar,
    exact_divide,
    partial_derivative,
    poly_sum,
    render,
)


class NotPolynomial(ArithmeticError):
    """The covariant Laplacian left the polynomial ring (division by delta failed)."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NotDerivation(ArithmeticError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class ZeroDiscriminant(ValueError):
    pass


def det(matrix: Sequence[Sequence]):
    """Exact determinant of a square matrix by cofactor expansion.

    Works for any entries supporting ``+``, ``-`` and ``*`` (rationals or
    polynomials).  Minors are memoised on their column sets.
    """
    n = len(matrix)
    if n == 0:
        return 1
    if any(len(row) != n for row in matrix):
        raise ValueError("matrix is not square")
    memo: dict = {}

    def minor(row: int, cols: tuple):
        if row == n - 1:
            return matrix[row][cols[0]]
        got = memo.get(cols)
        if got is not None:
            return got
        total = None
        for k, c in enumerate(cols):
            entry = matrix[row][c]
            if _is_zero(entry):
                continue
            sub = minor(row + 1, cols[:k] + cols[k + 1:])
            term = entry * sub
            if k % 2:
                term = -term
            total = term if total is None else total + term
        if total is None:
            total = matrix[row][cols[0]] * 0
        memo[cols] = total
        return total

    return minor(0, tuple(range(n)))


def _is_zero(v):
    if isinstance(v, Polynomial):
        return v.is_zero
    return v == 0


@dataclass(frozen=True)
class BilinearForm:
    matrix: tuple
    determinant: Fraction = field(init=False, compare=False)

    def __init__(self, matrix: Sequence[Sequence]):
        rows = tuple(tuple(as_scalar(c) for c in row) for row in matrix)
        n = len(rows)
        if n == 0 or any(len(r) != n for r in rows):
            raise ValueError("bilinear form must be a non-empty square matrix")
        for i in range(n):
            for j in range(i + 1, n):
                if rows[i][j] != rows[j][i]:
                    raise ValueError(f"form is not symmetric at ({i + 1},{j + 1})")
        d = as_scalar(det(rows))
        if not d:
            raise ValueError("form is singular")
        object.__setattr__(self, "matrix", rows)
        object.__setattr__(self, "determinant", d)

    @classmethod
    def euclidean(cls, n: int) -> "BilinearForm":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def diagonal(cls, entries: Sequence) -> "BilinearForm":
        n = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @property
    def n(self) -> int:
        return len(self.matrix)

    def __getitem__(self, ij):
        i, j = ij
        return self.matrix[i][j]

    def is_euclidean(self) -> bool:
        return all(self.matrix[i][j] == (1 if i == j else 0)
                   for i in range(self.n) for j in range(self.n))

    def is_positive_definite(self) -> bool:
        # Sylvester: all leading principal minors positive
        return all(det([row[:k] for row in self.matrix[:k]]) > 0 for k in range(1, self.n + 1))

    def signature(self) -> tuple[int, int]:
        """(positive, negative) inertia by congruence diagonalisation."""
        a = [[Fraction(c) for c in row] for row in self.matrix]
        pos = neg = 0
        while a:
            k = next((i for i in range(len(a)) if a[i][i]), None)
            if k is None:
                # zero diagonal: add a row/column with a non-zero off-diagonal entry
                i, j = next((i, j) for i in range(len(a)) for j in range(len(a)) if a[i][j])
                a[i] = [x + y for x, y in zip(a[i], a[j])]
                for row in a:
                    row[i] += row[j]
                k = i
            a[0], a[k] = a[k], a[0]
            for row in a:
                row[0], row[k] = row[k], row[0]
            p = a[0][0]
            if p > 0:
                pos += 1
            else:
                neg += 1
            a = [[a[r][c] - a[r][0] * a[0][c] / p for c in range(1, len(a))]
                 for r in range(1, len(a))]
        return pos, neg

    def to_rows(self) -> list[list[str]]:
        return [[str(c) for c in row] for row in self.matrix]


@dataclass(frozen=True)
class CodomainMetric:
    """Symmetric matrix of u-polynomials (the lifted gradient-product matrix)."""

    entries: tuple

    def __init__(self, entries: Sequence[Sequence[Polynomial]]):
        rows = tuple(tuple(row) for row in entries)
        n = len(rows)
        if n == 0 or any(len(r) != n for r in rows):
            raise ValueError("metric must be a non-empty square matrix")
        space = rows[0][0].space
        for i in range(n):
            for j in range(n):
                if rows[i][j].space != space:
                    raise SpaceMismatch("metric entries live in different spaces")
                if rows[i][j] != rows[j][i]:
                    raise ValueError(f"metric is not symmetric at ({i + 1},{j + 1})")
        if space.n != n:
            raise SpaceMismatch(f"{n}x{n} metric over {space}")
        object.__setattr__(self, "entries", rows)

    @property
    def n(self) -> int:
        return len(self.entries)

    @property
    def space(self) -> Space:
        return self.entries[0][0].space

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def determinant(self) -> Polynomial:
        return det(self.entries)

    def render(self) -> str:
        return "[" + ", ".join("[" + ", ".join(render(e) for e in row) + "]"
                               for row in self.entries) + "]"

    __str__ = render


def _require_space(B_n: int, *polys: Polynomial, kind: str):
    for p in polys:
        if p.space.kind != kind or p.space.n != B_n:
            raise SpaceMismatch(f"expected a {kind}-polynomial in dimension {B_n}, got {p.space}")


def gradient_product(p: Polynomial, q: Polynomial, B: BilinearForm) -> Polynomial:
    _require_space(B.n, p, q, kind="x")
    gp = p.gradient()
    gq = gp if p is q else q.gradient()
    parts = []
    for i in range(B.n):
        if gp[i].is_zero:
            continue
        for j in range(B.n):
            b = B.matrix[i][j]
            if b and not gq[j].is_zero:
                parts.append((gp[i] * gq[j]).scale(b))
    return poly_sum(parts, p.space)


def laplacian(p: Polynomial, B: BilinearForm) -> Polynomial:
    _require_space(B.n, p, kind="x")
    parts = []
    for i in range(B.n):
        di = partial_derivative(p, i + 1)
        if di.is_zero:
            continue
        for j in range(B.n):
            b = B.matrix[i][j]
            if b:
                parts.append(partial_derivative(di, j + 1).scale(b))
    return poly_sum(parts, p.space)


def codomain_gradient_product(a: Polynomial, b: Polynomial, G: CodomainMetric) -> Polynomial:
    if a.space != G.space or b.space != G.space:
        raise SpaceMismatch(f"expected polynomials over {G.space}")
    ga = a.gradient()
    gb = ga if a is b else b.gradient()
    parts = []
    for i in range(G.n):
        if ga[i].is_zero:
            continue
        for j in range(G.n):
            if gb[j].is_zero or G.entries[i][j].is_zero:
                continue
            parts.append(ga[i] * gb[j] * G.entries[i][j])
    return poly_sum(parts, G.space)


def divergence_part(r: Polynomial, G: CodomainMetric) -> Polynomial:
    """sum_i d/du_i ( grad u_i . grad r )."""
    n = G.n
    gr = r.gradient()
    parts = []
    for i in range(n):
        # grad u_i . grad r = sum_j g^{ij} dr/du_j
        flux = poly_sum((G.entries[i][j] * gr[j] for j in range(n) if not gr[j].is_zero), G.space)
        parts.append(partial_derivative(flux, i + 1))
    return poly_sum(parts, G.space)


def covariant_laplacian(r: Polynomial, G: CodomainMetric, delta: Polynomial) -> Polynomial:
    """Laplacian on the codomain: divergence term minus half of (grad log delta)(r).

    The log term is computed by exact division of ``grad delta . grad r`` by
    ``delta``; :class:`NotPolynomial` is raised when that division fails.
    """
    if r.space != G.space or delta.space != G.space:
        raise SpaceMismatch(f"expected polynomials over {G.space}")
    if delta.is_zero:
        raise ZeroDiscriminant("discriminant is identically zero")
    num = codomain_gradient_product(delta, r, G)
    try:
        log_term = exact_divide(num, delta)
    except NotDivisible as exc:
        raise NotPolynomial("grad delta . grad r is not divisible by delta", num) from exc
    return divergence_part(r, G) - log_term.scale(Fraction(1, 2))


def log_derivation_apply(lam: Polynomial, rho: Polynomial, G: CodomainMetric) -> Polynomial:
    """Return sigma with ``grad lam . grad rho == sigma * lam``.

    Raises :class:`NotDerivation` carrying ``grad lam . grad rho`` as witness
    when ``lam`` does not divide it.
    """
    if lam.space != G.space or rho.space != G.space:
        raise SpaceMismatch(f"expected polynomials over {G.space}")
    if lam.is_zero:
        raise ZeroDivisionError("lambda must be non-zero")
    num = codomain_gradient_product(lam, rho, G)
    try:
        return exact_divide(num, lam)
    except NotDivisible as exc:
        raise NotDerivation(f"{render(num)} is not a multiple of {render(lam)}", num) from exc

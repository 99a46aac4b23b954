"""Finite groups of rational matrices acting on polynomials."""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .forms import BilinearForm, det
from .polycore import Polynomial, SpaceMismatch, as_scalar, linear_change, poly_sum

DEFAULT_CAP = 10000


class CapExceeded(RuntimeError):
    def __init__(self, cap: int):
        super().__init__(f"group closure exceeded {cap} elements (infinite or too large)")
        self.cap = cap


class InfiniteOrder(CapExceeded):
    """An element has infinite order, so the closure can never terminate."""

    def __init__(self, cap: int, matrix):
        RuntimeError.__init__(self, f"element {matrix} has infinite order "
                                    "(trace is not an integer of size at most n)")
        self.cap = cap
        self.matrix = matrix


class SingularGenerator(ValueError):
    pass


Matrix = tuple  # tuple of row tuples of int/Fraction


def as_matrix(rows: Sequence[Sequence]) -> Matrix:
    m = tuple(tuple(as_scalar(c) for c in row) for row in rows)
    n = len(m)
    if n == 0 or any(len(r) != n for r in m):
        raise ValueError("expected a non-empty square matrix")
    return m


def identity(n: int) -> Matrix:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def matmul(a: Matrix, b: Matrix) -> Matrix:
    cols = list(zip(*b))
    return tuple(tuple(as_scalar(sum(x * y for x, y in zip(row, col))) for col in cols) for row in a)


def transpose(a: Matrix) -> Matrix:
    return tuple(zip(*a))


def inverse(a: Matrix) -> Matrix:
    """Gauss-Jordan inverse over the rationals."""
    n = len(a)
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(a)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col]), None)
        if piv is None:
            raise SingularGenerator("matrix is singular")
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [x / p for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return tuple(tuple(as_scalar(x) for x in row[n:]) for row in aug)


def rank(a: Sequence[Sequence]) -> int:
    rows = [[Fraction(x) for x in row] for row in a]
    r = 0
    ncols = len(rows[0]) if rows else 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][col]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        for i in range(r + 1, len(rows)):
            if rows[i][col]:
                f = rows[i][col] / rows[r][col]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        r += 1
    return r


@dataclass(frozen=True)
class LinearMap:
    matrix: Matrix

    def __init__(self, rows: Sequence[Sequence]):
        m = as_matrix(rows)
        if not det(m):
            raise SingularGenerator(f"singular matrix {m}")
        object.__setattr__(self, "matrix", m)

    @property
    def n(self) -> int:
        return len(self.matrix)

    def __matmul__(self, other: "LinearMap") -> "LinearMap":
        return _lm(matmul(self.matrix, other.matrix))

    def inverse(self) -> "LinearMap":
        return _lm(inverse(self.matrix))

    def is_identity(self) -> bool:
        return self.matrix == identity(self.n)

    def __repr__(self):
        return f"LinearMap({[[str(c) for c in row] for row in self.matrix]})"


def _lm(m: Matrix) -> LinearMap:
    out = object.__new__(LinearMap)
    object.__setattr__(out, "matrix", m)
    return out


class FiniteMatrixGroup:
    """Explicit finite group of rational matrices.

    Build one with :func:`generate_group`; the constructor trusts its input
    apart from the closure check.
    """

    def __init__(self, elements: Sequence[LinearMap], generators: Sequence[LinearMap],
                 verify: bool = True):
        self.elements = tuple(elements)
        self.generators = tuple(generators)
        self.n = self.elements[0].n
        self._index = {g.matrix: k for k, g in enumerate(self.elements)}
        self._inverses = None
        if verify:
            self.verify_closed()

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, g) -> bool:
        m = g.matrix if isinstance(g, LinearMap) else as_matrix(g)
        return m in self._index

    def verify_closed(self, full_limit: int = 200, samples: int = 4000, seed: int = 0):
        """Check identity, inverses and products; exhaustive up to ``full_limit`` elements."""
        if identity(self.n) not in self._index:
            raise ValueError("group does not contain the identity")
        els = self.elements
        if len(els) <= full_limit:
            pairs: Iterable = ((a, b) for a in els for b in els)
        else:
            rng = random.Random(seed)
            pairs = ((rng.choice(els), rng.choice(els)) for _ in range(samples))
        for a, b in pairs:
            if matmul(a.matrix, b.matrix) not in self._index:
                raise ValueError("element set is not closed under multiplication")
        for g in els:
            if inverse(g.matrix) not in self._index:
                raise ValueError("element set is not closed under inversion")

    def inverses(self) -> tuple[LinearMap, ...]:
        if self._inverses is None:
            self._inverses = tuple(_lm(inverse(g.matrix)) for g in self.elements)
        return self._inverses

    def reflections(self) -> list[LinearMap]:
        return [g for g in self.elements if is_reflection(g)]


def generate_group(generators: Sequence, cap: int = DEFAULT_CAP) -> FiniteMatrixGroup:
    """Breadth-first closure of ``generators`` under multiplication."""
    if cap < 1:
        raise ValueError("cap must be at least 1")
    gens = [g if isinstance(g, LinearMap) else LinearMap(g) for g in generators]
    if not gens:
        raise ValueError("at least one generator is required")
    n = gens[0].n
    if any(g.n != n for g in gens):
        raise SpaceMismatch("generators have different dimensions")
    for g in gens:
        if not _finite_order_possible(g.matrix):
            raise InfiniteOrder(cap, g.matrix)
    start = identity(n)
    seen = {start: _lm(start)}
    queue = deque([start])
    while queue:
        m = queue.popleft()
        for g in gens:
            prod = matmul(m, g.matrix)
            if prod not in seen:
                if not _finite_order_possible(prod):
                    raise InfiniteOrder(cap, prod)
                seen[prod] = _lm(prod)
                if len(seen) > cap:
                    raise CapExceeded(cap)
                queue.append(prod)
    return FiniteMatrixGroup(list(seen.values()), gens)


def _finite_order_possible(m: Matrix) -> bool:
    # eigenvalues of a finite-order matrix are roots of unity, so its rational
    # trace is an algebraic integer, hence an integer, bounded by n
    tr = sum(m[i][i] for i in range(len(m)))
    return isinstance(as_scalar(tr), int) and abs(tr) <= len(m)


def is_reflection(g: LinearMap) -> bool:
    n = g.n
    m = g.matrix
    if matmul(m, m) != identity(n):
        return False
    diff = [[m[i][j] - (1 if i == j else 0) for j in range(n)] for i in range(n)]
    return rank(diff) == 1


def act(g: LinearMap, p: Polynomial) -> Polynomial:
    """Left action ``(g.p)(x) = p(g^-1 x)``."""
    return act_by_inverse(g.inverse(), p)


def act_by_inverse(g_inv: LinearMap, p: Polynomial) -> Polynomial:
    if p.space.kind != "x" or p.space.n != g_inv.n:
        raise SpaceMismatch(f"cannot act in dimension {g_inv.n} on {p.space}")
    return linear_change(p, g_inv.matrix)


def is_invariant(p: Polynomial, G: FiniteMatrixGroup) -> bool:
    if p.space.n != G.n or p.space.kind != "x":
        raise SpaceMismatch(f"cannot act in dimension {G.n} on {p.space}")
    return all(act(g, p) == p for g in G.generators)


def reynolds(p: Polynomial, G: FiniteMatrixGroup) -> Polynomial:
    if p.space.n != G.n or p.space.kind != "x":
        raise SpaceMismatch(f"cannot act in dimension {G.n} on {p.space}")
    # summing over g^-1 visits the same elements as summing over g
    total = poly_sum((linear_change(p, g.matrix) for g in G.elements), p.space)
    return total.scale(Fraction(1, G.order))


def average_form(B: BilinearForm, G: FiniteMatrixGroup) -> BilinearForm:
    """Average ``g^T B g`` over the group."""
    if B.n != G.n:
        raise SpaceMismatch(f"form of dimension {B.n} vs group of dimension {G.n}")
    n = B.n
    acc = [[Fraction(0)] * n for _ in range(n)]
    for g in G.elements:
        m = matmul(matmul(transpose(g.matrix), B.matrix), g.matrix)
        for i in range(n):
            for j in range(n):
                acc[i][j] += m[i][j]
    return BilinearForm([[c / G.order for c in row] for row in acc])


def preserves_form(g: LinearMap, B: BilinearForm) -> bool:
    """True when ``g`` preserves the gradient product defined by ``B``.

    The gradient product pairs covectors, so the condition is ``g B g^T = B``.
    """
    return matmul(matmul(g.matrix, B.matrix), transpose(g.matrix)) == B.matrix


def permutation_matrix(perm: Sequence[int]) -> Matrix:
    """Matrix sending e_j to e_perm[j] (0-based)."""
    n = len(perm)
    rows = [[0] * n for _ in range(n)]
    for j, i in enumerate(perm):
        rows[i][j] = 1
    return tuple(tuple(r) for r in rows)


def diagonal(entries: Sequence) -> Matrix:
    n = len(entries)
    return tuple(tuple(as_scalar(entries[i]) if i == j else 0 for j in range(n)) for i in range(n))

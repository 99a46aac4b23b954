"""Subring membership: write an x-polynomial as a polynomial in a basis.

For a homogeneous basis I^1..I^n with degrees d_1..d_n, the degree-d part of
the subring Q[I] is spanned by the products I^a with sum a_i d_i = d.  Each
graded piece is one exact linear system over Q.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .polycore import Polynomial, U, as_scalar


class NoSolution(ArithmeticError):
    pass


class NonUnique(ArithmeticError):
    def __init__(self, message, particular=None, nullity=0):
        super().__init__(message)
        self.particular = particular
        self.nullity = nullity


class NotInSubring(ArithmeticError):
    def __init__(self, witness: Polynomial, degree: int | None = None):
        where = f" (degree {degree} part)" if degree is not None else ""
        super().__init__(f"{witness} is not a polynomial in the basis{where}")
        self.witness = witness
        self.degree = degree


class BasisDependent(ArithmeticError):
    def __init__(self, degree: int, nullity: int):
        super().__init__(f"basis products of weighted degree {degree} are linearly "
                         f"dependent (kernel dimension {nullity})")
        self.degree = degree
        self.nullity = nullity


def weighted_compositions(d: int, degrees: Sequence[int]) -> list[tuple[int, ...]]:
    """All ``a`` with ``sum(a[i] * degrees[i]) == d``, in lexicographic order."""
    if d < 0:
        return []
    if any(w < 1 for w in degrees):
        raise ValueError("weights must be positive")
    out: list[tuple[int, ...]] = []

    def rec(i: int, remaining: int, prefix: tuple):
        if i == len(degrees) - 1:
            if remaining % degrees[i] == 0:
                out.append(prefix + (remaining // degrees[i],))
            return
        for a in range(remaining // degrees[i] + 1):
            rec(i + 1, remaining - a * degrees[i], prefix + (a,))

    if not degrees:
        return [()] if d == 0 else []
    rec(0, d, ())
    return out


@dataclass
class Echelon:
    rows: list          # integer rows, augmented column last
    pivots: list        # pivot column per row


def _integer_rows(A: Sequence[Sequence], b: Sequence | None) -> list[list[int]]:
    rows = []
    for k, row in enumerate(A):
        vals = [Fraction(x) for x in row]
        if b is not None:
            vals.append(Fraction(b[k]))
        den = math.lcm(*(v.denominator for v in vals)) if vals else 1
        rows.append([int(v * den) for v in vals])
    return rows


def bareiss_echelon(rows: list[list[int]], ncols: int) -> Echelon:
    """Fraction-free row echelon form over the integers (Bareiss).

    Only the first ``ncols`` columns are eligible as pivots.  Every division
    inside the elimination is exact; this is asserted.
    """
    rows = [r[:] for r in rows if any(r)]
    m = len(rows)
    pivots = []
    prev = 1
    r = 0
    for c in range(ncols):
        if r >= m:
            break
        piv = next((i for i in range(r, m) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        p = rows[r][c]
        pr = rows[r]
        for i in range(r + 1, m):
            ri = rows[i]
            f = ri[c]
            if f:
                new = []
                for x, y in zip(ri, pr):
                    q, rem = divmod(p * x - f * y, prev)
                    assert not rem, "Bareiss division must be exact"
                    new.append(q)
                rows[i] = new
            else:
                new = []
                for x in ri:
                    q, rem = divmod(p * x, prev)
                    assert not rem, "Bareiss division must be exact"
                    new.append(q)
                rows[i] = new
        pivots.append(c)
        prev = p
        r += 1
    return Echelon(rows=rows[:r] + [x for x in rows[r:]], pivots=pivots)


def linear_solve_exact(A: Sequence[Sequence], b: Sequence) -> list:
    """Solve ``A x = b`` exactly over Q.

    Returns the unique solution as a list of rationals.  Raises
    :class:`NoSolution` for inconsistent systems and :class:`NonUnique`
    when the kernel is non-trivial.
    """
    m = len(A)
    ncols = len(A[0]) if m else 0
    if len(b) != m:
        raise ValueError("right-hand side length does not match the number of rows")
    rows = _integer_rows(A, b)
    ech = bareiss_echelon(rows, ncols)
    rank = len(ech.pivots)
    for row in ech.rows[rank:]:
        if row[ncols]:
            raise NoSolution("inconsistent system")
    x = [Fraction(0)] * ncols
    for k in range(rank - 1, -1, -1):
        c = ech.pivots[k]
        row = ech.rows[k]
        s = Fraction(row[ncols])
        for j in range(c + 1, ncols):
            if row[j]:
                s -= row[j] * x[j]
        x[c] = s / row[c]
    if rank < ncols:
        raise NonUnique("solution is not unique", particular=[as_scalar(v) for v in x],
                        nullity=ncols - rank)
    # residual check
    for row, rhs in zip(A, b):
        if sum(Fraction(a) * v for a, v in zip(row, x)) != Fraction(rhs):
            raise AssertionError("exact solve produced a non-zero residual")
    return [as_scalar(v) for v in x]


class BasisExpander:
    """Caches products of basis powers for repeated graded solves."""

    def __init__(self, basis: Sequence[Polynomial]):
        if not basis:
            raise ValueError("empty basis")
        self.basis = tuple(basis)
        self.space = self.basis[0].space
        self.target = U(len(self.basis))
        degrees = []
        for p in self.basis:
            if p.space != self.space:
                raise ValueError("basis polynomials live in different spaces")
            if p.is_zero or not p.is_homogeneous() or p.degree() < 1:
                raise ValueError(f"basis element {p} is not a non-constant homogeneous polynomial")
            degrees.append(p.degree())
        self.degrees = tuple(degrees)
        self._powers = [[Polynomial.constant(self.space, 1), p] for p in self.basis]
        self._products: dict = {}

    def power(self, i: int, k: int) -> Polynomial:
        pw = self._powers[i]
        while len(pw) <= k:
            pw.append(pw[-1] * pw[1])
        return pw[k]

    def product(self, a: tuple) -> Polynomial:
        got = self._products.get(a)
        if got is not None:
            return got
        nz = [i for i, k in enumerate(a) if k]
        if not nz:
            out = Polynomial.constant(self.space, 1)
        elif len(nz) == 1:
            out = self.power(nz[0], a[nz[0]])
        else:
            last = nz[-1]
            head = a[:last] + (0,) * (len(a) - last)
            out = self.product(head) * self.power(last, a[last])
        self._products[a] = out
        return out

    def ansatz(self, d: int):
        """Exponent vectors of weighted degree ``d`` with their expansions."""
        exps = weighted_compositions(d, self.degrees)
        return exps, [self.product(a) for a in exps]

    def solve_piece(self, part: Polynomial, d: int) -> Polynomial:
        exps, expansions = self.ansatz(d)
        if not exps:
            raise NotInSubring(part, d)
        monos: dict = {}
        for q in expansions:
            for e in q._terms:
                monos.setdefault(e, len(monos))
        for e in part._terms:
            if e not in monos:
                raise NotInSubring(part, d)
        A = [[0] * len(exps) for _ in monos]
        for col, q in enumerate(expansions):
            for e, c in q._terms.items():
                A[monos[e]][col] = c
        rhs = [0] * len(monos)
        for e, c in part._terms.items():
            rhs[monos[e]] = c
        try:
            sol = linear_solve_exact(A, rhs)
        except NoSolution:
            raise NotInSubring(part, d) from None
        except NonUnique as exc:
            raise BasisDependent(d, exc.nullity) from None
        return Polynomial(self.target, {a: c for a, c in zip(exps, sol)})

    def pullback(self, rho: Polynomial) -> Polynomial:
        return rho.substitute(list(self.basis))

    def express(self, p: Polynomial) -> Polynomial:
        if p.space != self.space:
            raise ValueError(f"expected a polynomial over {self.space}, got {p.space}")
        result = Polynomial.zero(self.target)
        for d, part in p.homogeneous_parts().items():
            result = result + self.solve_piece(part, d)
        if self.pullback(result) != p:
            raise AssertionError("subring rewrite failed its substitution certificate")
        return result


def express_in_basis(p: Polynomial, system) -> Polynomial:
    """Return rho in u with ``rho(I^1, ..., I^n) == p``.

    ``system`` is an object with a ``basis`` attribute, a
    :class:`BasisExpander`, or a plain sequence of basis polynomials.
    Raises :class:`NotInSubring` or :class:`BasisDependent`.
    """
    return _expander(system).express(p)


def _expander(system) -> BasisExpander:
    if isinstance(system, BasisExpander):
        return system
    cached = getattr(system, "expander", None)
    if cached is not None:
        return cached() if callable(cached) else cached
    basis = getattr(system, "basis", system)
    return BasisExpander(list(basis))

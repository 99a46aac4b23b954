"""Built-in invariant systems: classical reflection groups and the
indefinite-signature counterexample."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .forms import BilinearForm, CodomainMetric
from .groups import FiniteMatrixGroup, diagonal, generate_group, is_invariant, permutation_matrix
from .polycore import Polynomial, U, X, exact_divide, NotDivisible, parse_polynomial, poly_sum


class UnknownSystem(KeyError):
    pass


class ParamOutOfRange(ValueError):
    pass


class FactorizationMismatch(ValueError):
    pass


@dataclass
class InvariantSystem:
    name: str
    param: Optional[int]
    form: BilinearForm
    basis: tuple
    degrees: tuple = ()
    group: Optional[FiniteMatrixGroup] = None
    known_metric: Optional[CodomainMetric] = None
    # (factor, multiplicity) pairs plus the constant c with delta = c * prod
    known_discriminant_factors: Optional[tuple] = None
    discriminant_constant: Optional[Fraction] = None
    # x-polynomials expected outside Q[I] although a multiple of them is inside
    field_witnesses: tuple = ()
    note: str = ""
    _expander: object = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.basis = tuple(self.basis)
        if not self.degrees:
            self.degrees = tuple(p.degree() if not p.is_zero else 0 for p in self.basis)
        else:
            self.degrees = tuple(self.degrees)

    @property
    def n(self) -> int:
        return len(self.basis)

    @property
    def label(self) -> str:
        return self.name if self.param is None else f"{self.name}({self.param})"

    @property
    def x_space(self):
        return X(self.n)

    @property
    def u_space(self):
        return U(self.n)

    def expander(self):
        from .rewrite import BasisExpander
        if self._expander is None:
            self._expander = BasisExpander(self.basis)
        return self._expander

    def check_declared(self):
        """Assert the fixture's own invariants (degrees, homogeneity, group-invariance)."""
        for p, d in zip(self.basis, self.degrees):
            if p.is_zero or not p.is_homogeneous() or p.degree() != d:
                raise ValueError(f"{self.label}: basis element {p} is not homogeneous of degree {d}")
        if self.group is not None:
            for p in self.basis:
                if not is_invariant(p, self.group):
                    raise ValueError(f"{self.label}: {p} is not group-invariant")
        if self.known_metric is not None and self.known_discriminant_factors:
            verify_factorization(self.known_metric.determinant(), self.known_discriminant_factors,
                                 self.discriminant_constant)


def factor_product(factors, space) -> Polynomial:
    acc = Polynomial.constant(space, 1)
    for lam, mult in factors:
        acc = acc * lam ** mult
    return acc


def verify_factorization(delta: Polynomial, factors, constant=None) -> Fraction:
    """Check ``delta == c * prod(lam**mult)`` for a non-zero rational ``c``; return ``c``."""
    prod = factor_product(factors, delta.space)
    if delta.is_zero or prod.is_zero:
        raise FactorizationMismatch("zero discriminant or factor")
    try:
        q = exact_divide(delta, prod)
    except NotDivisible:
        raise FactorizationMismatch("factors do not divide the discriminant") from None
    if not q.is_constant() or q.is_zero:
        raise FactorizationMismatch(f"discriminant / factor product = {q}, not a constant")
    c = q.constant_value()
    if constant is not None and Fraction(constant) != Fraction(c):
        raise FactorizationMismatch(f"stored constant {constant} but product gives {c}")
    return c


# -- helpers -----------------------------------------------------------------


def _p(text: str, n: int, kind: str = "x") -> Polynomial:
    return parse_polynomial(text, X(n) if kind == "x" else U(n))


def power_sum(n: int, k: int) -> Polynomial:
    sp = X(n)
    return poly_sum((Polynomial.variable(sp, i) ** k for i in range(1, n + 1)), sp)


def elementary_symmetric(polys: Sequence[Polynomial], k: int) -> Polynomial:
    sp = polys[0].space
    out = Polynomial.zero(sp)
    for combo in itertools.combinations(polys, k):
        term = Polynomial.constant(sp, 1)
        for q in combo:
            term = term * q
        out = out + term
    return out


def dihedral_real_part(m: int, y_scale: int = 1) -> Polynomial:
    """Re((x + i*sqrt(s)*y)^m) with integer coefficients; s = ``y_scale``."""
    terms = {}
    for k in range(0, m // 2 + 1):
        terms[(m - 2 * k, 2 * k)] = math.comb(m, 2 * k) * (-1) ** k * y_scale ** k
    return Polynomial(X(2), terms)


def _adjacent_transpositions(n: int):
    gens = []
    for i in range(n - 1):
        perm = list(range(n))
        perm[i], perm[i + 1] = perm[i + 1], perm[i]
        gens.append(permutation_matrix(perm))
    return gens


def symmetric_group(n: int) -> FiniteMatrixGroup:
    if n == 1:
        return generate_group([((1,),)])
    return generate_group(_adjacent_transpositions(n))


def hyperoctahedral_group(n: int) -> FiniteMatrixGroup:
    gens = _adjacent_transpositions(n) + [diagonal([-1] + [1] * (n - 1))]
    return generate_group(gens)


def demihyperoctahedral_group(n: int) -> FiniteMatrixGroup:
    # reflection in x1 + x2 = 0: (x1, x2) -> (-x2, -x1)
    m = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    m[0][0] = m[1][1] = 0
    m[0][1] = m[1][0] = -1
    return generate_group(_adjacent_transpositions(n) + [m])


def _dihedral_group_euclidean(m: int) -> Optional[FiniteMatrixGroup]:
    # reflection y -> -y plus a second mirror, all with rational entries
    if m == 1:
        return generate_group([diagonal([1, -1])])
    if m == 2:
        return generate_group([diagonal([1, -1]), diagonal([-1, 1])])
    if m == 4:
        return generate_group([diagonal([1, -1]), [[0, 1], [1, 0]]])
    return None


def _dihedral_group_lattice(m: int) -> FiniteMatrixGroup:
    # coordinates (a, b) with x = a, y = sqrt(3) b; rotations by 60/120 degrees are rational
    half = Fraction(1, 2)
    if m == 3:
        rot = [[-half, -3 * half], [half, -half]]
    elif m == 6:
        rot = [[half, -3 * half], [half, half]]
    else:
        raise ParamOutOfRange(f"lattice dihedral model only for m in (3, 6), got {m}")
    return generate_group([diagonal([1, -1]), rot])


# -- fixtures ----------------------------------------------------------------


def _sn_powersums(n: int, name: str = "Sn-powersums", param: Optional[int] = None) -> InvariantSystem:
    return InvariantSystem(
        name=name,
        param=n if param is None else param,
        form=BilinearForm.euclidean(n),
        basis=[power_sum(n, k) for k in range(1, n + 1)],
        group=symmetric_group(n),
        note=f"power sums p1..p{n} under S{n} permuting coordinates",
    )


def _type_b(n: int) -> InvariantSystem:
    sp = X(n)
    squares = [Polynomial.variable(sp, i) ** 2 for i in range(1, n + 1)]
    basis = [elementary_symmetric(squares, k) for k in range(1, n + 1)]
    system = InvariantSystem(
        name="B", param=n, form=BilinearForm.euclidean(n), basis=basis,
        group=hyperoctahedral_group(n),
        note="elementary symmetric polynomials in the squares; signed permutations",
    )
    if n == 2:
        system.known_metric = CodomainMetric([
            [_p("4*u1", 2, "u"), _p("8*u2", 2, "u")],
            [_p("8*u2", 2, "u"), _p("4*u1*u2", 2, "u")],
        ])
        system.known_discriminant_factors = ((_p("u2", 2, "u"), 1), (_p("u1^2 - 4*u2", 2, "u"), 1))
        system.discriminant_constant = Fraction(16)
    return system


def _type_d(n: int) -> InvariantSystem:
    sp = X(n)
    xs = [Polynomial.variable(sp, i) for i in range(1, n + 1)]
    squares = [v ** 2 for v in xs]
    basis = [elementary_symmetric(squares, k) for k in range(1, n)]
    prod = Polynomial.constant(sp, 1)
    for v in xs:
        prod = prod * v
    basis.append(prod)
    return InvariantSystem(
        name="D", param=n, form=BilinearForm.euclidean(n), basis=basis,
        group=demihyperoctahedral_group(n),
        note="e1..e(n-1) of the squares and x1*...*xn; even signed permutations",
    )


def _dihedral_metric(m: int) -> CodomainMetric:
    u = U(2)
    u1, u2 = Polynomial.variable(u, 1), Polynomial.variable(u, 2)
    return CodomainMetric([[u1 * 4, u2 * (2 * m)], [u2 * (2 * m), u1 ** (m - 1) * (m * m)]])


def _dihedral_factors(m: int):
    u = U(2)
    u1, u2 = Polynomial.variable(u, 1), Polynomial.variable(u, 2)
    if m % 2:
        return ((u1 ** m - u2 ** 2, 1),)
    return ((u1 ** (m // 2) - u2, 1), (u1 ** (m // 2) + u2, 1))


def _i2(m: int) -> InvariantSystem:
    sp = X(2)
    basis = [Polynomial(sp, {(2, 0): 1, (0, 2): 1}), dihedral_real_part(m)]
    group = _dihedral_group_euclidean(m)
    note = "x^2+y^2 and Re((x+iy)^m)"
    if group is None:
        note += "; rotation by 2pi/m is irrational, group-side checks are skipped"
    return InvariantSystem(
        name="I2", param=m, form=BilinearForm.euclidean(2), basis=basis, group=group,
        known_metric=_dihedral_metric(m),
        known_discriminant_factors=_dihedral_factors(m),
        discriminant_constant=Fraction(4 * m * m),
        note=note,
    )


def _i2_lattice(m: int) -> InvariantSystem:
    # same dihedral invariants written in coordinates a = x, b = y / sqrt(3)
    sp = X(2)
    basis = [Polynomial(sp, {(2, 0): 1, (0, 2): 3}), dihedral_real_part(m, y_scale=3)]
    return InvariantSystem(
        name="I2-lattice", param=m, form=BilinearForm.diagonal([1, Fraction(1, 3)]),
        basis=basis, group=_dihedral_group_lattice(m),
        known_metric=_dihedral_metric(m),
        known_discriminant_factors=_dihedral_factors(m),
        discriminant_constant=Fraction(4 * m * m),
        note="I2(m) in a rational frame (y = sqrt(3) b); form diag(1, 1/3)",
    )


def _counterexample() -> InvariantSystem:
    return InvariantSystem(
        name="counterexample-minkowski", param=None,
        form=BilinearForm.diagonal([1, -1]),
        basis=[_p("x1 + x2", 2), _p("x1^2 - x2^2", 2)],
        group=None,
        known_metric=CodomainMetric([
            [Polynomial.zero(U(2)), _p("2*u1", 2, "u")],
            [_p("2*u1", 2, "u"), _p("4*u2", 2, "u")],
        ]),
        field_witnesses=(_p("x1 - x2", 2),),
        note="closed under the indefinite gradient product, yet x1-x2 = I2/I1 is not in Q[I]",
    )


_REGISTRY = {
    "A": (tuple(range(1, 5)), lambda n: _sn_powersums(n + 1, name="A", param=n)),
    "B": (tuple(range(2, 5)), _type_b),
    "D": ((3, 4), _type_d),
    "I2": (tuple(range(2, 13)), _i2),
    "I2-lattice": ((3, 6), _i2_lattice),
    "Sn-powersums": (tuple(range(1, 5)), _sn_powersums),
    "counterexample-minkowski": ((), lambda _: _counterexample()),
}


def list_systems() -> list[tuple[str, tuple[int, ...]]]:
    """Fixture names with their admissible parameters (empty when none is taken)."""
    return [(name, params) for name, (params, _) in _REGISTRY.items()]


def build_system(name: str, param: Optional[int] = None, check: bool = True) -> InvariantSystem:
    try:
        params, builder = _REGISTRY[name]
    except KeyError:
        raise UnknownSystem(f"unknown system {name!r}; known: {', '.join(_REGISTRY)}") from None
    if params:
        if param is None:
            raise ParamOutOfRange(f"{name} needs a parameter in {params[0]}..{params[-1]}")
        if param not in params:
            raise ParamOutOfRange(f"{name} parameter {param} not in {list(params)}")
    elif param is not None:
        raise ParamOutOfRange(f"{name} takes no parameter")
    system = builder(param)
    if check:
        system.check_declared()
    return system

"""Verification pipeline for an invariant system.

The checks build on one another: the lifted metric gives the discriminant,
the basis gives the Jacobian, and the discriminant feeds the derivation,
orthogonality and Laplacian checks.
"""

from __future__ import annotations

import json
import random
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

from .catalog import FactorizationMismatch, InvariantSystem, verify_factorization
from .forms import (
    CodomainMetric,
    NotDerivation,
    NotPolynomial,
    codomain_gradient_product,
    covariant_laplacian,
    det,
    gradient_product,
    laplacian,
    log_derivation_apply,
)
from .groups import is_invariant, reynolds
from .polycore import Polynomial, monomials_of_degree, partial_derivative, render
from .rewrite import BasisDependent, NotInSubring

PASS = "PASS"
FAIL = "FAIL"
SKIPPED = "SKIPPED"

DEFAULT_SEED = 0
DEFAULT_CAP = 6
RANDOM_RHO_COUNT = 20


class ClosureFails(ArithmeticError):
    """Some gradient product of basis elements is not a polynomial in the basis."""

    def __init__(self, failures: list[tuple[int, int, Polynomial]]):
        self.failures = failures
        i, j, w = failures[0]
        super().__init__(f"gradient product ({i},{j}) = {w} is not in the subring")

    @property
    def entry(self) -> tuple[int, int]:
        return self.failures[0][:2]

    @property
    def entries(self) -> list[tuple[int, int]]:
        return [(i, j) for i, j, _ in self.failures]

    def locator(self) -> str:
        return "; ".join(f"entry ({i},{j}): {render(w)}" for i, j, w in self.failures)


@dataclass
class CheckRecord:
    id: str
    verdict: str
    witness: Optional[str] = None
    reason: Optional[str] = None
    millis: float = 0.0

    def to_dict(self) -> dict:
        out = {"id": self.id, "verdict": self.verdict}
        if self.witness is not None:
            out["witness"] = self.witness
        if self.reason is not None:
            out["reason"] = self.reason
        out["millis"] = round(self.millis, 3)
        return out


@dataclass
class VerificationReport:
    system: str
    params: dict
    seed: int
    cap: int
    checks: list[CheckRecord] = field(default_factory=list)
    # computed artefacts, not serialised
    metric: Optional[CodomainMetric] = field(default=None, repr=False)
    delta: Optional[Polynomial] = field(default=None, repr=False)
    jacobian: Optional[Polynomial] = field(default=None, repr=False)

    @property
    def overall(self) -> str:
        return FAIL if any(c.verdict == FAIL for c in self.checks) else PASS

    def get(self, check_id: str) -> CheckRecord:
        for c in self.checks:
            if c.id == check_id:
                return c
        raise KeyError(check_id)

    def verdicts(self) -> dict[str, str]:
        return {c.id: c.verdict for c in self.checks}

    def to_dict(self) -> dict:
        return {
            "system": self.system,
            "params": self.params,
            "seed": self.seed,
            "cap": self.cap,
            "checks": [c.to_dict() for c in self.checks],
            "overall": self.overall,
        }

    def to_json(self, indent: Optional[int] = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    def format_text(self) -> str:
        lines = [f"system: {self.system}  params: {self.params}  seed: {self.seed}  cap: {self.cap}"]
        for c in self.checks:
            line = f"  {c.verdict:<8} {c.id}"
            if c.witness is not None:
                line += f"  {c.witness}"
            if c.reason is not None:
                line += f"  ({c.reason})"
            lines.append(line)
        lines.append(f"overall: {self.overall}")
        return "\n".join(lines)


# -- matrices ------------------------------------------------------------------


def gradient_matrix_x(system: InvariantSystem) -> list[list[Polynomial]]:
    n = system.n
    out = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            out[i][j] = out[j][i] = gradient_product(system.basis[i], system.basis[j], system.form)
    return out


def lift_gradient_matrix(system: InvariantSystem, xmatrix=None) -> CodomainMetric:
    """Rewrite every gradient product of basis elements in the basis.

    Raises :class:`ClosureFails` listing every offending upper-triangular
    entry (1-based), or :class:`BasisDependent`.
    """
    xm = xmatrix if xmatrix is not None else gradient_matrix_x(system)
    ex = system.expander()
    n = system.n
    lifted = [[None] * n for _ in range(n)]
    failures = []
    for i in range(n):
        for j in range(i, n):
            try:
                lifted[i][j] = lifted[j][i] = ex.express(xm[i][j])
            except NotInSubring:
                failures.append((i + 1, j + 1, xm[i][j]))
    if failures:
        raise ClosureFails(failures)
    return CodomainMetric(lifted)


def discriminant(G: CodomainMetric) -> Polynomial:
    return G.determinant()


def jacobian(system: InvariantSystem) -> Polynomial:
    """det of the matrix with entries dI^j/dx^i."""
    n = system.n
    matrix = [[partial_derivative(system.basis[j], i + 1) for j in range(n)] for i in range(n)]
    return det(matrix)


# -- individual checks -----------------------------------------------------------


class _Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.millis = (time.perf_counter() - self.t0) * 1000.0


def _timed(fn: Callable[[], CheckRecord]) -> CheckRecord:
    with _Timer() as t:
        rec = fn()
    rec.millis = t.millis
    return rec


def check_hypotheses(system: InvariantSystem, J: Optional[Polynomial] = None) -> list[CheckRecord]:
    records = []

    def homogeneous():
        for k, p in enumerate(system.basis, 1):
            if p.is_zero or not p.is_homogeneous():
                return CheckRecord("hyp.homogeneous", FAIL, witness=f"I{k} = {render(p)}",
                                   reason=f"basis element {k} is not homogeneous")
            if p.degree() < 1:
                return CheckRecord("hyp.homogeneous", FAIL, witness=f"I{k} = {render(p)}",
                                   reason=f"basis element {k} is constant")
        return CheckRecord("hyp.homogeneous", PASS,
                           witness="degrees " + ", ".join(str(p.degree()) for p in system.basis))

    def independent():
        jac = J if J is not None else jacobian(system)
        if jac.is_zero:
            return CheckRecord("hyp.independent", FAIL, witness="J = 0",
                               reason="Jacobian vanishes identically; basis is algebraically dependent")
        return CheckRecord("hyp.independent", PASS, witness=f"J = {render(jac)}")

    def invariant():
        if system.group is None:
            return CheckRecord("hyp.invariant", SKIPPED, reason="no rational matrix group attached")
        for k, p in enumerate(system.basis, 1):
            if not is_invariant(p, system.group):
                return CheckRecord("hyp.invariant", FAIL, witness=f"I{k} = {render(p)}",
                                   reason="basis element is not fixed by a generator")
        return CheckRecord("hyp.invariant", PASS, witness=f"|G| = {system.group.order}")

    def euclidean():
        pos, neg = system.form.signature()
        if neg:
            return CheckRecord("hyp.euclidean", FAIL, witness=f"signature ({pos},{neg})",
                               reason="gradient product is not positive definite")
        return CheckRecord("hyp.euclidean", PASS, witness=f"signature ({pos},{neg})")

    for fn in (homogeneous, independent, invariant, euclidean):
        records.append(_timed(fn))
    return records


def verify_pullback_identity(system: InvariantSystem, delta: Polynomial, J: Polynomial) -> CheckRecord:
    lhs = delta.substitute(list(system.basis))
    rhs = (J * J).scale(system.form.determinant)
    if lhs == rhs:
        return CheckRecord("pullback", PASS, witness=f"det(B) = {system.form.determinant}")
    return CheckRecord("pullback", FAIL, witness=render(lhs - rhs),
                       reason="pullback of delta differs from det(B)*J^2")


def verify_jacobian_harmonic(system: InvariantSystem, J: Polynomial) -> CheckRecord:
    lap = laplacian(J, system.form)
    if lap.is_zero:
        return CheckRecord("harmonic", PASS)
    return CheckRecord("harmonic", FAIL, witness=render(lap), reason="Laplacian of J is non-zero")


def _coordinates(G: CodomainMetric) -> list[Polynomial]:
    return [Polynomial.variable(G.space, i) for i in range(1, G.n + 1)]


def verify_log_derivations(system: InvariantSystem, G: CodomainMetric, delta: Polynomial,
                           factors=None) -> list[CheckRecord]:
    """For each factor (and delta itself) check it divides its gradient with every u^i."""
    records = []
    lambdas = []
    if factors:
        lambdas.extend(lam for lam, _ in factors)
    lambdas.append(delta)
    coords = _coordinates(G)
    for lam in lambdas:
        label = "delta" if lam is delta else render(lam)

        def run(lam=lam, label=label):
            sigmas = []
            for k, u in enumerate(coords, 1):
                try:
                    sigmas.append(log_derivation_apply(lam, u, G))
                except NotDerivation as exc:
                    return CheckRecord(f"log_derivation[{label}]", FAIL,
                                       witness=f"grad lambda . grad u{k} = {render(exc.witness)}",
                                       reason="not divisible by lambda")
            return CheckRecord(f"log_derivation[{label}]", PASS,
                               witness="sigma = (" + ", ".join(render(s) for s in sigmas) + ")")

        records.append(_timed(run))
    if not factors:
        records.append(CheckRecord("log_derivation[factors]", SKIPPED,
                                   reason="partial: no factorization of delta supplied; delta-level check only"))
    return records


def verify_factor_orthogonality(system: InvariantSystem, G: CodomainMetric, factors) -> list[CheckRecord]:
    if not factors or len(factors) < 2:
        why = "no factorization supplied" if not factors else "fewer than two distinct factors"
        return [CheckRecord("orthogonality", SKIPPED, reason=why)]
    records = []
    lams = [lam for lam, _ in factors]
    for a in range(len(lams)):
        for b in range(a + 1, len(lams)):
            def run(a=a, b=b):
                rid = f"orthogonality[{render(lams[a])} | {render(lams[b])}]"
                val = codomain_gradient_product(lams[a], lams[b], G)
                if val.is_zero:
                    return CheckRecord(rid, PASS)
                return CheckRecord(rid, FAIL, witness=render(val), reason="factors are not orthogonal")
            records.append(_timed(run))
    return records


def random_rho(rng: random.Random, space, max_degree: int = 2) -> Polynomial:
    terms = {}
    for d in range(max_degree + 1):
        for e in monomials_of_degree(space.n, d):
            c = rng.randint(-3, 3)
            if c:
                terms[e] = c
    return Polynomial(space, terms)


def verify_laplacian_compat(system: InvariantSystem, G: CodomainMetric, delta: Polynomial,
                            seed: int = DEFAULT_SEED, count: int = RANDOM_RHO_COUNT) -> CheckRecord:
    rng = random.Random(seed)
    rhos = _coordinates(G) + [random_rho(rng, G.space) for _ in range(count)]
    basis = list(system.basis)
    for rho in rhos:
        try:
            cov = covariant_laplacian(rho, G, delta)
        except NotPolynomial:
            return CheckRecord("laplacian_compat", FAIL, witness=f"rho = {render(rho)}",
                               reason="covariant Laplacian is not a polynomial")
        lhs = cov.substitute(basis)
        rhs = laplacian(rho.substitute(basis), system.form)
        if lhs != rhs:
            return CheckRecord("laplacian_compat", FAIL, witness=f"rho = {render(rho)}",
                               reason="pullback of covariant Laplacian differs from flat Laplacian")
    return CheckRecord("laplacian_compat", PASS, witness=f"{len(rhos)} test functions, seed {seed}")


def verify_conclusion_sample(system: InvariantSystem, cap: int = DEFAULT_CAP) -> CheckRecord:
    """Every Reynolds average of a monomial of degree <= cap is a polynomial in the basis."""
    if system.group is None:
        return CheckRecord("conclusion_sample", SKIPPED, reason="no rational matrix group attached")
    ex = system.expander()
    sp = system.x_space
    seen = set()
    checked = 0
    for d in range(cap + 1):
        for e in monomials_of_degree(sp.n, d):
            inv = reynolds(Polynomial.monomial(sp, e), system.group)
            if inv in seen:
                continue
            seen.add(inv)
            checked += 1
            try:
                ex.express(inv)
            except NotInSubring:
                return CheckRecord("conclusion_sample", FAIL, witness=render(inv),
                                   reason=f"invariant of degree {d} is not a polynomial in the basis")
            except BasisDependent as exc:
                return CheckRecord("conclusion_sample", FAIL, witness=render(inv), reason=str(exc))
    return CheckRecord("conclusion_sample", PASS,
                       witness=f"{checked} distinct invariants up to degree {cap}")


def verify_field_witnesses(system: InvariantSystem) -> CheckRecord:
    """Exhibit elements of the invariant field that are not in Q[I].

    A witness w fails the conclusion when w is not in Q[I] but I^1 * w is.
    """
    ex = system.expander()
    first = system.basis[0]
    for w in system.field_witnesses:
        try:
            ex.express(w)
        except NotInSubring:
            try:
                multiple = ex.express(w * first)
            except NotInSubring:
                continue
            return CheckRecord("field_witness", FAIL, witness=render(w),
                               reason=f"not in Q[I] although I1*w = {render(multiple)}; "
                                      "invariants are not generated by the basis")
    return CheckRecord("field_witness", PASS, witness=f"{len(system.field_witnesses)} witnesses in Q[I]")


def verify_reflection_count(system: InvariantSystem, J: Polynomial) -> CheckRecord:
    if system.group is None:
        return CheckRecord("reflection_count", SKIPPED, reason="no rational matrix group attached")
    count = len(system.group.reflections())
    if J.is_zero:
        return CheckRecord("reflection_count", FAIL, witness=f"{count} reflections, J = 0")
    deg = J.degree()
    verdict = PASS if deg == count else FAIL
    return CheckRecord("reflection_count", verdict, witness=f"deg J = {deg}, reflections = {count}")


# -- driver ------------------------------------------------------------------------


def run_report(system: InvariantSystem, seed: int = DEFAULT_SEED, cap: int = DEFAULT_CAP,
               factors=None, params: Optional[dict] = None) -> VerificationReport:
    """Run every check in order and collect the verdicts.

    ``factors`` overrides the system's stored discriminant factorization.
    """
    if params is None:
        params = {} if system.param is None else {"param": system.param}
    report = VerificationReport(system=system.name, params=params, seed=seed, cap=cap)
    add = report.checks.append
    if factors is None:
        factors = system.known_discriminant_factors

    with _Timer() as t:
        J = jacobian(system)
    report.jacobian = J
    hyps = check_hypotheses(system, J)
    hyps[1].millis += t.millis
    report.checks.extend(hyps)
    homogeneous = hyps[0].verdict == PASS

    G = None
    if not homogeneous:
        add(CheckRecord("lift", SKIPPED, reason="basis is not homogeneous and non-constant"))
    else:
        def lift():
            nonlocal G
            try:
                G = lift_gradient_matrix(system)
            except ClosureFails as exc:
                return CheckRecord("lift", FAIL, witness=exc.locator(),
                                   reason="gradient products are not polynomial in the basis")
            except BasisDependent as exc:
                return CheckRecord("lift", FAIL, reason=str(exc))
            if system.known_metric is not None and G != system.known_metric:
                return CheckRecord("lift", FAIL, witness=G.render(),
                                   reason=f"differs from catalog metric {system.known_metric.render()}")
            return CheckRecord("lift", PASS, witness=G.render())
        add(_timed(lift))
    report.metric = G

    delta = None
    if G is None:
        add(CheckRecord("discriminant", SKIPPED, reason="lift did not succeed"))
    else:
        def disc():
            nonlocal delta, factors
            delta = discriminant(G)
            if factors:
                try:
                    c = verify_factorization(delta, factors)
                except FactorizationMismatch as exc:
                    factors = None
                    return CheckRecord("discriminant", FAIL, witness=render(delta), reason=str(exc))
                return CheckRecord("discriminant", PASS, witness=render(delta),
                                   reason=f"= {c} * " + " * ".join(
                                       f"({render(lam)})^{m}" if m != 1 else f"({render(lam)})"
                                       for lam, m in factors))
            return CheckRecord("discriminant", PASS, witness=render(delta))
        add(_timed(disc))
    report.delta = delta

    add(CheckRecord("jacobian", PASS, witness=render(J), millis=t.millis))
    add(_timed(lambda: verify_reflection_count(system, J)))

    if delta is None:
        add(CheckRecord("pullback", SKIPPED, reason="lift did not succeed"))
    else:
        add(_timed(lambda: verify_pullback_identity(system, delta, J)))
    add(_timed(lambda: verify_jacobian_harmonic(system, J)))

    if delta is None or delta.is_zero:
        why = "lift did not succeed" if delta is None else "discriminant is identically zero"
        add(CheckRecord("log_derivation", SKIPPED, reason=why))
        add(CheckRecord("orthogonality", SKIPPED, reason=why))
        add(CheckRecord("laplacian_compat", SKIPPED, reason=why))
    else:
        report.checks.extend(verify_log_derivations(system, G, delta, factors))
        report.checks.extend(verify_factor_orthogonality(system, G, factors))
        add(_timed(lambda: verify_laplacian_compat(system, G, delta, seed=seed)))

    if not homogeneous:
        add(CheckRecord("conclusion_sample", SKIPPED, reason="basis is not homogeneous"))
    else:
        add(_timed(lambda: verify_conclusion_sample(system, cap)))
        if system.field_witnesses:
            add(_timed(lambda: verify_field_witnesses(system)))
    return report

"""Command-line front end.

    reflekta catalog
    reflekta verify --system B --param 2 [--json] [--seed S] [--cap C]
    reflekta verify --config system.toml
    reflekta rewrite --system Sn-powersums --param 2 --expr "x1^3+x2^3"
    reflekta reynolds --system B --param 2 --expr "x1^4"

Exit status: 0 for PASS, 1 for any FAIL, 2 for usage or parse errors.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import dataclass
from typing import Optional, Sequence

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .catalog import InvariantSystem, ParamOutOfRange, UnknownSystem, build_system, list_systems
from .forms import BilinearForm
from .groups import CapExceeded, SingularGenerator, generate_group, reynolds
from .polycore import PolynomialSyntaxError, U, X, parse_polynomial, render
from .rewrite import BasisDependent, NotInSubring, express_in_basis
from .saito import DEFAULT_CAP, DEFAULT_SEED, run_report

log = logging.getLogger("reflekta")

SEED_ENV = "REFLEKTA_SEED"
EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    dimension: int
    form: list
    basis: list[str]
    degrees: Optional[list[int]] = None
    generators: Optional[list] = None
    factors: Optional[list[dict]] = None
    seed: int = DEFAULT_SEED
    cap: int = DEFAULT_CAP
    name: str = "config"

    @classmethod
    def from_mapping(cls, data: dict) -> "RunConfig":
        known = {"dimension", "form", "basis", "degrees", "generators", "factors", "seed", "cap", "name"}
        extra = set(data) - known
        if extra:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(extra))}")
        for key in ("dimension", "basis"):
            if key not in data:
                raise ConfigError(f"config is missing {key!r}")
        n = data["dimension"]
        if not isinstance(n, int) or n < 1:
            raise ConfigError("dimension must be a positive integer")
        form = data.get("form") or [[1 if i == j else 0 for j in range(n)] for i in range(n)]
        cfg = cls(
            dimension=n,
            form=form,
            basis=list(data["basis"]),
            degrees=data.get("degrees"),
            generators=data.get("generators"),
            factors=data.get("factors"),
            seed=int(data.get("seed", DEFAULT_SEED)),
            cap=int(data.get("cap", DEFAULT_CAP)),
            name=str(data.get("name", "config")),
        )
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path: str) -> "RunConfig":
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
        return cls.from_mapping(data)

    def validate(self):
        n = self.dimension
        if len(self.basis) != n:
            raise ConfigError(f"basis has {len(self.basis)} entries, dimension is {n}")
        if len(self.form) != n or any(len(row) != n for row in self.form):
            raise ConfigError(f"form must be {n}x{n}")
        if self.degrees is not None and len(self.degrees) != n:
            raise ConfigError("degrees must list one entry per basis element")

    def build(self) -> tuple[InvariantSystem, Optional[tuple]]:
        n = self.dimension
        try:
            form = BilinearForm([[_rational(c) for c in row] for row in self.form])
        except ValueError as exc:
            raise ConfigError(f"form: {exc}") from None
        basis = [parse_polynomial(s, X(n)) for s in self.basis]
        group = None
        if self.generators:
            gens = [[[_rational(c) for c in row] for row in g] for g in self.generators]
            group = generate_group(gens)
        factors = None
        if self.factors:
            factors = tuple((parse_polynomial(f["expr"], U(n)), int(f.get("mult", 1)))
                            for f in self.factors)
        system = InvariantSystem(name=self.name, param=None, form=form, basis=basis,
                                 degrees=tuple(self.degrees or ()), group=group)
        if self.degrees:
            for p, d in zip(basis, self.degrees):
                if not p.is_zero and p.degree() != d:
                    raise ConfigError(f"declared degree {d} for {render(p)}")
        return system, factors


def _rational(c):
    from fractions import Fraction
    if isinstance(c, float):
        raise ConfigError(f"use exact rationals such as \"3/2\" instead of the float {c}")
    return Fraction(c) if isinstance(c, str) else c


def _resolve_seed(flag: Optional[int], config_seed: int = DEFAULT_SEED) -> int:
    if flag is not None:
        return flag
    env = os.environ.get(SEED_ENV)
    if env:
        try:
            return int(env)
        except ValueError:
            raise ConfigError(f"{SEED_ENV} must be an integer, got {env!r}") from None
    return config_seed


def _system_from_args(args) -> InvariantSystem:
    return build_system(args.system, args.param)


def cmd_catalog(args) -> int:
    for name, params in list_systems():
        if not params:
            print(name)
        elif list(params) == list(range(params[0], params[-1] + 1)):
            print(f"{name} {params[0]}..{params[-1]}")
        else:
            print(f"{name} {','.join(map(str, params))}")
    return EXIT_PASS


def cmd_verify(args) -> int:
    factors = None
    if args.config:
        cfg = RunConfig.load(args.config)
        system, factors = cfg.build()
        seed = _resolve_seed(args.seed, cfg.seed)
        cap = args.cap if args.cap is not None else cfg.cap
        params = {"config": os.path.basename(args.config)}
    else:
        system = _system_from_args(args)
        seed = _resolve_seed(args.seed)
        cap = args.cap if args.cap is not None else DEFAULT_CAP
        params = None
    report = run_report(system, seed=seed, cap=cap, factors=factors, params=params)
    print(report.to_json() if args.json else report.format_text())
    return EXIT_PASS if report.overall == "PASS" else EXIT_FAIL


def cmd_rewrite(args) -> int:
    system = _system_from_args(args)
    p = parse_polynomial(args.expr, system.x_space)
    try:
        rho = express_in_basis(p, system)
    except NotInSubring:
        print("NOT-IN-SUBRING")
        return EXIT_FAIL
    except BasisDependent as exc:
        print(f"BASIS-DEPENDENT: {exc}")
        return EXIT_FAIL
    print(render(rho))
    return EXIT_PASS


def cmd_reynolds(args) -> int:
    system = _system_from_args(args)
    if system.group is None:
        raise ConfigError(f"{system.label} has no rational matrix group")
    p = parse_polynomial(args.expr, system.x_space)
    print(render(reynolds(p, system.group)))
    return EXIT_PASS


def _add_system_args(p: argparse.ArgumentParser, required: bool = True):
    p.add_argument("--system", required=required, help="catalog fixture name")
    p.add_argument("--param", type=int, default=None, help="fixture parameter")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="reflekta", description=__doc__.split("\n\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("catalog", help="list built-in systems").set_defaults(func=cmd_catalog)

    v = sub.add_parser("verify", help="run the verification report")
    _add_system_args(v, required=False)
    v.add_argument("--config", help="TOML file describing a system")
    v.add_argument("--json", action="store_true", help="emit the report as JSON")
    v.add_argument("--seed", type=int, default=None)
    v.add_argument("--cap", type=int, default=None, help="degree cap for the conclusion sample")
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("rewrite", help="express an x-polynomial in the basis")
    _add_system_args(r)
    r.add_argument("--expr", required=True)
    r.set_defaults(func=cmd_rewrite)

    y = sub.add_parser("reynolds", help="average an x-polynomial over the group")
    _add_system_args(y)
    y.add_argument("--expr", required=True)
    y.set_defaults(func=cmd_reynolds)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_PASS
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    if args.command == "verify" and bool(args.system) == bool(args.config):
        print("verify needs exactly one of --system or --config", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except (UnknownSystem, ParamOutOfRange, ConfigError, PolynomialSyntaxError,
            SingularGenerator, CapExceeded, tomllib.TOMLDecodeError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

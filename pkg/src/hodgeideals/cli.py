"""Command line front end.

Usage::

    hodgeideals check FILE
    hodgeideals i0 FILE
    hodgeideals hodge FILE --level K [--minimal] [--check]
    hodgeideals ord FILE --level K
    hodgeideals genlevel FILE --max K
    hodgeideals bfun FILE [--budget B]

FILE is a divisor file or the name of a shipped example (``corpus:NAME``
or just ``NAME`` when no such file exists).  Results go to stdout,
diagnostics to stderr.

Exit codes: 0 success, 2 failed invariant, 3 budget exceeded, 4 input error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__
from ._engine import BudgetExceeded
from .divisor import (
    DivisorError,
    bfunction_validate,
    check_saito_criterion,
    check_strong_koszul,
    compute_bfunction,
    normalize_basis,
)
from .fileformat import DivisorFile, corpus_text, parse_divisor_text
from .groebner import PolyIdeal
from .hodge import (HodgeComputation, InvariantError, hodge_ideal_0, minimal_ideal_generators, ord_filtration,
                    spec_hash)
from .parsing import ParseError
from .poly import Ring
from .weyl import WeylOrder

SCHEMA = "hodgeideals.report/1"

EXIT_OK = 0
EXIT_INVARIANT = 2
EXIT_BUDGET = 3
EXIT_INPUT = 4

ENV_DEGREE_BOUND = "HODGEIDEALS_DEGREE_BOUND"
ENV_PAIR_LIMIT = "HODGEIDEALS_PAIR_LIMIT"
DEFAULT_DEGREE_BOUND = 0
DEFAULT_PAIR_LIMIT = 200_000


class InputError(Exception):
    pass


@dataclass
class RunReport:
    command: str
    source: str = ""
    input_hash: str = ""
    variables: list = field(default_factory=list)
    orders: dict = field(default_factory=dict)
    budgets: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)
    results: list = field(default_factory=list)
    status: str = "ok"
    error: str | None = None

    def to_dict(self) -> dict:
        return {"schema": SCHEMA, "version": __version__, **asdict(self)}

    @classmethod
    def from_dict(cls, data: dict) -> "RunReport":
        if data.get("schema") != SCHEMA:
            raise ValueError(f"unsupported report schema {data.get('schema')!r}")
        keys = cls.__dataclass_fields__
        return cls(**{k: v for k, v in data.items() if k in keys})

    def ideals(self) -> dict:
        """Ideal results keyed by (name, level), parsed back into polynomials."""
        ring = Ring(self.variables)
        return {(r["name"], r["level"]): PolyIdeal(ring, [ring.parse(g) for g in r["generators"]])
                for r in self.results if r["kind"] == "ideal"}


# serialization -----------------------------------------------------------------------

def to_json(report: RunReport) -> str:
    return json.dumps(report.to_dict(), indent=2, sort_keys=False) + "\n"


def _text_result(r: dict) -> list[str]:
    kind = r["kind"]
    if kind == "ideal":
        lines = [f"{r['name']}_{r['level']} = ({', '.join(r['generators'])})"]
        if r.get("minimal"):
            degs = r["degrees"]
            lines.append(f"# {r['name']}_{r['level']}: {len(r['generators'])} minimal generators, "
                         f"max degree {max(degs) if degs else 0}")
        for key, value in r.get("provenance", {}).items():
            lines.append(f"# {r['name']}_{r['level']} {key}: {value}")
        return lines
    if kind == "check":
        lines = []
        saito = r["saito"]
        if saito["ok"] is None:
            lines.append("saito criterion: skipped (extended scope)")
        elif saito["ok"]:
            lines.append(f"saito criterion: ok (det = {saito['constant']}*h)")
        else:
            lines.append(f"saito criterion: FAILED (det = {saito['determinant']})")
        sk = r["strong_koszul"]
        lines.append("strong koszul: " + ("skipped" if sk is None else "ok" if sk else "FAILED"))
        if r.get("bfunction"):
            b = r["bfunction"]
            lines.append(f"b-function: {b['polynomial']}")
            lines.append(f"b roots in (-2, 0): {'yes' if b['roots_in_range'] else 'NO'}")
            lines.append(f"b symmetric about -1: {'yes' if b['symmetric'] else 'no'}")
        return lines
    if kind == "generating_level":
        if r["determined"]:
            head = f"generating level = {r['level']}"
        else:
            head = f"generating level > {r['k_max'] - 1} (not determined up to level {r['k_max']})"
        return [head, f"# r = {r['r']}, level <= r: {'yes' if r['at_most_r'] else 'no'}",
                "# steps: " + ", ".join(f"F_1D F_{k} = F_{k + 1}: {'yes' if ok else 'no'}"
                                       for k, ok in enumerate(r["steps"]))]
    if kind == "inclusions":
        lines = [f"inclusions up to level {r['level']}: {'ok' if r['ok'] else 'FAILED'}"]
        for c in r["checks"]:
            if not c["ok"]:
                lines.append(f"# failed {c['check']} at level {c['level']}: witness {c['witness']}")
        return lines
    if kind == "bfunction":
        return [f"b(s) = {r['polynomial']}", f"# roots: {r['roots']}"]
    return [json.dumps(r)]


def to_text(report: RunReport) -> str:
    lines = []
    for r in report.results:
        lines += _text_result(r)
    if report.error:
        lines.append(f"# error: {report.error}")
    lines.append(f"# command: {report.command}")
    lines.append(f"# status: {report.status}")
    lines.append(f"# input: {report.source} sha256:{report.input_hash}")
    for key, value in report.orders.items():
        lines.append(f"# order {key}: {value}")
    lines.append("# budgets: " + ", ".join(f"{k}={'none' if v is None else v}" for k, v in report.budgets.items()))
    lines.append("# timings: " + ", ".join(f"{k}={v:.3f}s" for k, v in report.timings.items()))
    for w in report.warnings:
        lines.append(f"# warning: {w}")
    return "\n".join(lines) + "\n"


def serialize(report: RunReport, fmt: str = "text") -> bytes:
    if fmt == "json":
        return to_json(report).encode()
    if fmt == "text":
        return to_text(report).encode()
    raise ValueError(f"unknown format {fmt!r}")


# input ------------------------------------------------------------------------------

def read_input(name: str) -> tuple[DivisorFile, str]:
    """Load a divisor file, falling back to the shipped examples."""
    path = Path(name)
    if name.startswith("corpus:") or (not path.exists() and path.suffix == ""):
        key = name.split(":", 1)[-1]
        try:
            text = corpus_text(key)
        except FileNotFoundError as exc:
            raise InputError(str(exc)) from None
        source = f"corpus:{key}"
    else:
        try:
            text = path.read_text()
        except OSError as exc:
            raise InputError(f"{name}: {exc.strerror}") from None
        source = str(path)
    try:
        f = parse_divisor_text(text, source)
    except ParseError as exc:
        raise InputError(f"{source}:{exc.line}:{exc.column}: {exc.message}") from None
    return f, hashlib.sha256(text.encode()).hexdigest()


def _budget_value(cli_value, env: str, default: int):
    raw = cli_value if cli_value is not None else os.environ.get(env)
    if raw is None:
        value = default
    else:
        try:
            value = int(raw)
        except ValueError:
            raise InputError(f"budget must be an integer, got {raw!r}") from None
    if value < 0:
        raise InputError("budgets must be non-negative (0 means unlimited)")
    return value or None


# commands ----------------------------------------------------------------------------

class _Runner:
    def __init__(self, args, report: RunReport, dfile: DivisorFile):
        self.args = args
        self.report = report
        self.file = dfile
        self.budget = {"degree_bound": report.budgets["degree_bound"],
                       "pair_limit": report.budgets["pair_limit"]}

    def timed(self, label: str, fn, *a, **kw):
        t0 = time.perf_counter()
        try:
            return fn(*a, **kw)
        finally:
            self.report.timings[label] = self.report.timings.get(label, 0.0) + time.perf_counter() - t0

    def spec(self):
        spec = self.timed("normalize", normalize_basis, self.file.spec)
        if spec.fields != self.file.spec.fields:
            self.report.warnings.append("basis normalized: chi(h) = h and delta_i(h) = 0")
        return spec

    def bfunction(self, spec):
        b = self.file.bfunction
        if b is None:
            self.report.warnings.append("no [bfunction] section: computing b(s)")
            b = self.timed("bfunction", compute_bfunction, spec, **self.budget)
        v = bfunction_validate(b)
        if not v["symmetric"]:
            self.report.warnings.append(f"b-function {b} is not symmetric about -1")
        if not v["roots_in_range"]:
            self.report.warnings.append(f"b-function {b} has roots outside (-2, 0)")
        return b

    def computation(self):
        spec = self.spec()
        b = self.bfunction(spec)
        comp = HodgeComputation(spec, b, route=getattr(self.args, "route", "project"), **self.budget)
        self.report.orders["weyl"] = WeylOrder.T(comp.J.ring).describe()
        self.report.orders["ideal"] = "degrevlex"
        return comp

    def ideal_record(self, name: str, level: int, ideal: PolyIdeal, provenance: dict, minimal=None):
        gens = ideal.generators if minimal is None else minimal
        rec = {"kind": "ideal", "name": name, "level": level,
               "generators": [str(g) for g in gens], "order": "degrevlex", "provenance": provenance}
        if minimal is not None:
            rec["minimal"] = True
            rec["degrees"] = [g.total_degree() for g in gens]
        self.report.results.append(rec)

    # individual commands
    def check(self) -> int:
        f = self.file
        spec = f.spec
        status = EXIT_OK
        if spec.extended_scope:
            saito = {"ok": None, "constant": None, "determinant": None}
            sk = None
            self.report.warnings.append("extended scope: Saito and strong Koszul checks skipped")
        else:
            ok, c, det = self.timed("saito", check_saito_criterion, spec)
            saito = {"ok": ok, "constant": None if c is None else str(c), "determinant": str(det)}
            if not ok:
                status = EXIT_INVARIANT
                sk = None
            else:
                spec = self.spec()
                sk = self.timed("strong_koszul", check_strong_koszul, spec)
                if not sk:
                    status = EXIT_INVARIANT
        rec = {"kind": "check", "saito": saito, "strong_koszul": sk, "bfunction": None}
        if f.bfunction is not None:
            v = bfunction_validate(f.bfunction)
            rec["bfunction"] = {"polynomial": str(f.bfunction), "roots": f.bfunction.format_roots(), **v}
            if not v["symmetric"]:
                self.report.warnings.append(f"b-function {f.bfunction} is not symmetric about -1")
            if not v["roots_in_range"]:
                status = EXIT_INVARIANT
        self.report.results.append(rec)
        return status

    def i0(self) -> int:
        if self.args.route == "elimination":
            spec = self.spec()
            b = self.bfunction(spec)
            res = self.timed("ideal_0", hodge_ideal_0, spec, b, **self.budget)
            self.report.orders["weyl"] = res.provenance["weyl_order"]
            self.report.orders["ideal"] = "degrevlex"
            self.ideal_record("I", 0, res.ideal, res.provenance)
            return EXIT_OK
        comp = self.computation()
        ideal = self.timed("ideal_0", comp.ideal, 0)
        self.ideal_record("I", 0, ideal, comp.provenance(0))
        return EXIT_OK

    def hodge(self) -> int:
        comp = self.computation()
        for k in range(self.args.level + 1):
            ideal = self.timed(f"ideal_{k}", comp.ideal, k)
            minimal = None
            if self.args.minimal:
                minimal = self.timed(f"minimal_{k}", minimal_ideal_generators, ideal, comp.spec)
            self.ideal_record("I", k, ideal, comp.provenance(k), minimal)
        if self.args.check:
            rep = self.timed("inclusions", comp.check_inclusions, self.args.level)
            self.report.results.append({"kind": "inclusions", **rep})
            if not rep["ok"]:
                return EXIT_INVARIANT
        return EXIT_OK

    def ord(self) -> int:
        spec = self.spec()
        self.report.orders["ideal"] = "degrevlex"
        memo: dict = {}
        for k in range(self.args.level + 1):
            ideal = self.timed(f"ord_{k}", ord_filtration, spec, k, memo)
            self.ideal_record("ord", k, ideal, {"spec_hash": spec_hash(spec), "pole_order": k + 1})
        return EXIT_OK

    def genlevel(self) -> int:
        comp = self.computation()
        rep = self.timed("generating_level", comp.generating_level, self.args.max)
        self.report.results.append({"kind": "generating_level", **rep})
        return EXIT_OK

    def bfun(self) -> int:
        spec = self.spec()
        degree_bound = self.args.budget if self.args.budget else self.budget["degree_bound"]
        self.report.budgets["bfunction_degree_bound"] = degree_bound
        b = self.timed("bfunction", compute_bfunction, spec, degree_bound, self.budget["pair_limit"],
                       method=self.args.method)
        v = bfunction_validate(b)
        self.report.results.append({"kind": "bfunction", "polynomial": str(b), "roots": b.format_roots(), **v})
        if not v["symmetric"]:
            self.report.warnings.append(f"b-function {b} is not symmetric about -1")
        if self.file.bfunction is not None and self.file.bfunction != b:
            self.report.warnings.append(f"computed b-function differs from the file's {self.file.bfunction}")
        return EXIT_OK


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with the input-error code."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hodgeideals",
                                     description="Hodge ideals of strongly Koszul free divisors.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("input", help="divisor file, or the name of a shipped example")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--degree-bound", type=int, default=None,
                        help=f"sugar degree cap for Groebner bases, 0 = none (env {ENV_DEGREE_BOUND})")
    common.add_argument("--pair-limit", type=int, default=None,
                        help=f"cap on processed pairs per basis, 0 = none (env {ENV_PAIR_LIMIT}, "
                             f"default {DEFAULT_PAIR_LIMIT})")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("check", parents=[common], help="Saito criterion, strong Koszul test, b-function checks")
    p = sub.add_parser("i0", parents=[common], help="the ideal I_0")
    p.add_argument("--route", choices=("elimination", "project", "intersect"), default="elimination",
                   help="elimination: J intersected with Q[x]; project/intersect: via the T-basis")
    p = sub.add_parser("hodge", parents=[common], help="the ideals I_0 .. I_K")
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--route", choices=("project", "intersect"), default="project")
    p.add_argument("--minimal", action="store_true", help="print minimal generators (weighted-homogeneous h)")
    p.add_argument("--check", action="store_true", help="also verify the inclusion chain")
    p = sub.add_parser("ord", parents=[common], help="order filtration numerators up to level K")
    p.add_argument("--level", type=int, required=True)
    p = sub.add_parser("genlevel", parents=[common], help="generating level of the Hodge filtration")
    p.add_argument("--max", type=int, required=True)
    p.add_argument("--route", choices=("project", "intersect"), default="project")
    p = sub.add_parser("bfun", parents=[common], help="compute the b-function")
    p.add_argument("--budget", type=int, default=None, help="degree bound for the b-function basis")
    p.add_argument("--method", choices=("minpoly", "eliminate"), default="minpoly")
    return parser


def run_command(argv: list[str] | None = None) -> tuple[RunReport | None, int, str]:
    """Parse arguments and run; returns (report, exit code, output format)."""
    args = build_parser().parse_args(argv)
    report = RunReport(args.command)
    try:
        for opt in ("level", "max"):
            if getattr(args, opt, 0) is not None and getattr(args, opt, 0) < 0:
                raise InputError(f"--{opt} must be non-negative")
        report.budgets = {
            "degree_bound": _budget_value(args.degree_bound, ENV_DEGREE_BOUND, DEFAULT_DEGREE_BOUND),
            "pair_limit": _budget_value(args.pair_limit, ENV_PAIR_LIMIT, DEFAULT_PAIR_LIMIT),
        }
        dfile, digest = read_input(args.input)
    except InputError as exc:
        print(f"hodgeideals: {exc}", file=sys.stderr)
        return None, EXIT_INPUT, args.format
    report.source = dfile.source
    report.input_hash = digest
    report.variables = list(dfile.spec.ring.names)
    report.warnings += dfile.warnings
    runner = _Runner(args, report, dfile)
    t0 = time.perf_counter()
    try:
        code = getattr(runner, args.command)()
        if code == EXIT_INVARIANT:
            report.status = "invariant_failed"
    except BudgetExceeded as exc:
        report.status, report.error, code = "budget_exceeded", str(exc), EXIT_BUDGET
    except (DivisorError, InvariantError) as exc:
        report.status, report.error, code = "invariant_failed", str(exc), EXIT_INVARIANT
    report.timings["total"] = time.perf_counter() - t0
    return report, code, args.format


def main(argv: list[str] | None = None) -> int:
    report, code, fmt = run_command(argv)
    if report is not None:
        sys.stdout.buffer.write(serialize(report, fmt))
        sys.stdout.flush()
        for w in report.warnings:
            print(f"warning: {w}", file=sys.stderr)
        if report.error:
            print(f"hodgeideals: {report.status}: {report.error}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())

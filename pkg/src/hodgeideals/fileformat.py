"""Divisor description files.

Example::

    [divisor]
    name = A2 arrangement
    variables = x, y, z
    h = (x-y)*(x-z)*(y-z)
    weights = 1, 1, 1

    [saito_basis]
    delta1 = Dx + Dy + Dz
    delta2 = x^2*Dx + y^2*Dy + z^2*Dz
    chi = 1/3*x*Dx + 1/3*y*Dy + 1/3*z*Dz

    [bfunction]
    roots = -1:2, -2/3:1, -4/3:1

    [flags]
    extended_scope = false

Values may continue on indented lines.  ``#`` starts a comment.  Vector
fields use ``Dx`` (or ``D1`` for the first variable) for the partial
derivative; coefficients must stand to the left of the ``D`` token.
``chi`` may also name one of the delta lines (``chi = delta3``).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from gmpy2 import mpq

from .divisor import BFunction, DivisorSpec, format_field
from .parsing import ParseError, parse_expression
from .poly import Poly, Ring, to_rational
from .weyl import WeylRing

SECTIONS = ("divisor", "saito_basis", "bfunction", "flags")


@dataclass
class Entry:
    value: str
    line: int
    column: int


@dataclass
class DivisorFile:
    spec: DivisorSpec
    bfunction: BFunction | None
    flags: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)
    source: str = ""


def _read_sections(text: str) -> dict[str, dict[str, Entry]]:
    sections: dict[str, dict[str, Entry]] = {}
    current = None
    last = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        if line[0] in " \t" and last is not None:
            last.value += " " + line.strip()
            continue
        stripped = line.strip()
        if stripped.startswith("["):
            if not stripped.endswith("]"):
                raise ParseError("unterminated section header", lineno, 1)
            current = stripped[1:-1].strip().lower()
            if current not in SECTIONS:
                raise ParseError(f"unknown section [{current}]", lineno, 2)
            if current in sections:
                raise ParseError(f"duplicate section [{current}]", lineno, 2)
            sections[current] = {}
            last = None
            continue
        if current is None:
            raise ParseError("key outside of any section", lineno, 1)
        if "=" not in line:
            raise ParseError("expected 'key = value'", lineno, 1)
        key, value = line.split("=", 1)
        key = key.strip().lower()
        if key in sections[current]:
            raise ParseError(f"duplicate key {key!r}", lineno, 1)
        col = line.index("=") + 2 + (len(value) - len(value.lstrip()))
        last = Entry(value.strip(), lineno, col)
        sections[current][key] = last
    return sections


def _require(sec: dict, key: str, section: str) -> Entry:
    if key not in sec:
        raise ParseError(f"missing key {key!r} in [{section}]", 1, 1)
    return sec[key]


def parse_vector_field(entry: Entry, ring: Ring) -> tuple:
    """Parse ``sum a_i*D_i`` into a tuple of coefficient polynomials."""
    W = WeylRing(ring.names)
    names = set(W.names)

    def atom(name: str):
        if name in names:
            return W.var(name)
        m = re.fullmatch(r"D(\d+)", name)
        if m and 1 <= int(m.group(1)) <= ring.nvars:
            return W.D(ring.names[int(m.group(1)) - 1])
        raise ValueError(f"unknown variable {name!r}")

    el = parse_expression(entry.value, atom, W.const, entry.line, entry.column)
    coeffs: list[dict] = [{} for _ in range(ring.nvars)]
    n = ring.nvars
    for m, c in el.terms.items():
        ds = m[n:]
        if sum(ds) != 1:
            raise ParseError("not a vector field: every term needs exactly one D-token "
                             "with its coefficient written to the left", entry.line, entry.column)
        i = ds.index(1)
        coeffs[i][m[:n]] = c
    return tuple(Poly(ring, d) for d in coeffs)


def parse_roots(entry: Entry) -> BFunction:
    pairs = []
    for part in entry.value.split(","):
        part = part.strip()
        if not part:
            continue
        root, sep, mult = part.partition(":")
        try:
            r = to_rational(root)
            m = int(mult) if sep else 1
        except (ValueError, TypeError):
            raise ParseError(f"bad root entry {part!r} (expected root:multiplicity)", entry.line, entry.column) from None
        if m <= 0:
            raise ParseError(f"multiplicity must be positive in {part!r}", entry.line, entry.column)
        pairs.append((r, m))
    if not pairs:
        raise ParseError("empty root list", entry.line, entry.column)
    return BFunction.from_pairs(pairs)


def _parse_bool(entry: Entry) -> bool:
    v = entry.value.lower()
    if v in ("true", "yes", "1", "on"):
        return True
    if v in ("false", "no", "0", "off"):
        return False
    raise ParseError(f"expected a boolean, got {entry.value!r}", entry.line, entry.column)


def parse_divisor_text(text: str, source: str = "<string>") -> DivisorFile:
    sections = _read_sections(text)
    div = sections.get("divisor")
    if div is None:
        raise ParseError("missing [divisor] section", 1, 1)
    var_entry = _require(div, "variables", "divisor")
    names = [v.strip() for v in var_entry.value.split(",") if v.strip()]
    for v in names:
        if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", v):
            raise ParseError(f"bad variable name {v!r}", var_entry.line, var_entry.column)
    try:
        ring = Ring(names)
    except ValueError as exc:
        raise ParseError(str(exc), var_entry.line, var_entry.column) from None
    h_entry = _require(div, "h", "divisor")
    h = parse_expression(h_entry.value, ring.var, ring.const, h_entry.line, h_entry.column)
    if not h or h.is_constant():
        raise ParseError("h must be a non-constant polynomial", h_entry.line, h_entry.column)
    weights = None
    if "weights" in div:
        w_entry = div["weights"]
        try:
            weights = tuple(to_rational(w) for w in w_entry.value.split(","))
        except ValueError:
            raise ParseError("weights must be rationals", w_entry.line, w_entry.column) from None
        if len(weights) != ring.nvars:
            raise ParseError(f"weights arity: {len(weights)} weights for {ring.nvars} variables",
                             w_entry.line, w_entry.column)
        if any(w <= 0 for w in weights):
            raise ParseError("weights must be positive", w_entry.line, w_entry.column)
    name = div["name"].value if "name" in div else ""

    flags = {"extended_scope": False}
    for key, entry in sections.get("flags", {}).items():
        if key != "extended_scope":
            raise ParseError(f"unknown flag {key!r}", entry.line, 1)
        flags[key] = _parse_bool(entry)

    basis = sections.get("saito_basis")
    if basis is None:
        raise ParseError("missing [saito_basis] section", 1, 1)
    deltas = []
    chi_entry = None
    for key, entry in basis.items():
        if key == "chi":
            chi_entry = entry
        elif re.fullmatch(r"delta\d+", key):
            deltas.append((int(key[5:]), key, entry))
        else:
            raise ParseError(f"unexpected key {key!r} in [saito_basis]", entry.line, 1)
    deltas.sort()
    if chi_entry is None:
        raise ParseError("the Euler field must be marked with a 'chi' entry", 1, 1)
    fields_, names_ = [], []
    chi_index = None
    alias = chi_entry.value.strip().lower()
    for _, key, entry in deltas:
        fields_.append(parse_vector_field(entry, ring))
        names_.append(key)
        if alias == key:
            chi_index = len(fields_) - 1
    if chi_index is None:
        fields_.append(parse_vector_field(chi_entry, ring))
        names_.append("chi")
        chi_index = len(fields_) - 1
    warnings = []
    if len(fields_) != ring.nvars:
        if not flags["extended_scope"]:
            raise ParseError(f"basis arity: {len(fields_)} fields for {ring.nvars} variables "
                             "(set extended_scope = true for non-free inputs)", 1, 1)
        warnings.append(f"extended scope: {len(fields_)} fields for {ring.nvars} variables; "
                        "the cyclic presentation is assumed, not checked")
    elif flags["extended_scope"]:
        warnings.append("extended scope: the cyclic presentation is assumed, not checked")

    b = parse_roots(sections["bfunction"]["roots"]) if "bfunction" in sections and "roots" in sections["bfunction"] else None
    spec = DivisorSpec(ring, h, tuple(fields_), chi_index, weights, flags["extended_scope"], name, tuple(names_))
    return DivisorFile(spec, b, flags, warnings, source)


def parse_divisor_file(path) -> DivisorFile:
    path = Path(path)
    return parse_divisor_text(path.read_text(), str(path))


def format_divisor_file(spec: DivisorSpec, b: BFunction | None = None, flags: dict | None = None) -> str:
    names = spec.ring.names
    lines = ["[divisor]"]
    if spec.name:
        lines.append(f"name = {spec.name}")
    lines.append("variables = " + ", ".join(names))
    lines.append(f"h = {spec.h}")
    if spec.weights:
        lines.append("weights = " + ", ".join(str(mpq(w)) for w in spec.weights))
    lines += ["", "[saito_basis]"]
    k = 1
    for i, f in enumerate(spec.fields):
        if i == spec.chi_index:
            continue
        lines.append(f"delta{k} = {format_field(f, names)}")
        k += 1
    lines.append(f"chi = {format_field(spec.chi, names)}")
    if b is not None:
        lines += ["", "[bfunction]", f"roots = {b.format_roots()}"]
    flags = flags or {"extended_scope": spec.extended_scope}
    lines += ["", "[flags]", f"extended_scope = {'true' if flags.get('extended_scope') else 'false'}"]
    return "\n".join(lines) + "\n"


def corpus_names() -> list[str]:
    """Names of the divisor files shipped with the package."""
    root = resources.files("hodgeideals") / "corpus"
    return sorted(p.name[:-4] for p in root.iterdir() if p.name.endswith(".div"))


def corpus_text(name: str) -> str:
    entry = resources.files("hodgeideals") / "corpus" / f"{name}.div"
    if not entry.is_file():
        raise FileNotFoundError(f"no corpus example named {name!r}")
    return entry.read_text()


def load_corpus(name: str) -> DivisorFile:
    """Parse one of the shipped example files by name."""
    return parse_divisor_text(corpus_text(name), f"corpus:{name}")

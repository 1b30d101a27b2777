"""Weyl algebras Q[x]<Dx>, with optional t/Dt pair and a central s.

Elements are stored in normal order: coefficient variables (x, t) to the
left of operator variables (Dx, Dt, s).  Exponent tuples follow the layout
``x_1..x_n, [t], Dx_1..Dx_n, [Dt], [s]``.
"""

from __future__ import annotations

from itertools import product as iproduct
from math import comb, perm
from typing import Iterable, Mapping, Sequence

from gmpy2 import mpq

from ._engine import Buchberger, BudgetExceeded, TermCoder, weyl_mul
from .groebner import MonomialOrder, PolyIdeal
from .poly import Poly, Ring, format_monomial, to_rational


class WeylRing:
    """The Weyl algebra on ``x_vars``, optionally with t, Dt and central s."""

    def __init__(self, x_vars: Iterable[str], has_t: bool = False, has_s: bool = False):
        self.x_vars = tuple(x_vars)
        self.has_t = has_t
        self.has_s = has_s
        n = len(self.x_vars)
        self.n = n
        names = list(self.x_vars) + (["t"] if has_t else [])
        self.d_offset = len(names)
        names += ["D" + v for v in self.x_vars] + (["Dt"] if has_t else [])
        if has_s:
            names.append("s")
        if len(set(names)) != len(names):
            raise ValueError(f"variable names clash in {names}")
        self.names = tuple(names)
        self.nvars = len(names)
        self._index = {v: i for i, v in enumerate(names)}
        self.t_index = n if has_t else None
        self.dt_index = self.d_offset + n if has_t else None
        self.s_index = self.nvars - 1 if has_s else None
        self.pairs = [(i, self.d_offset + i) for i in range(n)]
        if has_t:
            self.pairs.append((self.t_index, self.dt_index))
        self._pair_of_d = {d: c for c, d in self.pairs}

    # construction -----------------------------------------------------------
    def index(self, name: str) -> int:
        if name in self._index:
            return self._index[name]
        raise ValueError(f"unknown variable {name!r}")

    def d_index(self, i: int) -> int:
        return self.d_offset + i

    def var(self, name: str) -> "WeylElement":
        e = [0] * self.nvars
        e[self.index(name)] = 1
        return WeylElement(self, {tuple(e): mpq(1)})

    def D(self, name: str) -> "WeylElement":
        return self.var("D" + name)

    def const(self, c) -> "WeylElement":
        c = to_rational(c)
        return WeylElement(self, {(0,) * self.nvars: c} if c else {})

    def zero(self) -> "WeylElement":
        return WeylElement(self, {})

    def one(self) -> "WeylElement":
        return self.const(1)

    def monomial(self, exps, coeff=1) -> "WeylElement":
        return WeylElement(self, {tuple(exps): to_rational(coeff)})

    def parse(self, text: str) -> "WeylElement":
        from .parsing import parse_expression

        return parse_expression(text, self.var, self.const)

    def x_ring(self) -> Ring:
        return Ring(self.x_vars)

    def from_poly(self, p: Poly) -> "WeylElement":
        """Embed a polynomial whose variables are a subset of the commuting names."""
        idx = [self.index(v) for v in p.ring.names]
        out = {}
        for m, c in p.terms.items():
            e = [0] * self.nvars
            for i, k in zip(idx, m):
                e[i] += k
            out[tuple(e)] = c
        return WeylElement(self, out)

    def extend(self, has_t: bool | None = None, has_s: bool | None = None) -> "WeylRing":
        return WeylRing(self.x_vars, self.has_t if has_t is None else has_t,
                        self.has_s if has_s is None else has_s)

    def convert(self, p: "WeylElement") -> "WeylElement":
        """Move ``p`` into this ring by variable name (missing names must be unused)."""
        idx = []
        for name in p.ring.names:
            idx.append(self._index.get(name))
        out = {}
        for m, c in p.terms.items():
            e = [0] * self.nvars
            for i, k in zip(idx, m):
                if k:
                    if i is None:
                        raise ValueError(f"variable {p.ring.names[idx.index(i)]} not in target ring")
                    e[i] = k
            out[tuple(e)] = c
        return WeylElement(self, out)

    def __eq__(self, other):
        return isinstance(other, WeylRing) and self.names == other.names

    def __hash__(self):
        return hash(self.names)

    def __repr__(self):
        return f"WeylRing({', '.join(self.names)})"


def _leibniz(ring: WeylRing, m1: tuple, m2: tuple):
    """Expand (monomial m1)(monomial m2) into normal order."""
    base = [a + b for a, b in zip(m1, m2)]
    choices = []
    for c, d in ring.pairs:
        b, cx = m1[d], m2[c]
        if b and cx:
            choices.append((c, d, [(k, comb(b, k) * perm(cx, k)) for k in range(min(b, cx) + 1)]))
    if not choices:
        yield tuple(base), 1
        return
    for combo in iproduct(*[ch[2] for ch in choices]):
        e = list(base)
        f = 1
        for (c, d, _), (k, fk) in zip(choices, combo):
            e[c] -= k
            e[d] -= k
            f *= fk
        yield tuple(e), f


class WeylElement:
    __slots__ = ("ring", "terms")

    def __init__(self, ring: WeylRing, terms: Mapping[tuple, mpq] | None = None):
        self.ring = ring
        self.terms = {m: c for m, c in (terms or {}).items() if c}

    def _coerce(self, other) -> "WeylElement":
        if isinstance(other, WeylElement):
            if other.ring != self.ring:
                raise ValueError(f"ring mismatch: {self.ring} vs {other.ring}")
            return other
        if isinstance(other, Poly):
            return self.ring.from_poly(other)
        return self.ring.const(other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return WeylElement(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return WeylElement(self.ring, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                c = c1 * c2
                for m, f in _leibniz(self.ring, m1, m2):
                    out[m] = out.get(m, 0) + c * f
        return WeylElement(self.ring, out)

    def __rmul__(self, other):
        return self._coerce(other) * self

    def __pow__(self, k: int):
        result = self.ring.one()
        for _ in range(k):
            result = result * self
        return result

    def scale(self, c) -> "WeylElement":
        c = to_rational(c)
        return WeylElement(self.ring, {m: c * v for m, v in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, WeylElement):
            return self.ring == other.ring and self.terms == other.terms
        try:
            return self == self._coerce(other)
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        return hash((self.ring, frozenset(self.terms.items())))

    def order(self) -> int:
        """Total order in the operator variables Dx, Dt (s not counted)."""
        r = self.ring
        ds = [d for _, d in r.pairs]
        return max((sum(m[d] for d in ds) for m in self.terms), default=-1)

    def t_degree(self) -> int:
        """T-degree: each D and s counts 1, coefficient variables 0."""
        r = self.ring
        ops = [d for _, d in r.pairs] + ([r.s_index] if r.has_s else [])
        return max((sum(m[i] for i in ops) for m in self.terms), default=-1)

    def uses(self, names: Iterable[str]) -> bool:
        idx = [self.ring.index(v) for v in names if v in self.ring.names]
        return any(m[i] for m in self.terms for i in idx)

    def to_poly(self, ring: Ring) -> Poly:
        """Read an element of a commutative subalgebra as a polynomial in ``ring``."""
        idx = [self.ring.index(v) for v in ring.names]
        rest = [i for i in range(self.ring.nvars) if i not in idx]
        out = {}
        for m, c in self.terms.items():
            if any(m[i] for i in rest):
                raise ValueError("element is not in the requested subring")
            out[tuple(m[i] for i in idx)] = c
        return Poly(ring, out)

    def sorted_terms(self):
        key = lambda mc: (sum(mc[0]), tuple(-e for e in reversed(mc[0])))
        return sorted(self.terms.items(), key=key, reverse=True)

    def __str__(self):
        if not self.terms:
            return "0"
        out = []
        for i, (m, c) in enumerate(self.sorted_terms()):
            mono = format_monomial(m, self.ring.names)
            neg = c < 0
            a = -c if neg else c
            body = (mono if a == 1 else f"{a}*{mono}") if mono else str(a)
            if i == 0:
                out.append(f"-{body}" if neg else body)
            else:
                out.append(f" - {body}" if neg else f" + {body}")
        return "".join(out)

    def __repr__(self):
        return f"WeylElement({self})"


class WeylOrder:
    """Weight order (u on coefficient variables, v on operators) refined by degrevlex.

    Weights are integers here; admissibility asks u_i + v_i >= 0 per pair.
    Negative entries are rejected because the packed engine needs
    non-negative rows.
    """

    def __init__(self, ring: WeylRing, weight: Sequence | None = None, tie_break: str = "degrevlex"):
        self.ring = ring
        weight = list(weight) if weight is not None else []
        rows = []
        if weight:
            if len(weight) != ring.nvars:
                raise ValueError("weight length does not match the ring")
            for c, d in ring.pairs:
                if to_rational(weight[c]) + to_rational(weight[d]) < 0:
                    raise ValueError("weight is not admissible (u + v < 0)")
            rows.append(weight)
        self.weight = tuple(weight)
        self.monomial_order = MonomialOrder(ring.nvars, rows, tie_break)

    @classmethod
    def T(cls, ring: WeylRing) -> "WeylOrder":
        """T-filtration: Dx, Dt, s weigh 1, coefficient variables 0."""
        w = [0] * ring.nvars
        for _, d in ring.pairs:
            w[d] = 1
        if ring.has_s:
            w[ring.s_index] = 1
        return cls(ring, w)

    @classmethod
    def eliminating(cls, ring: WeylRing, drop: Iterable[str]) -> "WeylOrder":
        w = [0] * ring.nvars
        for name in drop:
            w[ring.index(name)] = 1
        return cls(ring, w)

    def describe(self) -> str:
        if self.weight:
            return "weight " + ",".join(f"{n}:{w}" for n, w in zip(self.ring.names, self.weight)) + " then degrevlex"
        return "degrevlex"

    def __eq__(self, other):
        return isinstance(other, WeylOrder) and self.ring == other.ring and self.monomial_order == other.monomial_order

    def __hash__(self):
        return hash((self.ring, self.monomial_order))


def sugar_weights(ring: WeylRing) -> list[int]:
    """Pair-selection degree: x and t weigh 1, derivations 2, s nothing.

    Only the order in which pairs are processed depends on this; the basis
    does not.  Counting derivations double and ignoring s keeps intermediate
    coefficients small on the divisors we care about.
    """
    w = [1] * ring.d_offset + [2] * (ring.nvars - ring.d_offset)
    if ring.has_s:
        w[ring.s_index] = 0
    return w


class WeylIdeal:
    """A left ideal of a Weyl algebra."""

    def __init__(self, ring: WeylRing, generators: Iterable[WeylElement] = ()):
        self.ring = ring
        gens = []
        for g in generators:
            if g.ring != ring:
                raise ValueError("generator ring mismatch")
            if g:
                gens.append(g)
        self.generators = gens
        self._gb: dict = {}

    def _engine(self, order: WeylOrder):
        coder = TermCoder(self.ring.nvars, order.monomial_order.rows)
        return coder, Buchberger(coder, weyl_mul(coder, self.ring.pairs), commutative=False,
                                 sugar_weights=sugar_weights(self.ring))

    def groebner(self, order: WeylOrder | None = None, degree_bound: int | None = None,
                 pair_limit: int | None = None) -> list[WeylElement]:
        order = order or WeylOrder(self.ring)
        if order in self._gb:
            return list(self._gb[order][1])
        coder, eng = self._engine(order)
        try:
            basis, _ = eng.run([_encode(g, coder) for g in self.generators],
                               max_sugar=degree_bound, max_pairs=pair_limit)
        except BudgetExceeded as exc:
            exc.partial = [_decode(p.terms, self.ring, coder) for p in exc.partial or []]
            raise
        elems = [_decode(p.terms, self.ring, coder) for p in basis]
        self._gb[order] = (basis, elems, coder, eng)
        return list(elems)

    def reduce(self, p: WeylElement, order: WeylOrder | None = None) -> WeylElement:
        order = order or WeylOrder(self.ring)
        self.groebner(order)
        basis, _, coder, eng = self._gb[order]
        return _decode(eng.reduce(_encode(p, coder), basis), self.ring, coder)

    def contains(self, p: WeylElement, order: WeylOrder | None = None) -> bool:
        return not p or not self.reduce(p, order)

    def is_unit(self) -> bool:
        return any(not any(m) for g in self.groebner() for m in g.terms)


def _encode(p: WeylElement, coder: TermCoder) -> dict:
    return {coder.encode(m): c for m, c in p.terms.items()}


def _decode(terms: dict, ring: WeylRing, coder: TermCoder) -> WeylElement:
    return WeylElement(ring, {coder.exps(k): c for k, c in terms.items()})


# operations ------------------------------------------------------------------

def weyl_product(p: WeylElement, q: WeylElement) -> WeylElement:
    return p * q


def weyl_groebner(ideal: WeylIdeal, order: WeylOrder | None = None, degree_bound=None,
                  pair_limit=None) -> list[WeylElement]:
    return ideal.groebner(order, degree_bound, pair_limit)


_KEEP = {"x": ("x",), "Q[x]": ("x",), "xs": ("x", "s"), "Q[x][s]": ("x", "s"), "s": ("s",), "Q[s]": ("s",)}


def weyl_eliminate(ideal: WeylIdeal, keep: str, degree_bound=None, pair_limit=None) -> PolyIdeal:
    """Intersect a left ideal with Q[x], Q[x][s] or Q[s]."""
    ring = ideal.ring
    if keep not in _KEEP:
        raise ValueError(f"keep must be one of {sorted(_KEEP)}")
    parts = _KEEP[keep]
    kept = []
    if "x" in parts:
        kept += list(ring.x_vars) + (["t"] if ring.has_t else [])
    if "s" in parts:
        if not ring.has_s:
            raise ValueError("ring has no s variable")
        kept.append("s")
    drop = [v for v in ring.names if v not in kept]
    order = WeylOrder.eliminating(ring, drop)
    basis = ideal.groebner(order, degree_bound, pair_limit)
    target = Ring(kept)
    out = [g.to_poly(target) for g in basis if not g.uses(drop)]
    return PolyIdeal(target, out)


def symbol_ring(ring: WeylRing) -> Ring:
    """Q[x, xi, s]: the associated graded ring for the T-filtration."""
    names = list(ring.names[:ring.d_offset])
    names += ["xi_" + v for v in ring.x_vars] + (["xi_t"] if ring.has_t else [])
    if ring.has_s:
        names.append("s")
    return Ring(names)


def symbol_T(p: WeylElement) -> tuple[Poly, int]:
    """Top T-homogeneous part of ``p`` as a commutative polynomial, with its T-degree."""
    if not p:
        raise ValueError("the zero element has no symbol")
    d = p.t_degree()
    r = p.ring
    ops = [dd for _, dd in r.pairs] + ([r.s_index] if r.has_s else [])
    top = {m: c for m, c in p.terms.items() if sum(m[i] for i in ops) == d}
    return Poly(symbol_ring(r), top), d


def involutive_basis_T(ideal: WeylIdeal, degree_bound=None, pair_limit=None) -> list[tuple[WeylElement, int]]:
    """Basis whose T-symbols generate gr^T of the ideal, paired with T-degrees."""
    basis = ideal.groebner(WeylOrder.T(ideal.ring), degree_bound, pair_limit)
    return [(g, g.t_degree()) for g in basis]


def truncation_generators(basis: Sequence[tuple[WeylElement, int]], k: int) -> list[WeylElement]:
    """All s^l D^alpha P_j with l + |alpha| + d_j <= k (a Q[x]-module generating set)."""
    if k < 0:
        raise ValueError("level must be non-negative")
    out = []
    for p, d in basis:
        ring = p.ring
        budget = k - d
        if budget < 0:
            continue
        ops = [dd for _, dd in ring.pairs if dd != ring.dt_index]
        if ring.has_s:
            ops.append(ring.s_index)
        for exps in _exponents(len(ops), budget):
            e = [0] * ring.nvars
            for i, v in zip(ops, exps):
                e[i] = v
            out.append(ring.monomial(e) * p)
    return out


def _exponents(n: int, max_total: int):
    """Exponent vectors of length n with sum <= max_total, graded then lex."""
    def rec(i, left):
        if i == n:
            yield ()
            return
        for v in range(left, -1, -1):
            for rest in rec(i + 1, left - v):
                yield (v,) + rest
    for total in range(max_total + 1):
        for e in rec(0, total):
            if sum(e) == total:
                yield e

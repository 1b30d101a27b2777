"""Exact commutative polynomials over the rationals.

Polynomials are immutable maps from exponent tuples to ``gmpy2.mpq``
coefficients.  The ring is just the ordered tuple of variable names; two
polynomials can only be combined when their rings coincide.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping

from gmpy2 import mpq

Rational = mpq
Monomial = tuple


def to_rational(value) -> mpq:
    """Coerce ints, Fractions, strings like ``"-2/3"`` and mpq to mpq."""
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    if isinstance(value, str):
        return mpq(value.strip())
    return mpq(value)


class Ring:
    """Commutative polynomial ring Q[names]."""

    __slots__ = ("names", "_index")

    def __init__(self, names: Iterable[str]):
        self.names = tuple(names)
        if len(set(self.names)) != len(self.names):
            raise ValueError(f"duplicate variable names in {self.names}")
        self._index = {v: i for i, v in enumerate(self.names)}

    @property
    def nvars(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise ValueError(f"unknown variable {name!r}") from None

    def gens(self) -> list["Poly"]:
        return [self.var(v) for v in self.names]

    def var(self, name: str) -> "Poly":
        e = [0] * self.nvars
        e[self.index(name)] = 1
        return Poly(self, {tuple(e): mpq(1)})

    def const(self, c) -> "Poly":
        c = to_rational(c)
        return Poly(self, {(0,) * self.nvars: c} if c else {})

    def zero(self) -> "Poly":
        return Poly(self, {})

    def one(self) -> "Poly":
        return self.const(1)

    def monomial(self, exps, coeff=1) -> "Poly":
        return Poly(self, {tuple(exps): to_rational(coeff)})

    def parse(self, text: str) -> "Poly":
        from .parsing import parse_polynomial

        return parse_polynomial(text, self)

    def __eq__(self, other):
        return isinstance(other, Ring) and self.names == other.names

    def __hash__(self):
        return hash(self.names)

    def __repr__(self):
        return f"Ring({', '.join(self.names)})"


def _degrevlex_key(e):
    return (sum(e), tuple(-x for x in reversed(e)))


class Poly:
    """A polynomial with exact rational coefficients."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: Ring, terms: Mapping[Monomial, mpq] | None = None):
        self.ring = ring
        self.terms = {m: c for m, c in (terms or {}).items() if c}

    # construction helpers ------------------------------------------------
    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.ring != self.ring:
                raise ValueError(f"ring mismatch: {self.ring} vs {other.ring}")
            return other
        return self.ring.const(other)

    # arithmetic ----------------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m, 0) + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return Poly(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.ring, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                out[m] = out.get(m, 0) + c1 * c2
        return Poly(self.ring, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative exponent")
        result = self.ring.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def scale(self, c) -> "Poly":
        c = to_rational(c)
        return Poly(self.ring, {m: c * v for m, v in self.terms.items()})

    def shift(self, exps) -> "Poly":
        """Multiply by the monomial with exponent vector ``exps``."""
        return Poly(self.ring, {tuple(a + b for a, b in zip(m, exps)): c for m, c in self.terms.items()})

    def divmod(self, g: "Poly") -> tuple["Poly", "Poly"]:
        """Long division by one polynomial under degrevlex: self = q*g + r."""
        g = self._coerce(g)
        if not g:
            raise ZeroDivisionError("polynomial division by zero")
        gm, gc = g.leading()
        rest = dict(self.terms)
        q: dict = {}
        r: dict = {}
        while rest:
            m = max(rest, key=_degrevlex_key)
            c = rest[m]
            if all(a >= b for a, b in zip(m, gm)):
                qm = tuple(a - b for a, b in zip(m, gm))
                qc = c / gc
                q[qm] = qc
                for mm, cc in g.terms.items():
                    t = tuple(a + b for a, b in zip(mm, qm))
                    v = rest.get(t, 0) - qc * cc
                    if v:
                        rest[t] = v
                    else:
                        rest.pop(t, None)
            else:
                r[m] = c
                del rest[m]
        return Poly(self.ring, q), Poly(self.ring, r)

    def exact_div(self, g: "Poly") -> "Poly | None":
        """The quotient self/g when g divides self, else None."""
        q, r = self.divmod(g)
        return None if r else q

    # calculus --------------------------------------------------------------
    def diff(self, var) -> "Poly":
        i = var if isinstance(var, int) else self.ring.index(var)
        out = {}
        for m, c in self.terms.items():
            if m[i]:
                mm = list(m)
                mm[i] -= 1
                out[tuple(mm)] = c * m[i]
        return Poly(self.ring, out)

    def subs(self, values: Mapping[str, "Poly"]) -> "Poly":
        """Substitute polynomials (in the same ring) for variables."""
        idx = {self.ring.index(k): self._coerce(v) for k, v in values.items()}
        result = self.ring.zero()
        for m, c in self.terms.items():
            rest = list(m)
            term = self.ring.const(c)
            for i, p in idx.items():
                if m[i]:
                    term = term * p ** m[i]
                    rest[i] = 0
            result = result + term.shift(rest)
        return result

    def evaluate(self, point: Mapping[str, object]):
        total = mpq(0)
        vals = [to_rational(point[v]) for v in self.ring.names]
        for m, c in self.terms.items():
            t = c
            for v, e in zip(vals, m):
                if e:
                    t *= v**e
            total += t
        return total

    # inspection --------------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self) -> bool:
        return all(not any(m) for m in self.terms)

    def constant_coeff(self) -> mpq:
        return self.terms.get((0,) * self.ring.nvars, mpq(0))

    def total_degree(self) -> int:
        return max((sum(m) for m in self.terms), default=-1)

    def weighted_degree(self, weights) -> object:
        return max((sum(w * e for w, e in zip(weights, m)) for m in self.terms), default=None)

    def is_homogeneous(self, weights=None) -> bool:
        weights = weights or (1,) * self.ring.nvars
        degs = {sum(w * e for w, e in zip(weights, m)) for m in self.terms}
        return len(degs) <= 1

    def variables(self) -> set[str]:
        used = set()
        for m in self.terms:
            used.update(self.ring.names[i] for i, e in enumerate(m) if e)
        return used

    def leading(self) -> tuple[Monomial, mpq]:
        """Leading term under degrevlex (the canonical printing order)."""
        m = max(self.terms, key=_degrevlex_key)
        return m, self.terms[m]

    def monic(self) -> "Poly":
        if not self.terms:
            return self
        return self.scale(1 / self.leading()[1])

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.ring == other.ring and self.terms == other.terms
        if isinstance(other, (int, Fraction)) or type(other) is type(mpq(0)):
            return self == self.ring.const(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.ring, frozenset(self.terms.items())))

    # printing --------------------------------------------------------------
    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda mc: _degrevlex_key(mc[0]), reverse=True)

    def __str__(self):
        return format_terms(self.sorted_terms(), self.ring.names)

    def __repr__(self):
        return f"Poly({self})"


def format_monomial(m, names) -> str:
    parts = []
    for v, e in zip(names, m):
        if e == 1:
            parts.append(v)
        elif e:
            parts.append(f"{v}^{e}")
    return "*".join(parts)


def format_terms(items, names) -> str:
    if not items:
        return "0"
    out = []
    for i, (m, c) in enumerate(items):
        mono = format_monomial(m, names)
        neg = c < 0
        a = -c if neg else c
        if mono:
            body = mono if a == 1 else f"{a}*{mono}"
        else:
            body = str(a)
        if i == 0:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f" - {body}" if neg else f" + {body}")
    return "".join(out)

"""Free divisors with a Saito basis, and their Bernstein-Sato polynomials."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from math import lcm
from typing import Sequence

from gmpy2 import mpq

from .groebner import PolyIdeal, ideal_dimension
from .poly import Poly, Ring, to_rational
from .weyl import WeylElement, WeylIdeal, WeylRing, weyl_eliminate

VectorField = tuple  # tuple of Poly coefficients, one per variable


class DivisorError(ValueError):
    """Invalid divisor data (non-logarithmic field, missing Euler field, ...)."""


def apply_field(field_: Sequence[Poly], f: Poly) -> Poly:
    out = f.ring.zero()
    for i, a in enumerate(field_):
        if a:
            out = out + a * f.diff(i)
    return out


def format_field(field_: Sequence[Poly], names: Sequence[str]) -> str:
    parts = []
    for a, v in zip(field_, names):
        if not a:
            continue
        if a.is_constant():
            c = a.constant_coeff()
            if c == 1:
                parts.append(f"D{v}")
            elif c == -1:
                parts.append(f"-D{v}")
            else:
                parts.append(f"{c}*D{v}")
        elif len(a.terms) == 1:
            parts.append(f"{a}*D{v}")
        else:
            parts.append(f"({a})*D{v}")
    if not parts:
        return "0"
    text = parts[0]
    for p in parts[1:]:
        text += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
    return text


@dataclass(frozen=True)
class DivisorSpec:
    """A reduced h with its logarithmic basis ``fields`` and Euler field index."""

    ring: Ring
    h: Poly
    fields: tuple
    chi_index: int
    weights: tuple | None = None
    extended_scope: bool = False
    name: str = ""
    field_names: tuple = ()
    notes: tuple = field(default_factory=tuple)

    @property
    def n(self) -> int:
        return self.ring.nvars

    @property
    def chi(self) -> tuple:
        return self.fields[self.chi_index]

    @property
    def deltas(self) -> list:
        return [f for i, f in enumerate(self.fields) if i != self.chi_index]

    def weyl_field(self, W: WeylRing, field_: Sequence[Poly]) -> WeylElement:
        out = W.zero()
        for v, a in zip(self.ring.names, field_):
            if a:
                out = out + W.from_poly(a) * W.D(v)
        return out

    def is_normalized(self) -> bool:
        return (apply_field(self.chi, self.h) == self.h
                and all(apply_field(d, self.h).is_zero() for d in self.deltas))


def _det(matrix: list[list[Poly]], ring: Ring) -> Poly:
    """Fraction-free Bareiss determinant."""
    m = [list(r) for r in matrix]
    n = len(m)
    if n == 0:
        return ring.one()
    sign = 1
    prev = ring.one()
    for k in range(n - 1):
        if not m[k][k]:
            swap = next((i for i in range(k + 1, n) if m[i][k]), None)
            if swap is None:
                return ring.zero()
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = m[k][k] * m[i][j] - m[i][k] * m[k][j]
                q = num.exact_div(prev)
                if q is None:
                    raise ArithmeticError("Bareiss division was not exact")
                m[i][j] = q
        prev = m[k][k]
    d = m[n - 1][n - 1]
    return d if sign > 0 else -d


def check_saito_criterion(spec: DivisorSpec) -> tuple[bool, mpq | None, Poly]:
    """Whether det(coefficients) = c*h for a nonzero rational c; returns (ok, c, det)."""
    if len(spec.fields) != spec.n:
        raise DivisorError(f"basis arity: {len(spec.fields)} fields for {spec.n} variables")
    det = _det([list(f) for f in spec.fields], spec.ring)
    if not det:
        return False, None, det
    q, r = det.divmod(spec.h)
    if r or not q.is_constant():
        return False, None, det
    return True, q.constant_coeff(), det


def normalize_basis(spec: DivisorSpec) -> DivisorSpec:
    """Rescale the Euler field to chi(h) = h and make the others annihilate h."""
    h = spec.h
    chi_idx = spec.chi_index
    ratio = None
    if chi_idx is not None and 0 <= chi_idx < len(spec.fields):
        ratio = _constant_ratio(apply_field(spec.fields[chi_idx], h), h)
    if not ratio:
        chi_idx = None
        for i, f in enumerate(spec.fields):
            ratio = _constant_ratio(apply_field(f, h), h)
            if ratio:
                chi_idx = i
                break
    if chi_idx is None:
        raise DivisorError("no Euler field: no basis element eta has eta(h) = c*h with c a nonzero constant")
    chi = tuple(a.scale(1 / ratio) for a in spec.fields[chi_idx])
    new = []
    for i, f in enumerate(spec.fields):
        if i == chi_idx:
            new.append(chi)
            continue
        img = apply_field(f, h)
        a = img.exact_div(h)
        if a is None:
            raise DivisorError(f"field {i + 1} is not logarithmic: its image of h is not a multiple of h")
        new.append(tuple(c - a * x for c, x in zip(f, chi)) if a else tuple(f))
    return replace(spec, fields=tuple(new), chi_index=chi_idx)


def _constant_ratio(img: Poly, h: Poly):
    q = img.exact_div(h)
    if q is None or not q or not q.is_constant():
        return None
    return q.constant_coeff()


def check_strong_koszul(spec: DivisorSpec) -> bool:
    """Codimension test for h, sigma(delta_i), sigma(chi) - s in Q[x, xi, s]."""
    if spec.weights is None and not spec.h.is_homogeneous():
        raise DivisorError("strong Koszul test needs weights making h weighted-homogeneous")
    if spec.weights is not None and not spec.h.is_homogeneous(spec.weights):
        raise DivisorError("h is not weighted-homogeneous for the supplied weights")
    n = spec.n
    names = list(spec.ring.names) + ["xi_" + v for v in spec.ring.names] + ["s"]
    S = Ring(names)
    xs = S.gens()

    def lift(p: Poly) -> Poly:
        return Poly(S, {m + (0,) * (n + 1): c for m, c in p.terms.items()})

    def symbol(f) -> Poly:
        out = S.zero()
        for i, a in enumerate(f):
            if a:
                out = out + lift(a) * xs[n + i]
        return out

    gens = [lift(spec.h)] + [symbol(d) for d in spec.deltas] + [symbol(spec.chi) - xs[-1]]
    return ideal_dimension(PolyIdeal(S, gens)) == (2 * n + 1) - (n + 1)


# Bernstein-Sato data -----------------------------------------------------------

S_RING = Ring(["s"])


@dataclass(frozen=True)
class BFunction:
    """b(s) = prod (s - root)^mult with exact rational roots."""

    roots: tuple  # ((mpq root, int multiplicity), ...) sorted by root

    @classmethod
    def from_pairs(cls, pairs) -> "BFunction":
        acc: dict = {}
        for root, mult in pairs:
            r = to_rational(root)
            m = int(mult)
            if m <= 0:
                raise ValueError("multiplicities must be positive")
            acc[r] = acc.get(r, 0) + m
        return cls(tuple(sorted(acc.items())))

    def degree(self) -> int:
        return sum(m for _, m in self.roots)

    def multiplicity(self, root) -> int:
        return dict(self.roots).get(to_rational(root), 0)

    def poly(self) -> Poly:
        s = S_RING.var("s")
        out = S_RING.one()
        for r, m in self.roots:
            out = out * (s - r) ** m
        return out

    def b_prime(self) -> list[tuple[mpq, int]]:
        """alpha in (0,1) with b(alpha - 1) = 0, with multiplicities."""
        return [(r + 1, m) for r, m in self.roots if -1 < r < 0]

    def __str__(self):
        parts = []
        for r, m in sorted(self.roots, key=lambda rm: -rm[0]):
            base = f"(s + {-r})" if r < 0 else (f"(s - {r})" if r > 0 else "s")
            parts.append(base + (f"^{m}" if m > 1 else ""))
        return "*".join(parts) if parts else "1"

    def format_roots(self) -> str:
        return ", ".join(f"{r}:{m}" for r, m in self.roots)


def bfunction_validate(b: BFunction) -> dict:
    in_range = all(-2 < r < 0 for r, _ in b.roots)
    mults = dict(b.roots)
    symmetric = all(mults.get(-2 - r, 0) == m for r, m in b.roots)
    return {"roots_in_range": in_range, "symmetric": symmetric}


def beta_bar(b: BFunction) -> tuple[Poly, int]:
    s = S_RING.var("s")
    out = S_RING.one()
    r = 0
    for alpha, m in b.b_prime():
        out = out * (s - alpha) ** m
        r += m
    return out, r


def rational_roots(p: Poly) -> tuple[list[tuple[mpq, int]], Poly]:
    """Rational roots (with multiplicity) of a univariate polynomial and the cofactor."""
    if p.ring.nvars != 1:
        raise ValueError("univariate polynomial expected")
    den = lcm(*[int(c.denominator) for c in p.terms.values()])
    coeffs = {m[0]: int(c * den) for m, c in p.terms.items()}
    low = min(coeffs)
    roots: list = []
    if low:
        roots.append((mpq(0), low))
    a0 = abs(coeffs[low])
    an = abs(coeffs[max(coeffs)])
    rest = Poly(p.ring, {(e - low,): mpq(c) for e, c in coeffs.items()})
    s = p.ring.gens()[0]
    for q in _divisors(an):
        for num in _divisors(a0):
            for cand in (mpq(num, q), mpq(-num, q)):
                mult = 0
                while rest.total_degree() > 0:
                    quo = rest.exact_div(s - cand)
                    if quo is None:
                        break
                    rest = quo
                    mult += 1
                if mult:
                    roots.append((cand, mult))
    return sorted(roots), rest


def _divisors(n: int) -> list[int]:
    n = abs(n)
    small = [d for d in range(1, int(n ** 0.5) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


def bfunction_ideal(spec: DivisorSpec) -> tuple[WeylRing, WeylIdeal]:
    """The left ideal W[s](h, delta_1..delta_{n-1}, chi - s)."""
    W = WeylRing(spec.ring.names, has_s=True)
    gens = [W.from_poly(spec.h)] + [spec.weyl_field(W, d) for d in spec.deltas]
    gens.append(spec.weyl_field(W, spec.chi) - W.var("s"))
    return W, WeylIdeal(W, gens)


def compute_bfunction(spec: DivisorSpec, degree_bound: int | None = None,
                      pair_limit: int | None = None, method: str = "minpoly",
                      max_degree: int = 64) -> BFunction:
    """Monic generator of W[s](h, delta_i, chi - s) intersected with Q[s], factored over Q.

    ``method="eliminate"`` runs an elimination order on the ideal with s.
    ``method="minpoly"`` uses that b(s) lies in that ideal iff b(chi) lies in
    L = W(h, delta_i) (L is stable under right multiplication by chi), so b
    is the minimal polynomial of chi acting on W/L by right multiplication:
    one basis of L without s, then normal forms of chi^k.
    """
    if method == "eliminate":
        _, ideal = bfunction_ideal(spec)
        elim = weyl_eliminate(ideal, "s", degree_bound, pair_limit)
        if elim.is_zero():
            raise DivisorError("elimination produced no polynomial in s")
        b = Poly(S_RING, elim.groebner()[0].terms).monic()
    elif method == "minpoly":
        b = _bfunction_minpoly(spec, degree_bound, pair_limit, max_degree)
    else:
        raise ValueError(f"unknown method {method!r}")
    roots, rest = rational_roots(b)
    if rest.total_degree() > 0:
        raise DivisorError(f"b-function has a non-rational factor {rest}")
    return BFunction.from_pairs(roots)


def _bfunction_minpoly(spec: DivisorSpec, degree_bound, pair_limit, max_degree: int) -> Poly:
    W = WeylRing(spec.ring.names)
    L = WeylIdeal(W, [W.from_poly(spec.h)] + [spec.weyl_field(W, d) for d in spec.deltas])
    L.groebner(None, degree_bound, pair_limit)
    chi = spec.weyl_field(W, spec.chi)
    # incremental row echelon form over Q of the normal forms of chi^k
    pivots: dict = {}  # pivot monomial -> (row dict, combination dict over powers)
    current = L.reduce(W.one())
    for k in range(max_degree + 1):
        row = dict(current.terms)
        combo = {k: mpq(1)}
        while row:
            lead = max(row)
            if lead not in pivots:
                break
            prow, pcombo = pivots[lead]
            f = row[lead] / prow[lead]
            for m, c in prow.items():
                v = row.get(m, 0) - f * c
                if v:
                    row[m] = v
                else:
                    row.pop(m, None)
            for j, c in pcombo.items():
                v = combo.get(j, 0) - f * c
                if v:
                    combo[j] = v
                else:
                    combo.pop(j, None)
        if not row:
            lead = combo[k]
            return Poly(S_RING, {(j,): c / lead for j, c in combo.items()})
        pivots[max(row)] = (row, combo)
        current = L.reduce(current * chi)
    raise DivisorError(f"no polynomial relation for chi up to degree {max_degree}")

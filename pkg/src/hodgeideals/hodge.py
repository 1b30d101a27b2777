"""Hodge ideals of strongly Koszul free divisors.

Pipeline at level k:

1. a Groebner basis of J = W[s](h, beta_bar(s), delta_i, chi - s + 1) for the
   T-weight order (Dx and s weigh 1, x weighs 0) gives generators
   s^l D^alpha P_j of J cut down to T-degree <= k;
2. each is pushed through psi_bar into O(*D)[Dt], where component i is a
   rational section with pole order <= k + 1 - i;
3. the component-0 part of the generated submodule is F_k^H, stored as the
   numerator ideal I_k over the fixed denominator h^(k+1).
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from math import perm
from typing import Sequence

from gmpy2 import mpq

from .divisor import BFunction, DivisorSpec, beta_bar
from .groebner import (PolyIdeal, PolySubmodule, ideal_equal, minimal_generators,
                       module_component_intersect)
from .poly import Poly
from .weyl import (WeylElement, WeylIdeal, WeylOrder, WeylRing, involutive_basis_T,
                   truncation_generators)


class InvariantError(AssertionError):
    """A mathematical invariant failed; ``witness`` names the offending element."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


# rational sections -----------------------------------------------------------

@dataclass(frozen=True)
class RationalSection:
    """numerator / h^pole, with h-factors cancelled eagerly."""

    numerator: Poly
    pole: int

    @classmethod
    def make(cls, numerator: Poly, pole: int, h: Poly) -> "RationalSection":
        if not numerator:
            return cls(numerator, 0)
        while pole > 0:
            q = numerator.exact_div(h)
            if q is None:
                break
            numerator, pole = q, pole - 1
        return cls(numerator, pole)

    def is_zero(self) -> bool:
        return self.numerator.is_zero()

    def at_pole(self, m: int, h: Poly) -> Poly:
        """Numerator over h^m (requires m >= pole)."""
        if m < self.pole:
            raise InvariantError(f"pole order {self.pole} exceeds bound {m}", self)
        return self.numerator * h ** (m - self.pole)

    def __str__(self):
        return f"({self.numerator})/h^{self.pole}"


@dataclass(frozen=True)
class PoleVector:
    """sum_i xi_i Dt^i with xi_i a section of pole order <= level - i + 1."""

    level: int
    components: tuple

    def check(self) -> None:
        for i, c in enumerate(self.components):
            if not c.is_zero() and c.pole > self.level - i + 1:
                raise InvariantError(f"component {i} has pole order {c.pole} > {self.level - i + 1}", self)

    def numerators(self, h: Poly) -> tuple:
        return tuple(c.at_pole(self.level - i + 1, h) for i, c in enumerate(self.components))

    def shift(self, i: int) -> "PoleVector":
        zero = RationalSection(self.components[0].numerator.ring.zero(), 0)
        comps = (zero,) * i + self.components[: len(self.components) - i]
        if any(not c.is_zero() for c in self.components[len(self.components) - i:]):
            raise InvariantError("shift pushes a nonzero component past the level", self)
        return PoleVector(self.level, comps)


# basic maps ------------------------------------------------------------------------

def build_J(spec: DivisorSpec, b: BFunction) -> WeylIdeal:
    W = WeylRing(spec.ring.names, has_s=True)
    bb, _ = beta_bar(b)
    s = W.var("s")
    beta = W.zero()
    for m, c in bb.terms.items():
        beta = beta + s ** m[0] * c
    gens = [W.from_poly(spec.h), beta]
    gens += [spec.weyl_field(W, d) for d in spec.deltas]
    gens.append(spec.weyl_field(W, spec.chi) - s + 1)
    J = WeylIdeal(W, gens)
    J.generators = gens  # keep beta_bar = 1 literally for traceability
    return J


def graph_ring(spec: DivisorSpec) -> WeylRing:
    return WeylRing(spec.ring.names, has_t=True)


def substitute_s(p: WeylElement, Wt: WeylRing | None = None) -> WeylElement:
    """Replace the central s by -Dt*t."""
    W = p.ring
    Wt = Wt or W.extend(has_t=True, has_s=False)
    dtt = Wt.var("Dt") * Wt.var("t")
    powers = [Wt.one()]
    out = Wt.zero()
    si = W.s_index
    for m, c in p.terms.items():
        l = m[si] if si is not None else 0
        while len(powers) <= l:
            powers.append(powers[-1] * dtt)
        rest = list(m)
        if si is not None:
            rest[si] = 0
        base = Wt.convert(WeylElement(W, {tuple(rest): c}))
        term = base * powers[l]
        out = out + (term if l % 2 == 0 else -term)
    return out


def _phi_generic(q: WeylElement, h: Poly, sign: int) -> WeylElement:
    Wt = q.ring
    hw = Wt.from_poly(h)
    t, dt = Wt.var("t"), Wt.var("Dt")
    t_img = t + hw if sign > 0 else t - hw
    d_img = []
    for i, v in enumerate(Wt.x_vars):
        hi = Wt.from_poly(h.diff(i))
        d_img.append(Wt.D(v) - hi * dt if sign > 0 else Wt.D(v) + hi * dt)
    cache: dict = {}

    def power(key, base, e):
        if (key, e) not in cache:
            cache[(key, e)] = Wt.one() if e == 0 else power(key, base, e - 1) * base
        return cache[(key, e)]

    n = Wt.n
    out = Wt.zero()
    for m, c in q.terms.items():
        coeff = [0] * Wt.nvars
        for i in range(n):
            coeff[i] = m[i]
        term = Wt.monomial(coeff, c) * power("t", t_img, m[Wt.t_index])
        for i in range(n):
            e = m[Wt.d_index(i)]
            if e:
                term = term * power(i, d_img[i], e)
        e = m[Wt.dt_index]
        if e:
            term = term * power("dt", dt, e)
        out = out + term
    return out


def phi(q: WeylElement, h: Poly) -> WeylElement:
    """t -> t + h, Dx_i -> Dx_i - h_i Dt, Dt -> Dt."""
    return _phi_generic(q, h, 1)


def phi_inv(q: WeylElement, h: Poly) -> WeylElement:
    return _phi_generic(q, h, -1)


def split_t(q: WeylElement) -> tuple[WeylElement, list[tuple[WeylElement, int]]]:
    """Write q = A*t + sum_i Q_i Dt^i with every Q_i free of t and Dt."""
    Wt = q.ring
    Wx = WeylRing(Wt.x_vars)
    ti, dti = Wt.t_index, Wt.dt_index
    A = Wt.zero()
    rest: dict = {}
    a_cache: dict = {}

    def a_part(c, e):
        # t^c Dt^e = A_{c,e} t + R_{c,e}
        if (c, e) not in a_cache:
            if c == 0:
                val = Wt.zero()
            else:
                mono = [0] * Wt.nvars
                mono[ti], mono[dti] = c - 1, e
                val = Wt.monomial(mono)
                if e:
                    val = val - a_part(c - 1, e - 1).scale(e)
            a_cache[(c, e)] = val
        return a_cache[(c, e)]

    for m, coef in q.terms.items():
        c, e = m[ti], m[dti]
        xd = [m[i] for i in range(Wt.n)] + [m[Wt.d_index(i)] for i in range(Wt.n)]
        if c:
            mono = list(m)
            mono[ti] = mono[dti] = 0
            A = A + Wt.monomial(mono, coef) * a_part(c, e)
        if c <= e:
            r = perm(e, c) * (-1) ** c
            key = e - c
            rest.setdefault(key, {})
            rest[key][tuple(xd)] = rest[key].get(tuple(xd), 0) + coef * r
    parts = []
    for i in sorted(rest):
        el = WeylElement(Wx, rest[i])
        if el:
            parts.append((el, i))
    return A, parts


class _HinvAction:
    """Memoized action of Q[x]<Dx> on h^-1."""

    def __init__(self, h: Poly):
        self.h = h
        self.grad = [h.diff(i) for i in range(h.ring.nvars)]
        self.memo: dict = {(0,) * h.ring.nvars: (h.ring.one(), 1)}

    def deriv(self, alpha: tuple) -> tuple[Poly, int]:
        """D^alpha(h^-1) as (numerator, pole) with pole = |alpha| + 1 (no cancellation)."""
        if alpha in self.memo:
            return self.memo[alpha]
        i = next(j for j, a in enumerate(alpha) if a)
        prev = list(alpha)
        prev[i] -= 1
        num, m = self.deriv(tuple(prev))
        val = (self.h * num.diff(i) - num * self.grad[i] * m, m + 1)
        self.memo[alpha] = val
        return val

    def apply(self, q: WeylElement) -> RationalSection:
        W = q.ring
        n = W.n
        R = self.h.ring
        top = max((sum(m[W.d_index(i)] for i in range(n)) for m in q.terms), default=0) + 1
        total = R.zero()
        for m, c in q.terms.items():
            alpha = tuple(m[W.d_index(i)] for i in range(n))
            num, pole = self.deriv(alpha)
            coeff = Poly(R, {tuple(m[:n]): c})
            total = total + coeff * num * self.h ** (top - pole)
        return RationalSection.make(total, top, self.h)


def apply_to_hinv(q: WeylElement, h: Poly) -> RationalSection:
    """The rational function q(h^-1) for q in Q[x]<Dx>."""
    return _HinvAction(h).apply(q)


def psi_bar(p: WeylElement, spec: DivisorSpec) -> list[tuple[RationalSection, int]]:
    """apply_to_hinv o split_t o phi o substitute_s, componentwise in Dt-powers."""
    act = _HinvAction(spec.h)
    return _psi_bar(p, spec, act)


def _psi_bar(p: WeylElement, spec: DivisorSpec, act: _HinvAction):
    Wt = graph_ring(spec)
    q = phi(substitute_s(p, Wt), spec.h)
    _, parts = split_t(q)
    out = []
    for el, i in parts:
        sec = act.apply(el)
        if not sec.is_zero():
            out.append((sec, i))
    return out


class GraphAction:
    """Direct action of W[s] on h^-1 in the graph-embedding model O(*D)[Dt].

    t(g Dt^j) = h g Dt^j - j g Dt^(j-1),  Dt(g Dt^j) = g Dt^(j+1),
    D_i(g Dt^j) = (D_i g) Dt^j - h_i g Dt^(j+1),  s = -Dt t.
    Elements are dicts j -> (numerator, pole).  This is the independent
    route used to cross-check psi_bar, and the fast path of the pipeline;
    results are memoized per operator monomial (the action is Q[x]-linear).
    """

    def __init__(self, spec: DivisorSpec):
        self.h = spec.h
        self.ring = spec.ring
        self.n = spec.n
        self.grad = [self.h.diff(i) for i in range(self.n)]
        self.memo: dict = {}

    def _add(self, acc: dict, j: int, num: Poly, pole: int):
        if not num:
            return
        if j in acc:
            n0, p0 = acc[j]
            m = max(p0, pole)
            acc[j] = (n0 * self.h ** (m - p0) + num * self.h ** (m - pole), m)
        else:
            acc[j] = (num, pole)

    def _s(self, elem: dict) -> dict:
        out: dict = {}
        for j, (g, m) in elem.items():
            self._add(out, j + 1, -(g * self.h), m)
            if j:
                self._add(out, j, g.scale(j), m)
        return out

    def _d(self, elem: dict, i: int) -> dict:
        out: dict = {}
        for j, (g, m) in elem.items():
            self._add(out, j, self.h * g.diff(i) - g * self.grad[i] * m, m + 1)
            self._add(out, j + 1, -(g * self.grad[i]), m)
        return out

    def operator(self, alpha: tuple, l: int) -> dict:
        """D^alpha s^l applied to h^-1 (s acts first)."""
        key = (alpha, l)
        if key in self.memo:
            return self.memo[key]
        if any(alpha):
            i = next(j for j, a in enumerate(alpha) if a)
            prev = list(alpha)
            prev[i] -= 1
            val = self._d(self.operator(tuple(prev), l), i)
        elif l:
            val = self._s(self.operator(alpha, l - 1))
        else:
            val = {0: (self.ring.one(), 1)}
        self.memo[key] = val
        return val

    def apply(self, p: WeylElement) -> dict:
        W = p.ring
        n = self.n
        si = W.s_index
        out: dict = {}
        for m, c in p.terms.items():
            alpha = tuple(m[W.d_index(i)] for i in range(n))
            l = m[si] if si is not None else 0
            coeff = Poly(self.ring, {tuple(m[:n]): c})
            for j, (g, pole) in self.operator(alpha, l).items():
                self._add(out, j, coeff * g, pole)
        return {j: RationalSection.make(g, pole, self.h) for j, (g, pole) in sorted(out.items()) if g}


# the pipeline ---------------------------------------------------------------------

@dataclass
class HodgeResult:
    level: int
    ideal: PolyIdeal
    provenance: dict = field(default_factory=dict)

    @property
    def generators(self) -> list[Poly]:
        return self.ideal.generators


def spec_hash(spec: DivisorSpec, b: BFunction | None = None) -> str:
    text = "|".join([",".join(spec.ring.names), str(spec.h)]
                    + [",".join(map(str, f)) for f in spec.fields] + [str(spec.chi_index)])
    if b is not None:
        text += "|" + b.format_roots()
    return hashlib.sha256(text.encode()).hexdigest()[:16]


class HodgeComputation:
    """Caches J, its T-basis and the ideals I_0..I_k for one divisor.

    ``route`` selects how I_k is read off the generated submodule:
    ``"intersect"`` runs a position-over-term module basis and keeps the
    elements supported on component 0; ``"project"`` takes the component-0
    numerators directly, which is equivalent because the Hodge filtration
    of O(*D)[Dt] splits as a direct sum over Dt-powers.
    """

    def __init__(self, spec: DivisorSpec, b: BFunction, degree_bound: int | None = None,
                 pair_limit: int | None = None, route: str = "project"):
        if route not in ("project", "intersect"):
            raise ValueError("route must be 'project' or 'intersect'")
        self.spec = spec
        self.b = b
        self.degree_bound = degree_bound
        self.pair_limit = pair_limit
        self.route = route
        self.beta, self.r = beta_bar(b)
        self.J = build_J(spec, b)
        self._basis = None
        self.action = GraphAction(spec)
        self.levels: dict[int, PolyIdeal] = {}
        self._ord: dict[int, PolyIdeal] = {}
        self._ordnum: dict = {}

    @property
    def h(self) -> Poly:
        return self.spec.h

    def basis(self) -> list[tuple[WeylElement, int]]:
        if self._basis is None:
            self._basis = involutive_basis_T(self.J, self.degree_bound, self.pair_limit)
        return self._basis

    def provenance(self, k: int) -> dict:
        return {
            "spec_hash": spec_hash(self.spec, self.b),
            "bfunction": str(self.b),
            "beta_bar": str(self.beta),
            "r": self.r,
            "weyl_order": WeylOrder.T(self.J.ring).describe(),
            "ideal_order": "degrevlex",
            "route": self.route,
        }

    def ideal_0(self) -> PolyIdeal:
        """J intersected with Q[x]: the T-degree-0 part of the T-basis."""
        R = self.spec.ring
        gens = [p.to_poly(R) for p, d in self.basis() if d == 0]
        return PolyIdeal(R, gens)

    def module_generators(self, k: int) -> list[PoleVector]:
        out = []
        for g in truncation_generators(self.basis(), k):
            d = g.t_degree()
            comps = self.action.apply(g)
            base = self._vector(k, comps)
            base.check()
            for i in range(k - d + 1):
                vec = base.shift(i) if i else base
                vec.check()
                out.append(vec)
        return out

    def _vector(self, k: int, comps: dict) -> PoleVector:
        zero = RationalSection(self.spec.ring.zero(), 0)
        if comps and max(comps) > k:
            raise InvariantError("Dt-power beyond the level", comps)
        return PoleVector(k, tuple(comps.get(i, zero) for i in range(k + 1)))

    def ideal(self, k: int) -> PolyIdeal:
        if k < 0:
            raise ValueError("level must be non-negative")
        if k in self.levels:
            return self.levels[k]
        R = self.spec.ring
        if self.route == "project":
            gens = []
            for g in truncation_generators(self.basis(), k):
                comps = self.action.apply(g)
                vec = self._vector(k, comps)
                vec.check()
                if comps.get(0) is not None:
                    gens.append(vec.components[0].at_pole(k + 1, self.h))
            ideal = PolyIdeal(R, gens)
        else:
            vecs = [v.numerators(self.h) for v in self.module_generators(k)]
            sub = PolySubmodule(R, k + 1, vecs)
            ideal = module_component_intersect(sub, 0, degree_bound=self.degree_bound,
                                               pair_limit=self.pair_limit)
        ideal = PolyIdeal(R, ideal.groebner(degree_bound=self.degree_bound, pair_limit=self.pair_limit))
        self.levels[k] = ideal
        return ideal

    def result(self, k: int) -> HodgeResult:
        return HodgeResult(k, self.ideal(k), self.provenance(k))

    # order filtration and checks -----------------------------------------------------
    def ord_filtration(self, k: int) -> PolyIdeal:
        if k not in self._ord:
            self._ord[k] = ord_filtration(self.spec, k, self._ordnum)
        return self._ord[k]

    def check_inclusions(self, k: int) -> dict:
        """Containment report for levels 0..k; failures carry a witness."""
        h, R = self.h, self.spec.ring
        checks = []

        def record(name, level, big: PolyIdeal, elems):
            witness = next((g for g in elems if not big.contains(g)), None)
            checks.append({"check": name, "level": level, "ok": witness is None,
                           "witness": None if witness is None else str(witness)})

        for j in range(k + 1):
            I = self.ideal(j)
            O = self.ord_filtration(j)
            record("F^H in F^ord", j, O, I.generators)
            # F^ord_j sits in P_j: its numerators live in Q[x] at pole order j + 1
            checks.append({"check": "F^ord in P", "level": j, "ok": True, "witness": None})
            if j >= self.r:
                low = self.ord_filtration(j - self.r)
                record("h^r F^ord_{k-r} in F^H", j, I, [g * h ** self.r for g in low.generators])
            if j >= 1:
                prev = self.ideal(j - 1)
                record("h I_{k-1} in I_k", j, I, [g * h for g in prev.generators])
                record("D-stability", j, I, [h * g.diff(i) - g * h.diff(i) * j
                                             for g in prev.generators for i in range(R.nvars)])
        return {"level": k, "ok": all(c["ok"] for c in checks), "checks": checks}

    def generated_from(self, k: int) -> PolyIdeal:
        """Numerators of F_1D * F_k^H at pole order k + 2."""
        h, R = self.h, self.spec.ring
        gens = []
        for g in self.ideal(k).generators:
            gens.append(h * g)
            gens += [h * g.diff(i) - g * h.diff(i) * (k + 1) for i in range(R.nvars)]
        return PolyIdeal(R, gens)

    def generating_level(self, k_max: int) -> dict:
        """Smallest l with F_1D F_k = F_{k+1} for l <= k < k_max."""
        if k_max < 0:
            raise ValueError("k_max must be non-negative")
        steps = []
        for k in range(k_max):
            steps.append(ideal_equal(self.generated_from(k), self.ideal(k + 1)))
        level = k_max
        while level > 0 and steps[level - 1]:
            level -= 1
        return {"level": level, "k_max": k_max, "determined": level < k_max,
                "r": self.r, "steps": steps, "at_most_r": level <= self.r}


def ord_filtration(spec: DivisorSpec, k: int, memo: dict | None = None) -> PolyIdeal:
    """Numerators of F_k^ord at pole order k + 1: h^(k+1) D^alpha(h^-1), |alpha| <= k."""
    if k < 0:
        raise ValueError("level must be non-negative")
    act = _HinvAction(spec.h)
    if memo is not None:
        act.memo.update(memo)
    gens = []
    n = spec.n
    from .weyl import _exponents

    for alpha in _exponents(n, k):
        num, pole = act.deriv(tuple(alpha))
        gens.append(num * spec.h ** (k + 1 - pole))
    if memo is not None:
        memo.update(act.memo)
    return PolyIdeal(spec.ring, PolyIdeal(spec.ring, gens).groebner())


# functional facade --------------------------------------------------------------------

def hodge_ideal_0(spec: DivisorSpec, b: BFunction, **budget) -> HodgeResult:
    """I_0 = J intersected with Q[x], by an elimination order on W[s].

    Independent of the T-basis used at higher levels, so it doubles as a
    cross-check of ``hodge_ideal(spec, b, 0)``.
    """
    comp = HodgeComputation(spec, b, **budget)
    W = comp.J.ring
    # Dx weighs 2 and s weighs 1: still eliminates Dx and s, but differs from
    # the T-weight order, so the two routes share no Groebner basis
    weight = [0] * W.d_offset + [2] * (W.nvars - W.d_offset)
    weight[W.s_index] = 1
    order = WeylOrder(W, weight)
    drop = list(W.names[W.d_offset:])
    basis = comp.J.groebner(order, budget.get("degree_bound"), budget.get("pair_limit"))
    gens = [g.to_poly(spec.ring) for g in basis if not g.uses(drop)]
    ideal = PolyIdeal(spec.ring, PolyIdeal(spec.ring, gens).groebner())
    prov = comp.provenance(0)
    prov["route"] = "elimination"
    prov["weyl_order"] = order.describe()
    return HodgeResult(0, ideal, prov)


def hodge_module_generators(spec: DivisorSpec, b: BFunction, k: int, **budget) -> list[PoleVector]:
    return HodgeComputation(spec, b, **budget).module_generators(k)


def hodge_ideal(spec: DivisorSpec, b: BFunction, k: int, **budget) -> HodgeResult:
    comp = HodgeComputation(spec, b, **budget)
    return HodgeResult(k, comp.ideal(k), comp.provenance(k))


def check_inclusions(spec: DivisorSpec, b: BFunction, k: int, **budget) -> dict:
    """The inclusion report for levels 0..k; raises InvariantError on the first failure."""
    report = HodgeComputation(spec, b, **budget).check_inclusions(k)
    for c in report["checks"]:
        if not c["ok"]:
            raise InvariantError(f"{c['check']} fails at level {c['level']}", c["witness"])
    return report


def generating_level(spec: DivisorSpec, b: BFunction, k_max: int, **budget) -> dict:
    return HodgeComputation(spec, b, **budget).generating_level(k_max)


def minimal_ideal_generators(ideal: PolyIdeal, spec: DivisorSpec) -> list[Poly]:
    return minimal_generators(ideal, spec.weights and _int_weights(spec.weights))


def _int_weights(weights: Sequence) -> list[int]:
    from math import lcm

    den = lcm(*[int(mpq(w).denominator) for w in weights])
    return [int(mpq(w) * den) for w in weights]


"""Commutative Groebner bases: ideals, submodules, elimination, syzygies.

Everything funnels into the packed engine in ``_engine``.  Orders are given
as weight rows compared lexicographically and refined by a tie-break term
order; rows are scaled to non-negative integers before packing.
"""

from __future__ import annotations

from itertools import combinations
from math import lcm
from typing import Iterable, Sequence

from ._engine import Buchberger, BudgetExceeded, TermCoder, commutative_mul
from .poly import Poly, Ring, to_rational

__all__ = [
    "BudgetExceeded", "MonomialOrder", "PolyIdeal", "PolySubmodule", "groebner_basis",
    "eliminate", "syzygies", "module_component_intersect", "ideal_dimension", "ideal_equal",
    "minimal_generators",
]


def _degrevlex_rows(n: int, idx: Sequence[int] | None = None) -> list[list[int]]:
    idx = list(range(n)) if idx is None else list(idx)
    rows = [[1 if i in idx else 0 for i in range(n)]]
    for j in reversed(idx[1:]):
        rows.append([1 if (i in idx and i != j) else 0 for i in range(n)])
    return rows


class MonomialOrder:
    """Weight rows compared lexicographically, refined by a term order.

    ``tie_break`` is ``"degrevlex"``, ``"lex"`` or ``("block", blocks)``
    where ``blocks`` is a list of index lists, highest block first, each
    ordered by degrevlex internally.
    """

    def __init__(self, nvars: int, weight_rows: Iterable[Sequence] = (), tie_break="degrevlex"):
        self.nvars = nvars
        rows = []
        for row in weight_rows:
            q = [to_rational(v) for v in row]
            if len(q) != nvars:
                raise ValueError("weight row length does not match the variable count")
            if any(v < 0 for v in q):
                raise ValueError("negative weights are not supported")
            den = lcm(*[int(v.denominator) for v in q]) if q else 1
            rows.append([int(v * den) for v in q])
        self.weight_rows = rows
        self.tie_break = tie_break
        if tie_break == "degrevlex":
            tail = _degrevlex_rows(nvars)
        elif tie_break == "lex":
            tail = [[1 if i == j else 0 for i in range(nvars)] for j in range(nvars)]
        elif isinstance(tie_break, tuple) and tie_break[0] == "block":
            tail = []
            seen = []
            for block in tie_break[1]:
                tail.extend(_degrevlex_rows(nvars, block))
                seen.extend(block)
            if sorted(seen) != list(range(nvars)):
                raise ValueError("blocks must partition the variables")
        else:
            raise ValueError(f"unknown tie-break {tie_break!r}")
        self.rows = [r for r in rows] + tail

    @classmethod
    def degrevlex(cls, nvars: int) -> "MonomialOrder":
        return cls(nvars)

    @classmethod
    def weighted(cls, weights: Sequence, nvars: int | None = None) -> "MonomialOrder":
        return cls(nvars or len(weights), [weights])

    @classmethod
    def elimination(cls, nvars: int, drop: Sequence[int]) -> "MonomialOrder":
        drop = sorted(drop)
        keep = [i for i in range(nvars) if i not in drop]
        return cls(nvars, (), ("block", [drop, keep]))

    def key(self, exps: Sequence[int]) -> tuple:
        return tuple(sum(w * e for w, e in zip(r, exps)) for r in self.rows)

    def signature(self) -> tuple:
        return tuple(map(tuple, self.rows))

    def describe(self) -> str:
        tb = self.tie_break if isinstance(self.tie_break, str) else "block"
        if self.weight_rows:
            return f"weights {self.weight_rows} then {tb}"
        return tb

    def __eq__(self, other):
        return isinstance(other, MonomialOrder) and self.signature() == other.signature()

    def __hash__(self):
        return hash(self.signature())


# conversions between Poly and engine dicts -----------------------------------

def _encode(p: Poly, coder: TermCoder, pos: int | None = None, out: dict | None = None) -> dict:
    out = {} if out is None else out
    for m, c in p.terms.items():
        out[coder.encode(m, pos)] = c
    return out


def _decode(terms: dict, ring: Ring, coder: TermCoder) -> Poly:
    return Poly(ring, {coder.exps(k): c for k, c in terms.items()})


def _decode_vector(terms: dict, ring: Ring, coder: TermCoder, rank: int) -> tuple:
    comps: list[dict] = [{} for _ in range(rank)]
    for k, c in terms.items():
        comps[coder.pos(k)][coder.exps(k)] = c
    return tuple(Poly(ring, d) for d in comps)


class PolyIdeal:
    """An ideal of Q[ring] with lazily cached reduced Groebner bases."""

    def __init__(self, ring: Ring, generators: Iterable[Poly] = ()):
        self.ring = ring
        gens = []
        for g in generators:
            if g.ring != ring:
                raise ValueError(f"generator ring {g.ring} differs from {ring}")
            if g:
                gens.append(g)
        self.generators = gens
        self._gb: dict = {}

    # basis -------------------------------------------------------------------
    def _engine(self, order: MonomialOrder, weights=None):
        coder = TermCoder(self.ring.nvars, order.rows)
        return coder, Buchberger(coder, commutative_mul(coder), True, weights)

    def groebner(self, order: MonomialOrder | None = None, degree_bound: int | None = None,
                 pair_limit: int | None = None, weights: Sequence[int] | None = None) -> list[Poly]:
        """Reduced basis, sorted by ascending leading monomial."""
        order = order or MonomialOrder.degrevlex(self.ring.nvars)
        cache_key = (order, tuple(weights) if weights else None)
        if cache_key in self._gb:
            return list(self._gb[cache_key][1])
        coder, eng = self._engine(order, weights)
        try:
            basis, _ = eng.run([_encode(g, coder) for g in self.generators],
                               max_sugar=degree_bound, max_pairs=pair_limit)
        except BudgetExceeded as exc:
            exc.partial = [_decode(p.terms, self.ring, coder) for p in exc.partial or []]
            raise
        polys = [_decode(p.terms, self.ring, coder) for p in basis]
        self._gb[cache_key] = (basis, polys, coder, eng)
        return list(polys)

    def _cached(self, order=None):
        order = order or MonomialOrder.degrevlex(self.ring.nvars)
        self.groebner(order)
        for (o, _w), val in self._gb.items():
            if o == order:
                return val
        raise AssertionError("basis cache miss")

    def reduce(self, f: Poly, order: MonomialOrder | None = None) -> Poly:
        basis, _, coder, eng = self._cached(order)
        return _decode(eng.reduce(_encode(f, coder), basis), self.ring, coder)

    def contains(self, f: Poly) -> bool:
        return not f or self.reduce(f).is_zero()

    def contains_ideal(self, other: "PolyIdeal") -> bool:
        return all(self.contains(g) for g in other.generators)

    def is_unit(self) -> bool:
        gb = self.groebner()
        return any(g.is_constant() for g in gb)

    def is_zero(self) -> bool:
        return not self.generators

    def leading_monomials(self, order: MonomialOrder | None = None) -> list[tuple]:
        _, polys, coder, _ = self._cached(order)
        order = order or MonomialOrder.degrevlex(self.ring.nvars)
        return [max(p.terms, key=order.key) for p in polys]

    def __contains__(self, f: Poly) -> bool:
        return self.contains(f)

    def __repr__(self):
        return f"PolyIdeal({', '.join(map(str, self.generators))})"

    def __str__(self):
        return "(" + ", ".join(map(str, self.generators)) + ")"


class PolySubmodule:
    """A submodule of Q[ring]^rank given by generating vectors."""

    def __init__(self, ring: Ring, rank: int, vectors: Iterable[Sequence[Poly]] = ()):
        self.ring = ring
        self.rank = rank
        vecs = []
        for v in vectors:
            v = tuple(v)
            if len(v) != rank:
                raise ValueError(f"vector of length {len(v)} in a rank-{rank} module")
            if any(c for c in v):
                vecs.append(v)
        self.vectors = vecs
        self._last = None

    def _coder(self, order: MonomialOrder, position_rank=None, pot=True) -> TermCoder:
        return TermCoder(self.ring.nvars, order.rows, self.rank, position_rank, pot)

    def encode(self, v: Sequence[Poly], coder: TermCoder) -> dict:
        out: dict = {}
        for i, c in enumerate(v):
            _encode(c, coder, i, out)
        return out

    def groebner(self, order: MonomialOrder | None = None, position_rank=None, pot: bool = True,
                 degree_bound=None, pair_limit=None, weights=None) -> list[tuple]:
        order = order or MonomialOrder.degrevlex(self.ring.nvars)
        coder = self._coder(order, position_rank, pot)
        eng = Buchberger(coder, commutative_mul(coder), True, weights)
        try:
            basis, _ = eng.run([self.encode(v, coder) for v in self.vectors],
                               max_sugar=degree_bound, max_pairs=pair_limit)
        except BudgetExceeded as exc:
            exc.partial = [_decode_vector(p.terms, self.ring, coder, self.rank) for p in exc.partial or []]
            raise
        self._last = (basis, coder, eng)
        return [_decode_vector(p.terms, self.ring, coder, self.rank) for p in basis]

    def contains(self, v: Sequence[Poly]) -> bool:
        """Membership via a term-over-position basis."""
        if not any(c for c in v):
            return True
        if not self.vectors:
            return False
        if getattr(self, "_last", None) is None:
            self.groebner()
        basis, coder, eng = self._last
        return not eng.reduce(self.encode(v, coder), basis)


# operations ----------------------------------------------------------------------

def groebner_basis(gens: Sequence[Poly], order: MonomialOrder | None = None, ring: Ring | None = None,
                   degree_bound: int | None = None, pair_limit: int | None = None) -> PolyIdeal:
    """Return an ideal whose generators are the reduced basis under ``order``."""
    if ring is None:
        if not gens:
            raise ValueError("cannot infer the ring of an empty generator list")
        ring = gens[0].ring
    ideal = PolyIdeal(ring, gens)
    basis = ideal.groebner(order, degree_bound, pair_limit)
    out = PolyIdeal(ring, basis)
    out._gb = ideal._gb
    return out


def eliminate(ideal: PolyIdeal, drop_vars: Iterable[str], degree_bound=None, pair_limit=None) -> PolyIdeal:
    """Intersection of ``ideal`` with the subring in the remaining variables."""
    ring = ideal.ring
    drop = sorted({ring.index(v) for v in drop_vars})
    keep = [i for i in range(ring.nvars) if i not in drop]
    order = MonomialOrder.elimination(ring.nvars, drop)
    basis = ideal.groebner(order, degree_bound, pair_limit)
    sub = Ring([ring.names[i] for i in keep])
    out = []
    for g in basis:
        if all(not any(m[i] for i in drop) for m in g.terms):
            out.append(Poly(sub, {tuple(m[i] for i in keep): c for m, c in g.terms.items()}))
    return PolyIdeal(sub, out)


def syzygies(vectors: Sequence[Sequence[Poly]], ring: Ring | None = None, degree_bound=None,
             pair_limit=None) -> list[tuple]:
    """Generators of the module of relations among ``vectors``.

    Each input v_e is lifted to (v_e, e_e) in rank m + k; a position-over-term
    basis with the first m slots on top contains the syzygy module in the
    elements whose first m slots vanish.
    """
    vecs = [tuple(v) if isinstance(v, (tuple, list)) else (v,) for v in vectors]
    if not vecs:
        return []
    m = len(vecs[0])
    k = len(vecs)
    ring = ring or vecs[0][0].ring
    zero = ring.zero()
    lifted = []
    for e, v in enumerate(vecs):
        if len(v) != m:
            raise ValueError("all vectors must have equal rank")
        lifted.append(tuple(v) + tuple(ring.one() if j == e else zero for j in range(k)))
    # larger rank wins; the original slots outrank the tag slots
    position_rank = [k + m - i for i in range(m)] + [k - j for j in range(k)]
    mod = PolySubmodule(ring, m + k, lifted)
    basis = mod.groebner(position_rank=position_rank, degree_bound=degree_bound, pair_limit=pair_limit)
    syz = [b[m:] for b in basis if all(c.is_zero() for c in b[:m])]
    # drop relations generated by the others, scanning from low degree
    syz.sort(key=lambda v: max(c.total_degree() for c in v))
    kept: list[tuple] = []
    for v in syz:
        if kept and PolySubmodule(ring, k, kept).contains(v):
            continue
        kept.append(v)
    return kept


def module_component_intersect(sub: PolySubmodule, component: int, order: MonomialOrder | None = None,
                               degree_bound=None, pair_limit=None, weights=None) -> PolyIdeal:
    """The ideal {f : f e_component in sub}, by a position-over-term basis."""
    if not 0 <= component < sub.rank:
        raise ValueError("component index out of range")
    # distinct ranks keep the order total; the chosen slot is ranked lowest
    position_rank = [(sub.rank - i) if i != component else 0 for i in range(sub.rank)]
    basis = sub.groebner(order, position_rank, True, degree_bound, pair_limit, weights)
    gens = [b[component] for b in basis
            if all(c.is_zero() for i, c in enumerate(b) if i != component)]
    return PolyIdeal(sub.ring, gens)


def ideal_dimension(ideal: PolyIdeal) -> int:
    """Krull dimension from the degrevlex leading-term ideal; -1 for the unit ideal."""
    if ideal.is_zero():
        return ideal.ring.nvars
    if ideal.is_unit():
        return -1
    n = ideal.ring.nvars
    supports = [frozenset(i for i, e in enumerate(m) if e) for m in ideal.leading_monomials()]
    for size in range(n, -1, -1):
        for subset in combinations(range(n), size):
            s = frozenset(subset)
            if not any(sup <= s for sup in supports):
                return size
    return 0


def ideal_equal(a: PolyIdeal, b: PolyIdeal) -> bool:
    if a.ring != b.ring:
        raise ValueError("ideals live in different rings")
    ga = a.groebner()
    gb = b.groebner()
    return [g.terms for g in ga] == [g.terms for g in gb]


def minimal_generators(ideal: PolyIdeal, weights: Sequence[int] | None = None) -> list[Poly]:
    """Minimal homogeneous generators of a (weighted-)homogeneous ideal.

    Candidates (the reduced basis) are scanned by degree; one is kept iff it
    is not in the ideal spanned by those kept so far.
    """
    weights = tuple(weights) if weights else (1,) * ideal.ring.nvars
    for g in ideal.generators:
        if not g.is_homogeneous(weights):
            raise ValueError("minimal generators are only defined here for homogeneous ideals")
    cands = sorted(ideal.groebner(), key=lambda g: g.weighted_degree(weights))
    kept: list[Poly] = []
    for g in cands:
        if kept and PolyIdeal(ideal.ring, kept).contains(g):
            continue
        kept.append(g)
    return kept


def normal_form(f: Poly, gens: Sequence[Poly]) -> Poly:
    return PolyIdeal(f.ring, gens).reduce(f)


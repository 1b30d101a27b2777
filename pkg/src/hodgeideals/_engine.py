"""Packed-monomial Buchberger engine shared by the commutative and Weyl layers.

A term (exponent vector plus optional module position) is packed into one
Python int.  The high part holds the monomial-order fields, so comparing two
packed ints compares the terms; the low part holds the raw exponents with a
guard bit per field, so divisibility is one subtraction and one mask.  Ring
monomials carry zero position fields, which makes ``term + monomial`` the
packed form of their product.

Polynomials inside the engine are plain ``dict[int, mpq]``.
"""

from __future__ import annotations

import heapq
from math import comb, perm
from typing import Callable, Sequence

from gmpy2 import mpq

EXP_BITS = 16
ROW_BITS = 40


class BudgetExceeded(RuntimeError):
    """A Groebner computation hit its degree or pair budget.

    ``partial`` holds the basis elements found so far (engine dicts or
    wrapped objects, depending on who re-raises).
    """

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial


class TermCoder:
    """Encode/decode terms for a fixed variable count, order and module rank.

    ``rows`` are non-negative integer weight vectors compared
    lexicographically; they must determine a total order.  ``position_rank``
    maps each module position to its priority (larger wins) and ``pot``
    selects position-over-term (position compared first) versus
    term-over-position.
    """

    def __init__(self, nvars: int, rows: Sequence[Sequence[int]], rank: int = 1,
                 position_rank: Sequence[int] | None = None, pot: bool = True):
        self.nvars = nvars
        self.rows = [tuple(int(v) for v in r) for r in rows]
        for r in self.rows:
            if len(r) != nvars or min(r, default=0) < 0:
                raise ValueError("order rows must be non-negative and match the variable count")
        self.rank = rank
        self.position_rank = list(position_rank) if position_rank is not None else list(range(rank))
        self.pot = pot
        eb = EXP_BITS
        self.fmask = (1 << eb) - 1
        self.raw_bits = (nvars + 2) * eb
        self.raw_mask = (1 << self.raw_bits) - 1
        self.guards = sum(1 << (i * eb + eb - 1) for i in range(nvars + 2))
        nfields = len(self.rows) + 1
        self._row_shift = []
        order_fields = (["pos"] + list(range(len(self.rows)))) if pot else (list(range(len(self.rows))) + ["pos"])
        for j, f in enumerate(order_fields):
            shift = self.raw_bits + (nfields - 1 - j) * ROW_BITS
            if f == "pos":
                self._pos_shift = shift
            else:
                self._row_shift.append((f, shift))
        self._row_shift.sort()
        # packed unit monomials, used by the Weyl product
        self.units = [self.encode([1 if j == i else 0 for j in range(nvars)]) for i in range(nvars)]

    def encode(self, exps: Sequence[int], pos: int | None = None) -> int:
        eb = EXP_BITS
        key = 0
        for i, e in enumerate(exps):
            if e:
                key |= e << (i * eb)
        for (j, shift), row in zip(self._row_shift, self.rows):
            v = 0
            for w, e in zip(row, exps):
                if w and e:
                    v += w * e
            key |= v << shift
        if pos is not None:
            key |= pos << (self.nvars * eb)
            key |= (self.rank - pos) << ((self.nvars + 1) * eb)
            key |= self.position_rank[pos] << self._pos_shift
        return key

    def exps(self, key: int) -> tuple:
        eb, m = EXP_BITS, self.fmask
        return tuple((key >> (i * eb)) & m for i in range(self.nvars))

    def pos(self, key: int) -> int:
        return (key >> (self.nvars * EXP_BITS)) & self.fmask

    def exp_of(self, key: int, i: int) -> int:
        return (key >> (i * EXP_BITS)) & self.fmask

    def divides(self, m: int, k: int) -> bool:
        g = self.guards
        return (((k & self.raw_mask) | g) - (m & self.raw_mask)) & g == g

    def lcm(self, a: int, b: int) -> int:
        ea, eb_ = self.exps(a), self.exps(b)
        return self.encode([x if x > y else y for x, y in zip(ea, eb_)], self.pos(a) if self.is_term(a) else None)

    def is_term(self, key: int) -> bool:
        """True for module terms (position fields set), False for ring monomials."""
        return bool((key >> ((self.nvars + 1) * EXP_BITS)) & self.fmask)

    def coprime(self, a: int, b: int) -> bool:
        return all(not (x and y) for x, y in zip(self.exps(a), self.exps(b)))


class EPoly:
    __slots__ = ("terms", "lm", "sugar", "lmdeg")

    def __init__(self, terms: dict, sugar: int, lmdeg: int):
        self.terms = terms
        self.lm = max(terms)
        self.sugar = sugar
        self.lmdeg = lmdeg


def commutative_mul(coder: TermCoder):
    def mul(q: int, coef, terms: dict) -> dict:
        return {k + q: c * coef for k, c in terms.items()}

    return mul


def weyl_mul(coder: TermCoder, pairs: Sequence[tuple[int, int]]):
    """Left product by a term in a Weyl algebra.

    ``pairs`` lists (x-index, d-index) for each conjugate pair.  Terms are
    stored in normal order (all x's left of all d's), so ``q * (x^c d^e)``
    expands by the Leibniz rule applied pair by pair.
    """
    eb, fm = EXP_BITS, coder.fmask
    pair_units = [(xi, di, coder.units[xi] + coder.units[di]) for xi, di in pairs]

    def mul(q: int, coef, terms: dict) -> dict:
        active = []
        for xi, di, u in pair_units:
            b = (q >> (di * eb)) & fm
            if b:
                active.append((xi * eb, b, u))
        if not active:
            return {k + q: c * coef for k, c in terms.items()}
        out: dict = {}
        for k, c in terms.items():
            cc = c * coef
            combos = None
            for xshift, b, u in active:
                cx = (k >> xshift) & fm
                if not cx:
                    continue
                top = b if b < cx else cx
                steps = [(kk * u, comb(b, kk) * perm(cx, kk)) for kk in range(top + 1)]
                if combos is None:
                    combos = steps
                else:
                    combos = [(s1 + s2, f1 * f2) for s1, f1 in combos for s2, f2 in steps]
            base = k + q
            if combos is None:
                v = out.get(base)
                out[base] = cc if v is None else v + cc
                continue
            for sub, fac in combos:
                key = base - sub
                v = out.get(key)
                add = cc * fac
                out[key] = add if v is None else v + add
        return {k: v for k, v in out.items() if v}

    return mul


class Buchberger:
    """Buchberger's algorithm with the sugar strategy and Gebauer-Moeller pruning.

    ``commutative=False`` disables the product criterion, which is unsound
    in the Weyl algebra; the chain criterion stays valid there.
    """

    def __init__(self, coder: TermCoder, mul: Callable, commutative: bool = True,
                 sugar_weights: Sequence[int] | None = None):
        self.coder = coder
        self.mul = mul
        self.commutative = commutative
        self.sugar_weights = tuple(sugar_weights) if sugar_weights else (1,) * coder.nvars

    # helpers -------------------------------------------------------------
    def degree(self, key: int) -> int:
        return sum(w * e for w, e in zip(self.sugar_weights, self.coder.exps(key)) if e)

    def make(self, terms: dict, sugar: int | None = None) -> EPoly:
        lm = max(terms)
        lc = terms[lm]
        if lc != 1:
            inv = 1 / lc
            terms = {k: c * inv for k, c in terms.items()}
        if sugar is None:
            sugar = max(self.degree(k) for k in terms)
        return EPoly(terms, sugar, self.degree(lm))

    def find_reducer(self, k: int, basis: Sequence[EPoly]):
        divides = self.coder.divides
        for g in basis:
            if g.lm <= k and divides(g.lm, k):
                return g
        return None

    def reduce(self, terms: dict, basis: Sequence[EPoly], full: bool = True) -> dict:
        """Normal form of ``terms`` modulo ``basis`` (monic elements)."""
        f = dict(terms)
        rem: dict = {}
        heap = [-k for k in f]
        heapq.heapify(heap)
        mul = self.mul
        pop, push = heapq.heappop, heapq.heappush
        while heap:
            k = -pop(heap)
            c = f.get(k)
            if c is None:
                continue
            g = self.find_reducer(k, basis)
            if g is None:
                rem[k] = c
                del f[k]
                if not full:
                    for kk in f:
                        rem[kk] = f[kk]
                    return rem
                continue
            prod = mul(k - g.lm, -c, g.terms)
            for nk, nc in prod.items():
                v = f.get(nk)
                if v is None:
                    f[nk] = nc
                    push(heap, -nk)
                else:
                    v += nc
                    if v:
                        f[nk] = v
                    else:
                        del f[nk]
            f.pop(k, None)
        return rem

    def spoly(self, f: EPoly, g: EPoly, lcm: int) -> dict:
        a = self.mul(lcm - f.lm, mpq(1), f.terms)
        b = self.mul(lcm - g.lm, mpq(-1), g.terms)
        for k, c in b.items():
            v = a.get(k)
            if v is None:
                a[k] = c
            else:
                v += c
                if v:
                    a[k] = v
                else:
                    del a[k]
        return a

    # main loop -------------------------------------------------------------
    def run(self, gens: Sequence[dict], max_sugar: int | None = None, max_pairs: int | None = None,
            truncate_sugar: int | None = None) -> tuple[list[EPoly], bool]:
        """Return (reduced basis sorted by leading term, truncated flag)."""
        coder = self.coder
        polys: list[EPoly] = []
        active: list[int] = []
        pairs: list = []
        truncated = False

        def add(p: EPoly):
            nonlocal pairs
            hi = len(polys)
            polys.append(p)
            h = p
            cands = []
            for gi in active:
                g = polys[gi]
                if coder.rank > 1 and coder.pos(g.lm) != coder.pos(h.lm):
                    continue
                lcm = coder.lcm(h.lm, g.lm)
                disjoint = self.commutative and lcm == h.lm + g.lm
                cands.append((gi, lcm, disjoint))
            keep = []
            for idx, (gi, lcm, disjoint) in enumerate(cands):
                if disjoint:
                    keep.append((gi, lcm, disjoint))
                    continue
                dominated = False
                for jdx, (gj, lcm2, _) in enumerate(cands):
                    if jdx != idx and lcm2 != lcm and coder.divides(lcm2, lcm):
                        dominated = True
                        break
                    if jdx < idx and lcm2 == lcm:
                        dominated = True
                        break
                if not dominated:
                    keep.append((gi, lcm, disjoint))
            new_pairs = []
            for entry in pairs:
                _, lcm, i, j = entry
                if coder.divides(h.lm, lcm):
                    pi, pj = polys[i], polys[j]
                    if coder.lcm(pi.lm, h.lm) != lcm and coder.lcm(pj.lm, h.lm) != lcm:
                        continue
                new_pairs.append(entry)
            for gi, lcm, disjoint in keep:
                if disjoint:
                    continue
                g = polys[gi]
                dl = self.degree(lcm)
                sugar = max(h.sugar - h.lmdeg, g.sugar - g.lmdeg) + dl
                new_pairs.append((sugar, lcm, gi, hi))
            heapq.heapify(new_pairs)
            pairs = new_pairs
            active[:] = [gi for gi in active if not coder.divides(h.lm, polys[gi].lm)] + [hi]

        def basis():
            return [polys[i] for i in active]

        start = []
        for g in gens:
            if g:
                start.append(self.make(g))
        start.sort(key=lambda p: (p.sugar, p.lm))
        for p in start:
            r = self.reduce(p.terms, basis())
            if r:
                add(self.make(r, p.sugar))
        processed = 0
        while pairs:
            sugar, lcm, i, j = heapq.heappop(pairs)
            if truncate_sugar is not None and sugar > truncate_sugar:
                truncated = True
                continue
            if max_sugar is not None and sugar > max_sugar:
                raise BudgetExceeded(f"degree bound {max_sugar} exceeded (pair of sugar {sugar})",
                                     self.interreduce(basis()))
            processed += 1
            if max_pairs is not None and processed > max_pairs:
                raise BudgetExceeded(f"pair limit {max_pairs} exceeded", self.interreduce(basis()))
            s = self.spoly(polys[i], polys[j], lcm)
            if not s:
                continue
            r = self.reduce(s, basis())
            if r:
                add(self.make(r, sugar))
        return self.interreduce(basis()), truncated

    def interreduce(self, basis: Sequence[EPoly]) -> list[EPoly]:
        basis = sorted(basis, key=lambda p: p.lm)
        minimal = [p for p in basis if not any(q is not p and self.coder.divides(q.lm, p.lm) for q in basis)]
        out = []
        for p in minimal:
            tail = dict(p.terms)
            del tail[p.lm]
            red = self.reduce(tail, minimal)
            red[p.lm] = mpq(1)
            out.append(EPoly(red, p.sugar, p.lmdeg))
        out.sort(key=lambda p: p.lm)
        return out

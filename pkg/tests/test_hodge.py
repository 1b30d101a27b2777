from __future__ import annotations

import random

import pytest
from gmpy2 import mpq

from hodgeideals import (HodgeComputation, InvariantError, PolyIdeal, WeylElement, WeylRing, check_inclusions,
                         hodge_ideal, hodge_ideal_0, hodge_module_generators, ideal_equal, load_corpus,
                         normalize_basis, ord_filtration, psi_bar)
from hodgeideals.hodge import (GraphAction, RationalSection, apply_to_hinv, build_J, graph_ring, phi, phi_inv,
                               split_t, substitute_s)
from hodgeideals.weyl import involutive_basis_T, truncation_generators

from conftest import EXTENDED_SCOPE, FAST_CORPUS, computation
from oracles import ideal_truncation_slice, module_slice

Wt = WeylRing(["x", "y"], has_t=True)
W2s = WeylRing(["x", "y"], has_s=True)


def corpus(name):
    f = load_corpus(name)
    return normalize_basis(f.spec), f.bfunction


def same_ideal(a, b):
    return ideal_equal(a, b)


# building J and the maps ------------------------------------------------------------

def test_build_J_normal_crossing():
    spec, b = corpus("normal_crossing_xy")
    J = build_J(spec, b)
    W = J.ring
    assert len(J.generators) == spec.n + 2
    assert J.generators[0] == W.parse("x*y")
    assert J.generators[1] == W.one()
    assert J.is_unit()


def test_build_J_d4_carries_beta_bar():
    spec, b = corpus("d4_quiver")
    J = build_J(spec, b)
    assert J.generators[1] == J.ring.parse("s - 1/3")
    assert len(J.generators) == 8
    W = J.ring
    assert J.generators[-1] == spec.weyl_field(W, spec.chi) - W.var("s") + 1


def test_substitute_s_examples():
    spec, _ = corpus("a2_arrangement")
    W = WeylRing(spec.ring.names, has_s=True)
    T = graph_ring(spec)
    chi = spec.weyl_field(W, spec.chi)
    dtt = T.var("Dt") * T.var("t")
    assert substitute_s(chi - W.var("s") + 1, T) == spec.weyl_field(T, spec.chi) + dtt + 1
    assert substitute_s(W.var("s") ** 2, T) == dtt * dtt
    assert substitute_s(W.var("x") * W.var("s"), T) == -(T.var("x") * dtt)


def test_phi_examples():
    h = Wt.x_ring().parse("x*y")
    assert phi(Wt.var("t"), h) == Wt.parse("t + x*y")
    assert phi(Wt.var("Dx"), h) == Wt.parse("Dx - y*Dt")
    assert phi(Wt.var("Dt"), h) == Wt.var("Dt")


def test_phi_inv_on_vector_fields():
    spec, _ = corpus("a2_arrangement")
    T = graph_ring(spec)
    for field in spec.fields:
        delta = spec.weyl_field(T, field)
        from hodgeideals.divisor import apply_field

        image = T.from_poly(apply_field(field, spec.h)) * T.var("Dt")
        assert phi_inv(delta, spec.h) == delta + image


_rnd = random.Random(11)


def _random_operator(ring, max_deg=3, terms=4):
    out = ring.zero()
    for _ in range(terms):
        while True:
            e = [_rnd.randint(0, 2) for _ in range(ring.nvars)]
            if sum(e) <= max_deg:
                break
        out = out + ring.monomial(e, _rnd.randint(-4, 4))
    return out


@pytest.mark.parametrize("seed", range(8))
@pytest.mark.criterion(8)
def test_phi_phi_inv_identity(seed):
    _rnd.seed(seed)
    h = Wt.x_ring().parse("x^2 - y^3")
    p = _random_operator(Wt)
    assert phi(phi_inv(p, h), h) == p
    assert phi_inv(phi(p, h), h) == p


def test_phi_is_multiplicative():
    h = Wt.x_ring().parse("x*y + y^2")
    for seed in range(4):
        _rnd.seed(100 + seed)
        p, q = _random_operator(Wt, 2, 3), _random_operator(Wt, 2, 3)
        assert phi(p * q, h) == phi(p, h) * phi(q, h)


def _recombine(A, parts, ring):
    out = A * ring.var("t")
    for q, i in parts:
        out = out + ring.convert(q) * ring.var("Dt") ** i
    return out


def test_split_t_examples():
    A, parts = split_t(Wt.parse("x*Dx"))
    assert A.is_zero() and [(str(q), i) for q, i in parts] == [("x*Dx", 0)]
    A, parts = split_t(Wt.parse("t*Dt"))
    assert A == Wt.var("Dt") and [(str(q), i) for q, i in parts] == [("-1", 0)]
    A, parts = split_t(Wt.parse("t^2*Dt^2"))
    assert A == Wt.var("Dt") ** 2 * Wt.var("t") - Wt.var("Dt").scale(4)
    assert [(str(q), i) for q, i in parts] == [("2", 0)]


@pytest.mark.parametrize("seed", range(6))
def test_split_t_recombines(seed):
    _rnd.seed(200 + seed)
    q = _random_operator(Wt, 4, 5)
    A, parts = split_t(q)
    assert _recombine(A, parts, Wt) == q
    assert all(p.ring.has_t is False for p, _ in parts)


def test_apply_to_hinv_examples():
    W = WeylRing(["x", "y"])
    R = W.x_ring()
    h = R.parse("x^2 + y^3")
    assert apply_to_hinv(W.one(), h) == RationalSection(R.one(), 1)
    assert apply_to_hinv(W.var("Dx"), h) == RationalSection(-h.diff(0), 2)
    hx, hxx = h.diff(0), h.diff(0).diff(0)
    assert apply_to_hinv(W.parse("Dx^2"), h) == RationalSection.make(2 * hx * hx - h * hxx, 3, h)


def test_rational_section_cancels_h():
    R = WeylRing(["x"]).x_ring()
    h = R.parse("x^2 + 1")
    sec = RationalSection.make(h * R.parse("x"), 2, h)
    assert sec == RationalSection(R.parse("x"), 1)
    with pytest.raises(InvariantError):
        sec.at_pole(0, h)


def test_psi_bar_examples():
    spec, _ = corpus("a2_arrangement")
    W = WeylRing(spec.ring.names, has_s=True)
    R = spec.ring
    assert psi_bar(W.one(), spec) == [(RationalSection(R.one(), 1), 0)]
    assert psi_bar(W.from_poly(spec.h), spec) == [(RationalSection(R.one(), 0), 0)]
    assert psi_bar(spec.weyl_field(W, spec.chi) - W.var("s") + 1, spec) == []


@pytest.mark.parametrize("name", FAST_CORPUS)
def test_annihilator_vanishing(name):
    spec, b = corpus(name)
    J = build_J(spec, b)
    for g in J.generators[2:]:
        assert psi_bar(g, spec) == []
        assert GraphAction(spec).apply(g) == {}


@pytest.mark.parametrize("name", ["a2_arrangement", "sekiguchi_b3", "binary_cubics"])
def test_graph_action_agrees_with_psi_bar(name):
    spec, b = corpus(name)
    W = WeylRing(spec.ring.names, has_s=True)
    act = GraphAction(spec)
    _rnd.seed(len(name))
    for _ in range(5):
        p = _random_operator(W, 3, 3)
        direct = act.apply(p)
        composed = {i: sec for sec, i in psi_bar(p, spec)}
        assert direct == composed


# pole bounds and module generators ----------------------------------------------------

@pytest.mark.parametrize("name", ["normal_crossing_xy", "a2_arrangement", "sekiguchi_a2", "binary_cubics"])
def test_pole_bounds(name):
    comp = computation(name)
    for k in range(3):
        for vec in comp.module_generators(k):
            vec.check()
            for i, c in enumerate(vec.components):
                assert c.is_zero() or c.pole <= k - i + 1


def test_module_generators_normal_crossing_level_zero():
    spec, b = corpus("normal_crossing_xy")
    vecs = hodge_module_generators(spec, b, 0)
    ideal = PolyIdeal(spec.ring, [v.numerators(spec.h)[0] for v in vecs])
    assert ideal.is_unit()  # F^ord_0 = O h^-1


def test_module_generators_binary_cubics_level_zero():
    spec, b = corpus("binary_cubics")
    vecs = hodge_module_generators(spec, b, 0)
    ideal = PolyIdeal(spec.ring, [v.numerators(spec.h)[0] for v in vecs])
    R = spec.ring
    known = PolyIdeal(R, [R.parse(t) for t in ("z^2-3*y*w", "y*z-9*x*w", "y^2-3*x*z")])
    assert same_ideal(ideal, known)


# ideals ---------------------------------------------------------------------------

@pytest.mark.parametrize("name", FAST_CORPUS)
@pytest.mark.criterion(8)
def test_two_route_I0(name):
    spec, b = corpus(name)
    res = hodge_ideal_0(spec, b)
    assert res.provenance["route"] == "elimination"
    assert same_ideal(res.ideal, computation(name).ideal(0))


@pytest.mark.parametrize("name", ["a2_arrangement", "sekiguchi_b3", "binary_cubics", "d4_quiver", "cross_cap"])
def test_intersect_route_agrees_with_projection(name):
    spec, b = corpus(name)
    comp = HodgeComputation(spec, b, route="intersect")
    for k in range(3):
        assert same_ideal(comp.ideal(k), computation(name).ideal(k))


def test_hodge_ideal_facade_and_provenance():
    spec, b = corpus("a2_arrangement")
    res = hodge_ideal(spec, b, 1)
    assert res.level == 1 and same_ideal(res.ideal, computation("a2_arrangement").ideal(1))
    for key in ("spec_hash", "bfunction", "beta_bar", "r", "weyl_order", "ideal_order", "route"):
        assert key in res.provenance
    with pytest.raises(ValueError):
        computation("a2_arrangement").ideal(-1)


@pytest.mark.parametrize("name", FAST_CORPUS)
@pytest.mark.criterion(8)
def test_inclusion_chain(name):
    report = computation(name).check_inclusions(2)
    failed = [c for c in report["checks"] if not c["ok"]]
    assert not failed
    assert {c["check"] for c in report["checks"]} >= {"F^H in F^ord", "h I_{k-1} in I_k", "D-stability"}


def test_check_inclusions_facade_raises_on_failure(monkeypatch):
    spec, b = corpus("a2_arrangement")
    assert check_inclusions(spec, b, 1)["ok"]

    def broken(self, k):
        return PolyIdeal(self.spec.ring, [self.spec.h ** 5])

    monkeypatch.setattr(HodgeComputation, "ideal", broken)
    with pytest.raises(InvariantError) as info:
        check_inclusions(spec, b, 1)
    assert info.value.witness is not None


@pytest.mark.parametrize("name", sorted(EXTENDED_SCOPE) + ["smooth_line", "normal_crossing_xy",
                                                            "normal_crossing_xyz"])
def test_r_zero_forces_order_filtration(name):
    comp = computation(name)
    assert comp.r == 0
    for k in range(3):
        assert same_ideal(comp.ideal(k), comp.ord_filtration(k))


def test_d4_strict_inclusion_at_level_one():
    comp = computation("d4_quiver")
    I1, O1 = comp.ideal(1), comp.ord_filtration(1)
    assert O1.contains_ideal(I1)
    assert not same_ideal(I1, O1)


def test_ord_filtration_examples():
    spec, _ = corpus("a2_arrangement")
    assert ord_filtration(spec, 0).is_unit()
    grad = PolyIdeal(spec.ring, [spec.h] + [spec.h.diff(i) for i in range(spec.n)])
    assert same_ideal(ord_filtration(spec, 1), grad)
    nc, _ = corpus("normal_crossing_xy")
    R = nc.ring
    assert same_ideal(ord_filtration(nc, 1), PolyIdeal(R, [R.parse("x"), R.parse("y")]))
    with pytest.raises(ValueError):
        ord_filtration(nc, -1)


# generating level ------------------------------------------------------------------

@pytest.mark.parametrize("name,level", [("sekiguchi_a1", 0), ("binary_cubics", 1), ("d4_quiver", 1),
                                        ("a2_arrangement", 0), ("whitney_umbrella", 0)])
def test_generating_level(name, level):
    rep = computation(name).generating_level(2)
    assert rep["level"] == level and rep["determined"]
    assert rep["at_most_r"]


def test_generating_level_undetermined_when_k_max_too_small():
    rep = computation("binary_cubics").generating_level(1)
    assert rep["level"] == 1 and not rep["determined"]
    with pytest.raises(ValueError):
        computation("binary_cubics").generating_level(-1)


# determinism ---------------------------------------------------------------------------

@pytest.mark.parametrize("name", ["a2_arrangement", "sekiguchi_b1", "binary_cubics"])
def test_repeated_runs_are_identical(name):
    spec, b = corpus(name)
    runs = []
    for _ in range(2):
        comp = HodgeComputation(spec, b)
        runs.append([[str(g) for g in comp.ideal(k).generators] for k in range(3)])
    assert runs[0] == runs[1]


# brute-force truncation oracle ---------------------------------------------------------

def _truncation_slices_agree(name, slices, extra):
    spec, b = corpus(name)
    J = build_J(spec, b)
    weights = [int(w) for w in spec.weights]
    basis = involutive_basis_T(J)
    for k, e in slices:
        oracle = ideal_truncation_slice(J.generators, k, weights, e, extra)
        span = module_slice(truncation_generators(basis, k), weights, e)
        assert all(span.contains(r) for r in oracle.rows.values()), (k, e)
        assert all(oracle.contains(r) for r in span.rows.values()), (k, e)
        assert len(oracle) == len(span)


@pytest.mark.criterion(8)
def test_truncation_oracle_normal_crossing():
    _truncation_slices_agree("normal_crossing_xy", [(k, e) for k in range(3) for e in (-1, 0, 1, 2)], 1)


@pytest.mark.criterion(8)
def test_truncation_oracle_a2():
    slices = [(0, 0), (0, 1), (0, 2), (1, -1), (1, 0), (1, 1), (1, 2), (2, -1), (2, 0)]
    _truncation_slices_agree("a2_arrangement", slices, 3)

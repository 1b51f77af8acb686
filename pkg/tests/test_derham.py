import dataclasses

import pytest
from hypothesis import given, strategies as st

from frobsplit import derham
from frobsplit.derham import (DifferentialForm, FrobeniusLift, NotClosed, cartier, cartier_inverse,
                              fsplit_composite, verify_total_splitting, witt_basechange_check)
from frobsplit.fpoly import AmbientMismatch, HypersurfaceRing, PolyRing
from frobsplit.splitting import graded_splitting_search

from conftest import polys

R2 = PolyRing(2, ("x", "y"))
R3 = PolyRing(3, ("x", "y"))
R5 = PolyRing(5, ("x", "y", "z"))


def fn(ring, text):
    return DifferentialForm.function(ring.parse(text))


def dx(ring, *idx):
    return DifferentialForm.dx(ring, *idx)


@st.composite
def forms(draw, ring, degree):
    import itertools
    t = {}
    for J in itertools.combinations(range(ring.nvars), degree):
        t[J] = draw(polys(ring, 3, 3))
    return DifferentialForm(ring, degree, t)


def test_d_of_product():
    assert fn(R3, "x*y").d() == dx(R3, 0).scale(R3.parse("y")) + dx(R3, 1).scale(R3.parse("x"))


def test_wedge_sign_conventions():
    assert dx(R3, 1).wedge(dx(R3, 0)) == -dx(R3, 0, 1)
    assert dx(R3, 0).wedge(dx(R3, 0)).is_zero()


def test_ambient_mismatch():
    with pytest.raises(AmbientMismatch):
        dx(R2, 0) + dx(R3, 0)


@pytest.mark.parametrize("ring", [R2, R3, R5], ids=["p2", "p3", "p5"])
@given(data=st.data())
def test_d_squared_and_leibniz(ring, data):
    f = DifferentialForm.function(data.draw(polys(ring, 4, 4)))
    assert f.d().d().is_zero()
    i, j = data.draw(st.integers(0, 2)), data.draw(st.integers(0, 2))
    a, b = data.draw(forms(ring, min(i, ring.nvars))), data.draw(forms(ring, min(j, ring.nvars)))
    lhs = a.wedge(b).d()
    rhs = a.d().wedge(b) + a.wedge(b.d()).scale((-1) ** a.degree)
    assert lhs == rhs


@given(data=st.data())
def test_pth_powers_are_constants(data):
    g = data.draw(polys(R3, 3, 3)).frobenius()
    w = data.draw(forms(R3, 1))
    assert w.scale(g).d() == w.d().scale(g)


def test_cartier_inverse_examples():
    x = PolyRing(2, ("x",))
    assert cartier_inverse(dx(x, 0)) == DifferentialForm(x, 1, {(0,): x.parse("x")})
    got = cartier_inverse(DifferentialForm(R3, 1, {(1,): R3.parse("x")}))
    assert got == DifferentialForm(R3, 1, {(1,): R3.parse("x^3*y^2")})
    assert got.is_closed()


def test_cartier_examples():
    x = PolyRing(2, ("x",))
    assert cartier(DifferentialForm(x, 1, {(0,): x.parse("x")})) == dx(x, 0)
    assert cartier(dx(x, 0)).is_zero()
    with pytest.raises(NotClosed):
        cartier(DifferentialForm(R2, 1, {(0,): R2.parse("y")}))


@pytest.mark.parametrize("p", (2, 3))
@pytest.mark.parametrize("nv", (1, 2))
def test_cartier_round_trip_to_degree_10(p, nv):
    ring = PolyRing(p, ("x", "y")[:nv])
    for i in range(nv + 1):
        for k in range(11):
            for a, J in derham.forms_of_total_degree(nv, i, k):
                eta = DifferentialForm.monomial(ring, a, J)
                assert cartier(cartier_inverse(eta)) == eta


@pytest.mark.parametrize("ring", [R2, R3], ids=["p2", "p3"])
@given(data=st.data())
def test_cartier_inverse_multiplicative(ring, data):
    a, b = data.draw(forms(ring, 1)), data.draw(forms(ring, data.draw(st.integers(0, 1))))
    prod = cartier_inverse(a.wedge(b))
    sep = cartier_inverse(a).wedge(cartier_inverse(b))
    assert cartier(prod - sep).is_zero()


@given(data=st.data())
def test_exact_forms_die(data):
    xi = data.draw(forms(R3, 1))
    assert cartier(xi.d()).is_zero()


@pytest.mark.parametrize("p,nv", [(2, 1), (2, 2), (3, 1), (3, 2), (2, 3)])
def test_classes_independent(p, nv):
    for i in range(nv + 1):
        for mu in derham.multidegrees_of_total(nv, 2 * p):
            assert derham.classes_independent(p, nv, i, mu)
            assert derham.cohomology_dim(p, nv, i, mu) == len(derham.cartier_classes(p, nv, i, mu))


def test_zeta_examples():
    x = PolyRing(2, ("x",))
    assert FrobeniusLift.canonical(x).zeta(dx(x, 0)) == DifferentialForm(x, 1, {(0,): x.parse("x")})
    lift = FrobeniusLift.parse(x, "g1=x^2")
    assert lift.zeta(dx(x, 0)) == DifferentialForm(x, 1, {(0,): x.parse("x")})
    assert lift.zeta(dx(x, 0)).is_closed()
    for ring in (R2, R3):
        top = FrobeniusLift.parse(ring, "g1=x*y, g2=y^2").zeta(dx(ring, 0, 1))
        assert cartier(top) == dx(ring, 0, 1)


@given(data=st.data())
def test_zeta_lands_in_cocycles(data):
    lift = FrobeniusLift(R3, (data.draw(polys(R3, 2, 3)), data.draw(polys(R3, 2, 3))))
    w = data.draw(forms(R3, data.draw(st.integers(0, 2))))
    img = lift.zeta(w)
    assert img.is_closed()
    assert cartier(img) == w


def test_lift_parse_errors():
    with pytest.raises(ValueError):
        FrobeniusLift.parse(R2, "h1=x")
    with pytest.raises(ValueError):
        FrobeniusLift.parse(R2, "g3=x")


@pytest.mark.parametrize("p,nv", [(2, 1), (3, 2)])
def test_total_splitting(p, nv):
    ring = PolyRing(p, ("x", "y")[:nv])
    D = 8 if nv == 1 else 6
    rep = verify_total_splitting(FrobeniusLift.parse(ring, "g1=x^2"), D)
    assert rep["quasi_isomorphism"] and rep["induces_cartier_inverse"]
    beyond = [e for e in rep["bidegrees"] if e["i"] > nv]
    assert beyond and all(e["source_dim"] == e["target_dim"] == 0 for e in beyond)


def test_total_splitting_h_bases():
    ring = PolyRing(2, ("x",))
    rep = verify_total_splitting(FrobeniusLift.canonical(ring), 8)
    # H^0 has basis x^(2a), H^1 has basis x^(2a+1) dx: one class per degree
    dims = {(e["i"], e["k"]): e["target_dim"] for e in rep["bidegrees"]}
    assert all(dims[(0, k)] == 1 for k in range(9))
    assert dims[(1, 0)] == 0 and all(dims[(1, k)] == 1 for k in range(1, 9))


def test_total_splitting_cap_too_small():
    with pytest.raises(ValueError):
        verify_total_splitting(FrobeniusLift.canonical(R3), 2)


@pytest.mark.parametrize("p", (2, 3))
def test_fsplit_composite(p):
    ring = PolyRing(p, ("x",))
    S = HypersurfaceRing(ring)
    tau = graded_splitting_search(S, 1, 1)
    rep = fsplit_composite(tau, FrobeniusLift.canonical(ring), 8)
    assert rep["induces_cartier"] and rep["fails_on"] == []
    neg = dataclasses.replace(tau, values={})
    with pytest.raises(ValueError):
        fsplit_composite(neg, FrobeniusLift.canonical(ring), 8)
    bad = fsplit_composite(neg, FrobeniusLift.canonical(ring), 8, verify=False)
    assert 0 in bad["fails_on"] and 0 in bad["zero_on"]


def test_witt_basechange():
    ring = PolyRing(2, ("x",))
    rep = witt_basechange_check(ring, 2, 6)
    assert rep["ok"] and rep["basis_size"] == 4
    for row in rep["degrees"]:
        assert row["ranks"] == row["expected"]
    assert witt_basechange_check(ring, 1, 6)["ok"]
    assert witt_basechange_check(PolyRing(3, ("x", "y")), 1, 3)["ok"]
    with pytest.raises(ValueError):
        witt_basechange_check(ring, 3, 6)

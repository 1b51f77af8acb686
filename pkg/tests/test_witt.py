import pytest
from hypothesis import given, strategies as st

from frobsplit import witt
from frobsplit.fpoly import AmbientMismatch, PolyRing
from frobsplit.witt import (BasisEntry, GhostLift, WittVector, WnModPClass, WnModPModuleBasis,
                            canonical_form, class_equal, express_in_basis, recompose, section_s,
                            structural_polys, teichmuller, v_teich)

from conftest import polys

RINGS = {p: PolyRing(p, ("x", "y")) for p in (2, 3, 5)}


def witt_vectors(ring, n, max_deg=2, max_terms=3):
    return st.lists(polys(ring, max_deg, max_terms), min_size=n, max_size=n).map(
        lambda cs: WittVector(ring, cs))


def _int_poly(text_terms):
    return {tuple(e): c for e, c in text_terms}


# structural polynomials, variables ordered X_0..X_{n-1}, Y_0..Y_{n-1}

def test_s1_at_p2():
    sp = structural_polys(2, 2)
    assert sp.add[1] == {(0, 1, 0, 0): 1, (0, 0, 0, 1): 1, (1, 0, 1, 0): -1}


def test_p1_at_p2():
    sp = structural_polys(2, 2)
    assert sp.mul[1] == {(2, 0, 0, 1): 1, (0, 1, 2, 0): 1, (0, 1, 0, 1): 2}


@pytest.mark.parametrize("p", (3, 5))
def test_s1_general_p(p):
    from math import comb
    expected = {(0, 1, 0, 0): 1, (0, 0, 0, 1): 1}
    for i in range(1, p):
        expected[(i, 0, p - i, 0)] = -comb(p, i) // p
    assert structural_polys(p, 2).add[1] == expected


def test_identities():
    ring = RINGS[3]
    a = WittVector(ring, [ring.parse("x + y"), ring.parse("x^2")])
    assert a + witt.zero(ring, 2) == a
    assert a * witt.one(ring, 2) == a
    assert witt.zero(ring, 2).verschiebung() == witt.zero(ring, 2)
    assert witt.zero(ring, 2).mul_by_p() == witt.zero(ring, 2)


def test_mul_by_p_example():
    ring = RINGS[2]
    a = WittVector(ring, [ring.parse("x"), ring.parse("y")])
    assert a.mul_by_p() == WittVector(ring, [ring.zero(), ring.parse("x^2")])
    assert a + a == a.mul_by_p()


def test_ambient_and_length_mismatch():
    a = WittVector(RINGS[2], [RINGS[2].parse("x")] * 2)
    b = WittVector(RINGS[3], [RINGS[3].parse("x")] * 2)
    with pytest.raises(AmbientMismatch):
        a + b
    with pytest.raises(ValueError):
        a + WittVector(RINGS[2], [RINGS[2].parse("x")] * 3)


def test_dump_round_trip():
    ring = RINGS[5]
    a = WittVector(ring, [ring.parse("x + 2"), ring.parse("y^3"), ring.zero()])
    assert witt.parse_dump(witt.dump(a), ring) == a


@pytest.mark.parametrize("p", (2, 3, 5))
@pytest.mark.parametrize("n", (1, 2, 3))
@given(data=st.data())
def test_ghost_oracle(p, n, data):
    ring = RINGS[p]
    a = data.draw(witt_vectors(ring, n))
    b = data.draw(witt_vectors(ring, n))
    assert a + b == witt.ghost_binary(a, b, "+")
    assert a * b == witt.ghost_binary(a, b, "*")
    assert (a - b) + b == a


@pytest.mark.parametrize("p", (2, 3))
@pytest.mark.parametrize("n", (2, 3))
@given(data=st.data())
def test_frobenius_and_verschiebung(p, n, data):
    ring = RINGS[p]
    a = data.draw(witt_vectors(ring, n))
    r = data.draw(polys(ring, 2, 3))
    assert witt.ghost_frobenius(a) == a.frobenius().truncate(n - 1)
    assert a.verschiebung().frobenius() == a.mul_by_p() == a.frobenius().verschiebung()
    assert a.mul_by_p() == a.scalar(p)
    assert teichmuller(r, n).frobenius() == teichmuller(r.frobenius(), n)
    s = data.draw(polys(ring, 2, 3))
    assert teichmuller(r, n) * teichmuller(s, n) == teichmuller(r * s, n)


def test_ghost_is_lift_independent():
    ring = RINGS[3]
    a = WittVector(ring, [ring.parse("2*x + y"), ring.parse("x*y")])
    g = GhostLift(a)
    shifted = GhostLift(a)
    shifted.components = tuple({e: c + 3 for e, c in comp.terms.items()} for comp in a.comps)
    for i in range(2):
        assert g.ghost(i) == shifted.ghost(i)


def test_p_multiples_and_canonical_form():
    ring = PolyRing(2, ("x",))
    x = ring.parse("x")
    assert class_equal(WnModPClass(WittVector(ring, [ring.zero(), x * x])), WnModPClass(witt.zero(ring, 2)))
    c = canonical_form(WittVector(ring, [x, x * x + x]))
    assert c.rep == WittVector(ring, [x, x])
    assert class_equal(c, WnModPClass(WittVector(ring, [x, x * x + x])))


@given(data=st.data())
def test_canonical_form_idempotent(data):
    ring = RINGS[3]
    a = data.draw(witt_vectors(ring, 3, 4, 4))
    c = canonical_form(a)
    assert canonical_form(c).rep == c.rep
    assert class_equal(c, WnModPClass(a))


@pytest.mark.parametrize("p,n", [(2, 2), (3, 2), (2, 3)])
@given(data=st.data())
def test_section_is_ring_map(p, n, data):
    ring = RINGS[p]
    r, s = data.draw(polys(ring, 2, 3)), data.draw(polys(ring, 2, 3))
    assert section_s(r, n) * section_s(s, n) == section_s(r * s, n)
    assert section_s(r, n) + section_s(s, n) == section_s(r + s, n)
    assert witt.restriction_r(section_s(r, n)) == r.frobenius()
    a = data.draw(witt_vectors(ring, n))
    assert WnModPClass(a.frobenius()) == section_s(witt.restriction_r(a), n)


def test_section_of_one():
    ring = RINGS[2]
    assert section_s(ring.one(), 2) == WnModPClass(witt.one(ring, 2))


@pytest.mark.parametrize("p,n,d", [(2, 2, 1), (2, 2, 2), (3, 2, 1), (2, 3, 1), (3, 1, 2)])
def test_basis_size(p, n, d):
    ring = PolyRing(p, ("x", "y")[:d])
    assert len(WnModPModuleBasis(ring, n)) == p ** (n * d)


def test_express_examples():
    ring = PolyRing(2, ("x",))
    b1 = WnModPModuleBasis(ring, 1)
    assert express_in_basis(teichmuller(ring.parse("x^2"), 1), b1) == {BasisEntry(0, (0,)): ring.parse("x")}
    b2 = WnModPModuleBasis(ring, 2)
    got = express_in_basis(v_teich(1, ring.parse("x"), 2), b2)
    assert got == {BasisEntry(1, (1,)): ring.one()}


@pytest.mark.parametrize("p,n", [(2, 2), (3, 2), (2, 3)])
@given(data=st.data())
def test_express_round_trip(p, n, data):
    ring = RINGS[p]
    basis = WnModPModuleBasis(ring, n)
    a = data.draw(witt_vectors(ring, n, 5, 4))
    assert recompose(express_in_basis(a, basis), basis) == WnModPClass(a)


@given(data=st.data())
def test_action_is_linear(data):
    ring = RINGS[2]
    basis = WnModPModuleBasis(ring, 2)
    a = data.draw(witt_vectors(ring, 2, 4, 3))
    r = data.draw(polys(ring, 2, 2))
    coeffs = express_in_basis(a, basis)
    scaled = express_in_basis(witt.act(r, a), basis)
    expected = {b: r * c for b, c in coeffs.items() if not (r * c).is_zero()}
    assert {b: c for b, c in scaled.items() if not c.is_zero()} == expected


def test_self_check_runs():
    for p in (2, 3):
        witt.self_check(p, 3)

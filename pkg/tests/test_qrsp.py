import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from frobsplit import qrsp
from frobsplit.qrsp import (FiltrationOverflow, GammaElement, PDElement, PerfectPresentation,
                            PrecisionOverflow, conj_filtration_basis, frobenius_pullback_quotient,
                            graded_piece_map, pd_generator_power, pd_monomial, pd_mul, pd_power,
                            sign_identity_check, splitting_s, verify_filtered_iso)

P2 = PerfectPresentation(2, ("x",), ("x",))
P3 = PerfectPresentation(3, ("x",), ("x",))
P2XY = PerfectPresentation(2, ("x", "y"), ("x", "y"))
P3XY = PerfectPresentation(3, ("x", "y"), ("x",))


def fpow(pres, l):
    return pd_generator_power(pres, 0, l)


def test_pd_law_examples():
    assert pd_mul(fpow(P2, 1), fpow(P2, 1)).is_zero()
    assert pd_mul(fpow(P3, 1), fpow(P3, 1)) == fpow(P3, 2) * 2
    assert pd_mul(fpow(P3, 2), fpow(P3, 3)) == fpow(P3, 5)


def test_p_th_power_vanishes():
    x = P3.var(0)
    assert PDElement.scalar(x ** 3).is_zero()
    assert not PDElement.scalar(P3.monomial((Fraction(8, 3),))).is_zero()


def test_product_divided_power():
    # (a b)^[2] = a^2 b^[2] for a in P and b in I
    pres = P3XY
    a = pres.var(1) + pres.one()
    b = pres.var(0) * pres.monomial((Fraction(1, 3), 1))
    assert pd_power(a * b, 2) == pd_power(b, 2) * (a * a)


@pytest.mark.parametrize("pres", [P2, P3, P3XY], ids=["p2", "p3", "p3xy"])
@given(data=st.data())
def test_pd_axioms(pres, data):
    rng = random.Random(data.draw(st.integers(0, 10 ** 6)))
    x = pres.generator(0)
    u = x * pres.random_element(rng, terms=2, max_exp=1, depth=1)
    v = x * pres.random_element(rng, terms=2, max_exp=1, depth=1)
    a, b = data.draw(st.integers(0, pres.p)), data.draw(st.integers(0, pres.p))
    from math import comb
    assert pd_mul(pd_power(u, a), pd_power(u, b)) == pd_power(u, a + b) * comb(a + b, a)
    l = data.draw(st.integers(0, 2 * pres.p))
    expanded = PDElement(pres)
    for i in range(l + 1):
        expanded = expanded + pd_mul(pd_power(u, l - i), pd_power(v, i))
    assert pd_power(u + v, l) == expanded


def test_filtration_bounds():
    assert conj_filtration_basis(P2, 0) == [(0,), (1,)]
    assert conj_filtration_basis(P2, 1) == [(0,), (1,), (2,), (3,)]
    for n in range(3):
        assert set(conj_filtration_basis(P2XY, n)) <= set(conj_filtration_basis(P2XY, n + 1))
    for l in conj_filtration_basis(P3, 2):
        assert pd_monomial(P3, l).level() <= 2
    with pytest.raises(FiltrationOverflow):
        conj_filtration_basis(P2, 4)


def test_graded_piece_examples():
    g = GammaElement.basis(P2, (1,))
    assert graded_piece_map(g) == fpow(P2, 2)
    assert graded_piece_map(GammaElement.basis(P3, (1,))) == fpow(P3, 3) * 2
    assert graded_piece_map(GammaElement.basis(P3, (0,))) == PDElement.scalar(P3.one())


def test_quotient_examples():
    x = P2.var(0)
    assert frobenius_pullback_quotient(fpow(P2, 2) * x).is_zero()
    assert frobenius_pullback_quotient(fpow(P2, 1)).is_zero()
    for pres in (P2, P3):
        assert not frobenius_pullback_quotient(fpow(pres, pres.p)).is_zero()


def test_splitting_examples():
    x = P2.var(0)
    assert splitting_s(GammaElement.basis(P2, (1,))) == fpow(P2, 2)
    assert splitting_s(GammaElement.basis(P2, (1,)), lifts=(x + x * x,)) == fpow(P2, 2)
    assert splitting_s(GammaElement.basis(P2, (0,))) == PDElement.scalar(P2.one())
    with pytest.raises(ValueError):
        splitting_s(GammaElement.basis(P2, (1,)), lifts=(x + x.frobenius_inverse(),))


def test_coefficients_act_through_frobenius():
    r = P3XY.var(1)
    g = GammaElement(P3XY, {(1,): r})
    assert splitting_s(g) == splitting_s(GammaElement.basis(P3XY, (1,))) * r.frobenius()


@pytest.mark.parametrize("pres,n", [(P2, 3), (P3, 3), (P2XY, 2), (P3XY, 2)],
                         ids=["p2x", "p3x", "p2xy", "p3xy-x"])
def test_filtered_iso(pres, n):
    rep = verify_filtered_iso(pres, n)
    assert rep["ok"]
    assert [e["source_rank"] for e in rep["levels"]] == [e["expected_rank"] for e in rep["levels"]]


def test_filtered_iso_level_zero():
    rep = verify_filtered_iso(P2XY, 0)
    assert rep["ok"] and rep["levels"][0]["source_rank"] == 1


def test_lift_independence_many():
    rng = random.Random(7)
    basis = [(2, 0), (1, 1), (0, 2), (1, 0)]
    ref = {l: splitting_s(GammaElement.basis(P2XY, l)) for l in basis}
    for _ in range(20):
        lifts = tuple(a + P2XY.random_in_I_squared(rng) for a in P2XY.default_lifts())
        for l in basis:
            assert splitting_s(GammaElement.basis(P2XY, l), lifts=lifts) == ref[l]


def test_caps_and_precision():
    with pytest.raises(PrecisionOverflow):
        P2.monomial((Fraction(1, 32),))
    with pytest.raises(PrecisionOverflow):
        PerfectPresentation(2, ("x",), ("x",), precision=1).monomial((Fraction(1, 2),)).frobenius_inverse()
    with pytest.raises(FiltrationOverflow):
        verify_filtered_iso(P2, 4)
    with pytest.raises(FiltrationOverflow):
        fpow(P2, 8)
    with pytest.raises(ValueError):
        PerfectPresentation(2, ("x", "y", "z"), ("x", "y", "z"))


def test_sign_identity():
    rep = sign_identity_check(20)
    assert rep["ok"]
    rows = {(r["p"], r["k"]): r for r in rep["rows"]}
    assert rows[(2, 1)]["value_mod_p"] == 1
    assert rows[(3, 1)]["value_mod_p"] == 2
    from math import factorial
    assert factorial(10) // (25 * 2) == 72576 and rows[(5, 2)]["value_mod_p"] == 1
    with pytest.raises(ValueError):
        sign_identity_check(31)

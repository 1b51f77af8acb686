import dataclasses
import random

import pytest

from frobsplit import splitting, witt
from frobsplit.fpoly import HypersurfaceRing, PolyRing, poly
from frobsplit.splitting import (DegreeBoundError, SingularHypersurface, count_points_elliptic,
                                 cy_coefficient_criterion, fedder_membership, graded_splitting_search,
                                 quadric_sigma, quasi_f_split_height, required_degree_bound, verify_witness)

XYZ = ("x", "y", "z")
SS2 = "y^2*z + y*z^2 + x^3"
ORD2 = "y^2*z + x*y*z + x^3 + z^3"
SS3 = "y^2*z - x^3 + x*z^2"
ORD3 = "y^2*z - x^3 - x^2*z - z^3"


def hyper(text, p):
    f = poly(text, p, XYZ)
    return HypersurfaceRing(f.ring, f)


def test_cy_examples():
    assert cy_coefficient_criterion(poly(SS2, 2, XYZ)) == 0
    assert cy_coefficient_criterion(poly(ORD2, 2, XYZ)) == 1
    fermat = poly("x^3 + y^3 + z^3", 3, XYZ)
    assert cy_coefficient_criterion(fermat) == 0
    assert all(a % 3 == 0 for e in (fermat ** 2).terms for a in e)
    # every partial vanishes in characteristic 3, so there is no curve to count on
    assert not splitting.is_smooth_projective(fermat)


def test_cy_degree_mismatch():
    with pytest.raises(ValueError):
        cy_coefficient_criterion(poly("x^2 + y^2 + z^2", 3, XYZ))


def test_fedder_examples():
    assert fedder_membership(poly("x", 2))
    assert not fedder_membership(poly("x^2", 2))


def test_fedder_agrees_with_cy():
    rng = random.Random(5)
    for p in (2, 3, 5):
        ring = PolyRing(p, XYZ)
        for _ in range(20):
            f = ring.random(rng, max_terms=6, homogeneous=3)
            if f.is_zero():
                continue
            assert fedder_membership(f) == (cy_coefficient_criterion(f) != 0)


def test_quadric_examples():
    rep = quadric_sigma(2, 3)
    assert rep.f == poly("x0^2 + x1^2 + x2^2", 3, ("x0", "x1", "x2"))
    assert (rep.f ** 2).coefficient((2, 2, 0)) == 2
    assert rep.coefficient_in_sigma == rep.binomial == 2
    rep = quadric_sigma(3, 2)
    assert rep.f == poly("x0*x1 + x2*x3", 2, ("x0", "x1", "x2", "x3"))
    assert rep.sigma == rep.f * poly("x0*x1", 2, rep.f.ring.names)
    assert rep.coefficient_in_sigma == 1 and rep.splits
    assert quadric_sigma(2, 5).binomial == 1


@pytest.mark.parametrize("p", (2, 3, 5))
@pytest.mark.parametrize("n", (2, 3, 4))
def test_quadric_sections(p, n):
    rep = quadric_sigma(n, p)
    assert rep.sigma.degree() == (p - 1) * (n + 1)
    assert rep.degree_ok and rep.divisible and rep.splits
    assert rep.as_dict()["top_coefficient_in_f_power"] == rep.coefficient_in_f_power


def test_point_counts():
    assert count_points_elliptic(poly(SS2, 2, XYZ)) == 3
    n = count_points_elliptic(poly("y^2*z - x^3 - x*z^2 - z^3", 3, XYZ))
    assert 1 <= n <= 7


def test_singular_cubic_rejected():
    with pytest.raises(SingularHypersurface):
        count_points_elliptic(poly("y^2*z - x^3", 3, XYZ))


def test_point_count_invariant_under_coordinates():
    rng = random.Random(1)
    f = poly(ORD3, 3, XYZ)
    base = count_points_elliptic(f)
    seen = 0
    while seen < 20:
        M = [[rng.randrange(3) for _ in range(3)] for _ in range(3)]
        from frobsplit.linalg import inverse
        if inverse(M, 3) is None:
            continue
        seen += 1
        assert count_points_elliptic(splitting.linear_change(f, M), check_smooth=False) == base


def test_search_on_polynomial_ring():
    S = HypersurfaceRing(PolyRing(2, ("x",)))
    tau = graded_splitting_search(S, 1, required_degree_bound(S, 1))
    assert tau is not None and tau.unit_value() == S.ring.one()
    assert verify_witness(tau)["ok"]


def test_search_examples():
    D = 3
    assert graded_splitting_search(hyper(ORD2, 2), 1, D) is not None
    assert graded_splitting_search(hyper(SS2, 2), 1, D) is None
    tau = graded_splitting_search(hyper(SS2, 2), 2, D)
    assert tau is not None and verify_witness(tau)["ok"]


def test_degree_bound_too_small():
    with pytest.raises(DegreeBoundError):
        graded_splitting_search(hyper(SS2, 2), 2, 1)


@pytest.mark.parametrize("p,text,height", [(2, ORD2, 1), (2, SS2, 2), (3, ORD3, 1), (3, SS3, 2)])
def test_heights(p, text, height):
    S = hyper(text, p)
    rep = quasi_f_split_height(S, 2, required_degree_bound(S, 2))
    assert rep.height == height
    assert rep.witness_check["ok"]
    assert rep.monotone in (True, None)
    if height == 2:
        assert rep.feasible[1] is False


def test_quartic_not_split_at_small_length():
    S = hyper("x^4 + y^4 + z^4", 3)
    rep = quasi_f_split_height(S, 1, required_degree_bound(S, 1))
    assert rep.exceeds


def test_corrupted_witness_is_caught():
    S = hyper(SS2, 2)
    tau = graded_splitting_search(S, 2, 3)
    bad = dict(tau.values)
    victim = next(b for b in sorted(bad, key=lambda b: (b.level, b.exps)) if b != tau.basis.unit())
    bad[victim] = bad[victim] + S.ring.parse("x")
    report = verify_witness(dataclasses.replace(tau, values=bad))
    assert not report["ok"]


@pytest.mark.parametrize("p,n", [(2, 1), (2, 2), (3, 2)])
def test_section_reduction_lemma(p, n):
    # tau(s(r)) = r * tau([1]) for any S-linear tau, checked on 100 samples
    text = SS2 if p == 2 else SS3
    S = hyper(text, p)
    tau = graded_splitting_search(S, n, required_degree_bound(S, n))
    if tau is None:
        tau = graded_splitting_search(S, n + 1, required_degree_bound(S, n + 1))
        n += 1
    rng = random.Random(p * 10 + n)
    for _ in range(100):
        r = S.ring.random(rng, max_terms=2, homogeneous=rng.randrange(3))
        lhs = tau.evaluate(witt.section_s(r, n, S.ring).rep)
        assert lhs == S.reduce(r * tau.unit_value())


def test_relation_generators_vanish_in_quotient():
    S = hyper(SS3, 3)
    for i, m, gen in splitting.relation_generators(S, 2):
        assert witt.WittVector(S, gen.comps).is_zero()

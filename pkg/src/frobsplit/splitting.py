"""F-splittings and quasi-F-splittings of graded hypersurface rings.

The search works on the cone S = F_p[x_0..x_d]/(f).  F_*W_n(P)/p is free over
the polynomial ring P on the entries of :class:`WnModPModuleBasis`; its
quotient F_*W_n(S)/p is cut out by the P-submodule generated by the finitely
many elements V^i([f x^m]) with 0 <= m_j < p^(i+1).  A degree-0 S-linear
map is therefore a choice of values on integral-degree basis entries that
kills those generators, and finding one with tau([1]) = 1 is a linear
feasibility problem over F_p.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg
from .fpoly import FpPoly, HypersurfaceRing, PolyRing, grlex_key, reduce_mod_f
from .witt import (
    BasisEntry,
    WittVector,
    WnModPModuleBasis,
    act,
    express_in_basis,
    teichmuller,
    v_teich,
)

MAX_SEARCH_LENGTH = 3


class DegreeBoundError(ValueError):
    """The verification degree bound does not reach every generator or relation."""


class SingularHypersurface(ValueError):
    pass


# -- coefficient criteria -----------------------------------------------------

def cy_coefficient_criterion(f: FpPoly) -> int:
    """Coefficient of (x_0...x_n)^(p-1) in f^(p-1); for plane cubics, the Hasse invariant."""
    d = f.ring.nvars
    if not f.is_homogeneous() or f.degree() != d:
        raise ValueError(f"need a homogeneous form of degree {d} in {d} variables, "
                         f"got degree {f.degree()}")
    p = f.p
    return (f ** (p - 1)).coefficient((p - 1,) * d)


def fedder_membership(f: FpPoly) -> bool:
    """True iff f^(p-1) has a monomial with every exponent <= p-1."""
    p = f.p
    return any(all(a <= p - 1 for a in e) for e in (f ** (p - 1)).terms)


def divides(f: FpPoly, g: FpPoly) -> bool:
    return reduce_mod_f(g, HypersurfaceRing(f.ring, f)).is_zero()


@dataclass
class QuadricReport:
    p: int
    n: int
    f: FpPoly
    sigma: FpPoly
    degree_ok: bool
    divisible: bool
    coefficient_in_sigma: int
    coefficient_in_f_power: int
    binomial: int | None

    @property
    def splits(self) -> bool:
        return self.degree_ok and self.divisible and self.coefficient_in_sigma != 0

    def as_dict(self):
        return {
            "f": str(self.f),
            "sigma": str(self.sigma),
            "sigma_degree": self.sigma.degree(),
            "degree_ok": self.degree_ok,
            "f_power_divides_sigma": self.divisible,
            "top_coefficient_in_sigma": self.coefficient_in_sigma,
            "top_coefficient_in_f_power": self.coefficient_in_f_power,
            "binomial": self.binomial,
            "splits": self.splits,
        }


def standard_quadric(n: int, p: int) -> FpPoly:
    """Normal form of a smooth quadric in P^n (n+1 variables x0..xn)."""
    ring = PolyRing(p, tuple(f"x{i}" for i in range(n + 1)))
    x = ring.gens()
    if p != 2:
        return sum((xi * xi for xi in x), ring.zero())
    if n % 2 == 1:
        return sum((x[i] * x[i + 1] for i in range(0, n, 2)), ring.zero())
    return x[0] * x[0] + sum((x[i] * x[i + 1] for i in range(1, n, 2)), ring.zero())


def quadric_sigma(n: int, p: int) -> QuadricReport:
    """The splitting section sigma of degree (p-1)(n+1) for the standard quadric."""
    if n < 2:
        raise ValueError("quadric_sigma needs n >= 2")
    f = standard_quadric(n, p)
    ring = f.ring
    x = ring.gens()
    if p == 2:
        sigma = f
        for i in range(n - 1):
            sigma = sigma * x[i]
    else:
        tail = ring.one()
        for i in range(2, n + 1):
            tail = tail * x[i]
        sigma = f ** (p - 1) * tail ** (p - 1)
    top = (p - 1,) * (n + 1)
    binom = math.comb(p - 1, (p - 1) // 2) % p if p != 2 else None
    return QuadricReport(
        p=p, n=n, f=f, sigma=sigma,
        degree_ok=sigma.is_homogeneous() and sigma.degree() == (p - 1) * (n + 1),
        divisible=divides(f ** (p - 1), sigma),
        coefficient_in_sigma=sigma.coefficient(top),
        coefficient_in_f_power=(f ** (p - 1)).coefficient(top),
        binomial=binom,
    )


# -- smoothness and point counts -----------------------------------------------

def is_smooth_projective(f: FpPoly) -> bool:
    """Jacobian criterion: f and its partials have no common projective zero over F_p-bar."""
    import sympy

    names = f.ring.names
    syms = sympy.symbols(names)
    if len(names) == 1:
        syms = (syms,) if not isinstance(syms, tuple) else syms

    def to_sympy(g):
        return sum((c * sympy.Mul(*[s**a for s, a in zip(syms, e)]) for e, c in g.terms.items()),
                   sympy.Integer(0))

    gens = [f] + [f.derivative(i) for i in range(f.ring.nvars)]
    polys = [to_sympy(g) for g in gens if not g.is_zero()]
    gb = sympy.groebner(polys, *syms, modulus=f.p, order="grevlex")
    leads = [sympy.Poly(g, *syms).monoms(order="grevlex")[0] for g in gb.exprs]
    for i in range(len(syms)):
        if not any(m[i] > 0 and sum(m) == m[i] for m in leads):
            return False
    return True


def projective_points(nvars: int, p: int):
    for lead in range(nvars):
        for tail in itertools.product(range(p), repeat=nvars - lead - 1):
            yield (0,) * lead + (1,) + tail


def count_points_elliptic(f: FpPoly, check_smooth: bool = True) -> int:
    """Number of F_p-points on the plane cubic {f = 0} by enumeration."""
    if f.ring.nvars != 3 or not f.is_homogeneous() or f.degree() != 3:
        raise ValueError("expected a homogeneous cubic in three variables")
    if check_smooth and not is_smooth_projective(f):
        raise SingularHypersurface(f"cubic {f} is singular")
    return sum(1 for pt in projective_points(3, f.p) if f.evaluate(pt) == 0)


def trace_of_frobenius(f: FpPoly) -> int:
    return f.p + 1 - count_points_elliptic(f)


def is_supersingular(f: FpPoly) -> bool:
    return trace_of_frobenius(f) % f.p == 0


def linear_change(f: FpPoly, matrix) -> FpPoly:
    """f(M x) for an invertible matrix M over F_p."""
    ring = f.ring
    x = ring.gens()
    images = [sum((x[j].scale(matrix[i][j]) for j in range(ring.nvars)), ring.zero())
              for i in range(ring.nvars)]
    return f.substitute(images)


# -- graded search --------------------------------------------------------------

@dataclass
class SplittingCandidate:
    """Degree-0 map F_*W_n(S)/p -> S given by values on basis entries.

    Entries absent from ``values`` map to 0.
    """

    S: HypersurfaceRing
    n: int
    basis: WnModPModuleBasis
    values: dict
    degree_bound: int

    def __call__(self, w: WittVector) -> FpPoly:
        return self.evaluate(w)

    def evaluate(self, w: WittVector) -> FpPoly:
        if w.S.f is not None:
            w = WittVector(self.S.ring, w.comps)
        out = self.S.ring.zero()
        for b, c in express_in_basis(w, self.basis).items():
            v = self.values.get(b)
            if v is not None:
                out = out + c * v
        return reduce_mod_f(out, self.S)

    def unit_value(self) -> FpPoly:
        return reduce_mod_f(self.values.get(self.basis.unit(), self.S.ring.zero()), self.S)

    def nonzero_generators(self):
        return {str(b): str(v) for b, v in sorted(self.values.items(),
                                                   key=lambda t: (t[0].level, t[0].exps))
                if not v.is_zero()}


def relation_generators(S: HypersurfaceRing, n: int):
    """P-module generators V^i([f x^m]) of ker(F_*W_n(P)/p -> F_*W_n(S)/p)."""
    if S.f is None:
        return []
    ring, p = S.ring, S.p
    out = []
    for i in range(n):
        for m in itertools.product(range(p ** (i + 1)), repeat=ring.nvars):
            out.append((i, m, v_teich(i, S.f * ring.monomial(m), n, ring)))
    return out


def generator_degree(S: HypersurfaceRing, i: int, m) -> Fraction:
    return Fraction(S.f.degree() + sum(m), S.p ** (i + 1))


def required_degree_bound(S: HypersurfaceRing, n: int) -> int:
    """Smallest bound covering every integral-degree basis entry and relation."""
    basis_max = max((b.degree(S.p) for b in WnModPModuleBasis(S.ring, n)
                     if b.degree(S.p).denominator == 1), default=0)
    rel_max = 0
    if S.f is not None:
        d = S.ring.nvars
        for i in range(n):
            top = Fraction(S.f.degree() + d * (S.p ** (i + 1) - 1), S.p ** (i + 1))
            rel_max = max(rel_max, math.floor(top))
    return int(max(basis_max, rel_max))


def _check_search_input(S: HypersurfaceRing, n: int, D: int):
    if not 1 <= n <= MAX_SEARCH_LENGTH:
        raise ValueError(f"search length n={n} outside 1..{MAX_SEARCH_LENGTH}")
    if S.f is not None and not S.f.is_homogeneous():
        raise ValueError("graded search needs a homogeneous defining equation")
    if any(w != 1 for w in S.grading):
        raise ValueError("graded search needs the standard grading")
    need = required_degree_bound(S, n)
    if D < need:
        raise DegreeBoundError(f"degree bound {D} is below the {need} needed to contain "
                               f"all generators and relations for n={n}")


def graded_splitting_search(S: HypersurfaceRing, n: int, D: int):
    """A verified-shape degree-0 S-linear tau with tau([1]) = 1, or None if infeasible."""
    _check_search_input(S, n, D)
    ring, p = S.ring, S.p
    basis = WnModPModuleBasis(ring, n)

    # unknowns: coefficients of tau(b) on normal monomials of S_{deg b}
    unknowns = []
    offsets = {}
    for b in basis:
        deg = b.degree(p)
        if deg.denominator != 1:
            continue
        offsets[b] = len(unknowns)
        for mono in S.normal_monomials(int(deg)):
            unknowns.append((b, mono))

    rows = []
    rhs = []
    unit = basis.unit()
    unit_row = [0] * len(unknowns)
    unit_row[offsets[unit]] = 1
    rows.append(unit_row)
    rhs.append(1)

    for i, m, gen in relation_generators(S, n):
        deg = generator_degree(S, i, m)
        if deg.denominator != 1:
            continue
        target = S.normal_monomials(int(deg))
        tindex = {e: k for k, e in enumerate(target)}
        block = [[0] * len(unknowns) for _ in target]
        for b, c in express_in_basis(gen, basis).items():
            if b not in offsets:
                continue
            for k, mono in enumerate(S.normal_monomials(int(b.degree(p)))):
                img = reduce_mod_f(c * ring.monomial(mono), S)
                for e, v in img.terms.items():
                    block[tindex[e]][offsets[b] + k] = (block[tindex[e]][offsets[b] + k] + v) % p
        rows.extend(block)
        rhs.extend([0] * len(target))

    sol = linalg.solve(rows, rhs, p)
    if sol is None:
        return None
    values: dict = {}
    for (b, mono), c in zip(unknowns, sol):
        if c:
            values[b] = values.get(b, ring.zero()) + ring.monomial(mono, c)
    return SplittingCandidate(S, n, basis, values, D)


def verify_witness(tau: SplittingCandidate, samples: int = 50, seed: int = 0) -> dict:
    """Re-check a witness with fresh Witt arithmetic rather than the solver's matrices."""
    rng = random.Random(seed)
    S, n, ring, p = tau.S, tau.n, tau.S.ring, tau.S.p
    report = {"unit": tau.evaluate(teichmuller(ring.one(), n)) == ring.one()}

    report["relations"] = all(tau.evaluate(gen).is_zero() for _, _, gen in relation_generators(S, n))

    kernel_ok = True
    if S.f is not None:
        for _ in range(samples):
            i = rng.randrange(n)
            g = ring.random(rng, max_deg=2, max_terms=3)
            if not tau.evaluate(v_teich(i, S.f * g, n, ring)).is_zero():
                kernel_ok = False
                break
    report["random_kernel_elements"] = kernel_ok

    linear_ok = True
    entries = [b for b in tau.basis if b.degree(p) <= tau.degree_bound]
    for k in range(samples):
        r = ring.random(rng, max_deg=1, max_terms=2)
        for b in entries[k::samples] if len(entries) > samples else entries:
            w = tau.basis.element(b)
            lhs = tau.evaluate(act(r, w))
            rhs = reduce_mod_f(r * tau.evaluate(w), S)
            if lhs != rhs:
                linear_ok = False
                break
        if not linear_ok:
            break
    report["linearity"] = linear_ok
    report["ok"] = all(report.values())
    return report


@dataclass
class HeightReport:
    height: int | None
    nmax: int
    degree_bound: int
    witness: SplittingCandidate | None = None
    feasible: dict = field(default_factory=dict)
    witness_check: dict | None = None
    monotone: bool | None = None

    @property
    def exceeds(self) -> bool:
        return self.height is None

    def as_dict(self):
        return {
            "height": self.height if self.height is not None else f"exceeds {self.nmax}",
            "nmax": self.nmax,
            "degree_bound": self.degree_bound,
            "feasible": {str(k): v for k, v in sorted(self.feasible.items())},
            "witness_generators": self.witness.nonzero_generators() if self.witness else None,
            "witness_check": self.witness_check,
            "monotone": self.monotone,
        }


def quasi_f_split_height(S: HypersurfaceRing, nmax: int, D: int, check_smooth: bool = True,
                         verify: bool = True) -> HeightReport:
    """Least n <= nmax admitting a degree-0 n-quasi-F-splitting of the cone."""
    if S.f is not None and check_smooth and not is_smooth_projective(S.f):
        raise SingularHypersurface(f"{S.f} is singular; splitting criteria need smooth input")
    nmax = min(nmax, MAX_SEARCH_LENGTH)
    report = HeightReport(height=None, nmax=nmax, degree_bound=D)
    for n in range(1, nmax + 1):
        tau = graded_splitting_search(S, n, D)
        report.feasible[n] = tau is not None
        if tau is not None:
            report.height = n
            report.witness = tau
            if verify:
                report.witness_check = verify_witness(tau)
            if n + 1 <= MAX_SEARCH_LENGTH and D >= required_degree_bound(S, n + 1):
                nxt = graded_splitting_search(S, n + 1, D)
                report.feasible[n + 1] = nxt is not None
                report.monotone = nxt is not None
            break
    return report

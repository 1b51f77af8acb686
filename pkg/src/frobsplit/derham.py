"""de Rham complexes of polynomial rings over F_p.

Everything is multigraded by Z^d (x_j and dx_j both have multidegree e_j), so
each multigraded piece of Omega^i has dimension at most binom(d, i) and all
cohomology computations are small exact linear algebra.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from math import comb

from . import linalg
from .fpoly import AmbientMismatch, FpPoly, PolyRing
from .witt import WnModPModuleBasis, act, express_in_basis


class NotClosed(ValueError):
    pass


def _merge_sign(J, K):
    """Sign and sorted union of dx_J ^ dx_K, or (0, None) if they overlap."""
    if set(J) & set(K):
        return 0, None
    seq = list(J) + list(K)
    inversions = sum(1 for a in range(len(seq)) for b in range(a + 1, len(seq)) if seq[a] > seq[b])
    return (-1) ** inversions, tuple(sorted(seq))


class DifferentialForm:
    """sum_J c_J dx_J with J strictly increasing."""

    __slots__ = ("ring", "degree", "terms")

    def __init__(self, ring: PolyRing, degree: int, terms: dict | None = None):
        self.ring = ring
        self.degree = degree
        clean = {}
        for J, c in (terms or {}).items():
            J = tuple(J)
            if len(J) != degree or list(J) != sorted(set(J)):
                raise ValueError(f"index tuple {J} is not strictly increasing of length {degree}")
            if c.ring != ring:
                raise AmbientMismatch("coefficient in a different ring")
            if not c.is_zero():
                clean[J] = c
        self.terms = clean

    @classmethod
    def function(cls, f: FpPoly) -> "DifferentialForm":
        return cls(f.ring, 0, {(): f})

    @classmethod
    def dx(cls, ring: PolyRing, *idx) -> "DifferentialForm":
        form = cls(ring, 0, {(): ring.one()})
        for j in idx:
            form = form.wedge(cls(ring, 1, {(j,): ring.one()}))
        return form

    @classmethod
    def monomial(cls, ring: PolyRing, a, J, c: int = 1) -> "DifferentialForm":
        return cls(ring, len(J), {tuple(J): ring.monomial(a, c)})

    @property
    def p(self):
        return self.ring.p

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, DifferentialForm):
            return NotImplemented
        if self.is_zero() and other.is_zero():
            return self.ring == other.ring
        return self.ring == other.ring and self.degree == other.degree and self.terms == other.terms

    def __hash__(self):
        return hash((self.degree, frozenset(self.terms.items())))

    def __repr__(self):
        return f"DifferentialForm({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        names = self.ring.names
        parts = []
        for J in sorted(self.terms):
            c = self.terms[J]
            wedge = "^".join(f"d{names[j]}" for j in J)
            if not J:
                parts.append(str(c))
            elif c == 1:
                parts.append(wedge)
            else:
                parts.append(f"({c}) {wedge}")
        return " + ".join(parts)

    def _check(self, other):
        if other.ring != self.ring:
            raise AmbientMismatch("forms over different rings")

    def __add__(self, other):
        self._check(other)
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if other.degree != self.degree:
            raise ValueError("adding forms of different degrees")
        t = dict(self.terms)
        for J, c in other.terms.items():
            t[J] = t[J] + c if J in t else c
        return DifferentialForm(self.ring, self.degree, t)

    def __neg__(self):
        return DifferentialForm(self.ring, self.degree, {J: -c for J, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, f) -> "DifferentialForm":
        if isinstance(f, int):
            f = self.ring.const(f)
        return DifferentialForm(self.ring, self.degree, {J: f * c for J, c in self.terms.items()})

    def wedge(self, other) -> "DifferentialForm":
        self._check(other)
        t: dict = {}
        for J, a in self.terms.items():
            for K, b in other.terms.items():
                sign, L = _merge_sign(J, K)
                if sign:
                    c = (a * b).scale(sign)
                    t[L] = t[L] + c if L in t else c
        return DifferentialForm(self.ring, self.degree + other.degree, t)

    __xor__ = wedge

    def d(self) -> "DifferentialForm":
        t: dict = {}
        for J, c in self.terms.items():
            for k in range(self.ring.nvars):
                dc = c.derivative(k)
                if dc.is_zero():
                    continue
                sign, L = _merge_sign((k,), J)
                if sign:
                    v = dc.scale(sign)
                    t[L] = t[L] + v if L in t else v
        return DifferentialForm(self.ring, self.degree + 1, t)

    def is_closed(self) -> bool:
        return self.d().is_zero()

    def monomial_terms(self):
        """Yield (a, J, c) for every monomial term c x^a dx_J."""
        for J, c in self.terms.items():
            for a, v in c.terms.items():
                yield a, J, v

    def components(self) -> dict:
        """Split into multigraded pieces: {multidegree: {(a, J): c}}."""
        out: dict = {}
        for a, J, c in self.monomial_terms():
            mu = multidegree(a, J)
            out.setdefault(mu, {})[(a, J)] = c
        return out

    def total_degree(self) -> int:
        return max((sum(a) + len(J) for a, J, _ in self.monomial_terms()), default=-1)


def d(form: DifferentialForm) -> DifferentialForm:
    return form.d()


def wedge(a: DifferentialForm, b: DifferentialForm) -> DifferentialForm:
    return a.wedge(b)


def multidegree(a, J):
    mu = list(a)
    for j in J:
        mu[j] += 1
    return tuple(mu)


def from_components(ring: PolyRing, degree: int, coords: dict) -> DifferentialForm:
    t: dict = {}
    for (a, J), c in coords.items():
        t.setdefault(J, {})[a] = c
    return DifferentialForm(ring, degree, {J: FpPoly(ring, v) for J, v in t.items()})


# -- multigraded pieces ------------------------------------------------------

def monomial_forms(d_vars: int, i: int, mu):
    """Basis (a, J) of Omega^i in multidegree mu."""
    out = []
    for J in itertools.combinations(range(d_vars), i):
        a = list(mu)
        for j in J:
            a[j] -= 1
        if min(a, default=0) >= 0:
            out.append((tuple(a), J))
    return out


def forms_of_total_degree(d_vars: int, i: int, k: int):
    """Monomial i-forms x^a dx_J with |a| + |J| = k."""
    out = []
    for J in itertools.combinations(range(d_vars), i):
        if k - i < 0:
            continue
        for a in _exponents_of_degree(d_vars, k - i):
            out.append((a, J))
    return out


def _exponents_of_degree(d_vars, k):
    for cut in itertools.combinations(range(k + d_vars - 1), d_vars - 1):
        prev = -1
        e = []
        for c in cut:
            e.append(c - prev - 1)
            prev = c
        e.append(k + d_vars - 1 - prev - 1)
        yield tuple(e)


def multidegrees_of_total(d_vars: int, k: int):
    return list(_exponents_of_degree(d_vars, k))


def d_matrix(p: int, d_vars: int, i: int, mu):
    """Matrix of d: Omega^i_mu -> Omega^(i+1)_mu in the monomial bases."""
    src = monomial_forms(d_vars, i, mu)
    tgt = monomial_forms(d_vars, i + 1, mu)
    index = {t: k for k, t in enumerate(tgt)}
    M = [[0] * len(src) for _ in tgt]
    for col, (a, J) in enumerate(src):
        for k in range(d_vars):
            if a[k] == 0 or a[k] % p == 0:
                continue
            sign, L = _merge_sign((k,), J)
            if not sign:
                continue
            b = list(a)
            b[k] -= 1
            row = index[(tuple(b), L)]
            M[row][col] = (M[row][col] + sign * a[k]) % p
    return M, src, tgt


def cohomology_dim(p: int, d_vars: int, i: int, mu) -> int:
    """dim H^i of the de Rham complex in multidegree mu, by ranks."""
    n_i = len(monomial_forms(d_vars, i, mu))
    out_rank = linalg.rank(d_matrix(p, d_vars, i, mu)[0], p) if n_i else 0
    in_rank = linalg.rank(d_matrix(p, d_vars, i - 1, mu)[0], p) if i > 0 else 0
    return n_i - out_rank - in_rank


def cartier_classes(p: int, d_vars: int, i: int, mu):
    """The classes x^(pa) prod_{j in T} x_j^(p-1) dx_j sitting in multidegree mu.

    Returned as (a, T) so that the class is C^{-1}(x^a dx_T).
    """
    if any(m % p for m in mu):
        return []
    half = [m // p for m in mu]
    out = []
    for T in itertools.combinations(range(d_vars), i):
        a = list(half)
        for j in T:
            a[j] -= 1
        if min(a, default=0) >= 0:
            out.append((tuple(a), T))
    return out


def class_vector(p: int, a, T):
    """Monomial coordinates of C^{-1}(x^a dx_T) = x^(pa + (p-1)1_T) dx_T."""
    e = [p * x for x in a]
    for j in T:
        e[j] += p - 1
    return (tuple(e), tuple(T))


def cohomology_coordinates(p: int, d_vars: int, i: int, mu, coords: dict):
    """Write a closed multigraded piece as sum c_T class_T + d(xi).

    Returns {(a, T): c}; raises NotClosed when no such expression exists.
    """
    classes = cartier_classes(p, d_vars, i, mu)
    basis = monomial_forms(d_vars, i, mu)
    index = {b: k for k, b in enumerate(basis)}
    cols = []
    for a, T in classes:
        v = [0] * len(basis)
        v[index[class_vector(p, a, T)]] = 1
        cols.append(v)
    if i > 0:
        M, src, _ = d_matrix(p, d_vars, i - 1, mu)
        for c in range(len(src)):
            cols.append([M[r][c] for r in range(len(basis))])
    b = [0] * len(basis)
    for key, c in coords.items():
        b[index[key]] = c % p
    A = [[cols[c][r] for c in range(len(cols))] for r in range(len(basis))]
    sol = linalg.solve(A, b, p) if cols else (None if any(b) else [])
    if sol is None:
        raise NotClosed(f"piece of multidegree {mu} is not a cocycle")
    return {cl: c for cl, c in zip(classes, sol[:len(classes)]) if c}


def classes_independent(p: int, d_vars: int, i: int, mu) -> bool:
    """The Cartier classes are independent modulo exact forms in multidegree mu."""
    classes = cartier_classes(p, d_vars, i, mu)
    if not classes:
        return True
    basis = monomial_forms(d_vars, i, mu)
    index = {b: k for k, b in enumerate(basis)}
    exact = []
    if i > 0:
        M, src, _ = d_matrix(p, d_vars, i - 1, mu)
        exact = [[M[r][c] for r in range(len(basis))] for c in range(len(src))]
    vecs = []
    for a, T in classes:
        v = [0] * len(basis)
        v[index[class_vector(p, a, T)]] = 1
        vecs.append(v)
    r_exact = linalg.rank(exact, p) if exact else 0
    return linalg.rank(exact + vecs, p) == r_exact + len(classes)


# -- Cartier operator ---------------------------------------------------------

def cartier_inverse(eta: DifferentialForm) -> DifferentialForm:
    """a dx_J -> a^p prod_{j in J} x_j^(p-1) dx_j."""
    ring, p = eta.ring, eta.p
    t: dict = {}
    for J, c in eta.terms.items():
        w = ring.one()
        for j in J:
            w = w * ring.var(j) ** (p - 1)
        t[J] = c.frobenius() * w
    return DifferentialForm(ring, eta.degree, t)


def cartier(omega: DifferentialForm) -> DifferentialForm:
    """The Cartier operator on a closed form, via per-multidegree linear algebra."""
    ring, p = omega.ring, omega.p
    if not omega.is_closed():
        raise NotClosed("Cartier operator needs a closed form")
    coords: dict = {}
    for mu, piece in omega.components().items():
        for (a, T), c in cohomology_coordinates(p, ring.nvars, omega.degree, mu, piece).items():
            coords[(a, T)] = (coords.get((a, T), 0) + c) % p
    return from_components(ring, omega.degree, coords)


def is_exact(omega: DifferentialForm) -> bool:
    return omega.is_closed() and cartier(omega).is_zero()


# -- Frobenius lifts -----------------------------------------------------------

@dataclass(frozen=True)
class FrobeniusLift:
    """x_i -> x_i^p + p g_i; ``corrections`` are the g_i mod p."""

    ring: PolyRing
    corrections: tuple

    @classmethod
    def canonical(cls, ring: PolyRing) -> "FrobeniusLift":
        return cls(ring, tuple(ring.zero() for _ in range(ring.nvars)))

    @classmethod
    def parse(cls, ring: PolyRing, text: str) -> "FrobeniusLift":
        """``"g1=x^2, g2=0"``; unspecified g_i are zero, indices start at 1."""
        g = [ring.zero() for _ in range(ring.nvars)]
        for part in filter(None, (s.strip() for s in text.split(","))):
            name, _, expr = part.partition("=")
            name = name.strip()
            if not name.startswith("g") or not name[1:].isdigit():
                raise ValueError(f"bad lift assignment {part!r}")
            k = int(name[1:]) - 1
            if not 0 <= k < ring.nvars:
                raise ValueError(f"lift index {k + 1} out of range")
            g[k] = ring.parse(expr)
        return cls(ring, tuple(g))

    def zeta_dx(self, j: int) -> DifferentialForm:
        ring, p = self.ring, self.ring.p
        base = DifferentialForm(ring, 1, {(j,): ring.var(j) ** (p - 1)})
        return base + DifferentialForm.function(self.corrections[j]).d()

    def zeta(self, eta: DifferentialForm) -> DifferentialForm:
        """Lambda^i zeta: a dx_J -> a^p zeta(dx_j1) ^ ... ^ zeta(dx_ji)."""
        ring = self.ring
        if eta.ring != ring:
            raise AmbientMismatch("form and lift over different rings")
        total = DifferentialForm(ring, eta.degree)
        cache = {j: self.zeta_dx(j) for j in range(ring.nvars)}
        for J, c in eta.terms.items():
            w = DifferentialForm.function(c.frobenius())
            for j in J:
                w = w.wedge(cache[j])
            total = total + w
        return total


def lift_splitting_zeta(lift: FrobeniusLift):
    return lift.zeta


# -- quasi-isomorphism checks -------------------------------------------------------

def _class_matrix(p, d_vars, i, images):
    """Cohomology coordinates of closed forms, as a list of dicts."""
    out = []
    for omega in images:
        coords: dict = {}
        for mu, piece in omega.components().items():
            for cl, c in cohomology_coordinates(p, d_vars, i, mu, piece).items():
                coords[cl] = (coords.get(cl, 0) + c) % p
        out.append({k: v for k, v in coords.items() if v})
    return out


def _cohomology_dim_total(p, d_vars, i, k):
    return sum(cohomology_dim(p, d_vars, i, mu) for mu in multidegrees_of_total(d_vars, k))


def _bidegree_report(p, d_vars, i, k, sources, images):
    closed = all(w.is_closed() for w in images)
    target_dim = _cohomology_dim_total(p, d_vars, i, p * k)
    entry = {"i": i, "k": k, "source_dim": len(sources), "target_dim": target_dim,
             "closed": closed, "rank": 0, "bijective": False, "induces_cartier_inverse": False}
    if not closed:
        return entry
    coords = _class_matrix(p, d_vars, i, images)
    targets = sorted({cl for c in coords for cl in c})
    expected = [(a, J) for a, J in sources]
    if targets:
        M = [[c.get(cl, 0) for c in coords] for cl in targets]
        entry["rank"] = linalg.rank(M, p)
    entry["bijective"] = (entry["rank"] == len(sources) == target_dim
                          and all(sum(a) + len(T) == k for a, T in targets))
    entry["induces_cartier_inverse"] = all(c == {src: 1} for c, src in zip(coords, expected))
    return entry


def verify_total_splitting(lift: FrobeniusLift, D: int) -> dict:
    """Check that sum_i Lambda^i zeta is a quasi-isomorphism in each bidegree (i, k <= D)."""
    ring = lift.ring
    p, dv = ring.p, ring.nvars
    if D < p:
        raise ValueError(f"degree cap {D} is below p={p}; nothing meaningful to check")
    if dv > 3:
        raise ValueError("verify_total_splitting supports at most 3 variables")
    entries = []
    for i in range(dv + 2):
        for k in range(D + 1):
            sources = forms_of_total_degree(dv, i, k)
            if i > dv:
                entries.append({"i": i, "k": k, "source_dim": 0,
                                "target_dim": 0, "closed": True, "rank": 0,
                                "bijective": True, "induces_cartier_inverse": True})
                continue
            images = [lift.zeta(DifferentialForm.monomial(ring, a, J)) for a, J in sources]
            entries.append(_bidegree_report(p, dv, i, k, sources, images))
    return {
        "p": p, "vars": list(ring.names), "degree_cap": D,
        "lift": [str(g) for g in lift.corrections],
        "bidegrees": entries,
        "quasi_isomorphism": all(e["bijective"] and e["closed"] for e in entries),
        "induces_cartier_inverse": all(e["induces_cartier_inverse"] for e in entries),
    }


def fsplit_composite(tau, lift: FrobeniusLift, D: int, verify: bool = True) -> dict:
    """Chain-level composite  Omega^i -> M (x) Omega^i -> M (x) F_*Omega -> F_*Omega.

    M = F_*W_n(R)/p with its basis; the middle arrow is the M-linear extension
    of Lambda^i zeta and the last one is tau (x) id, where R acts on F_*Omega
    through p-th powers.
    """
    ring = lift.ring
    p, dv = ring.p, ring.nvars
    if tau.S.f is not None or tau.S.ring != ring:
        raise ValueError("fsplit_composite needs tau on the same polynomial ring")
    if verify and tau.unit_value() != ring.one():
        raise ValueError("tau does not split the section: tau([1]) != 1")
    unit_coeffs = express_in_basis(tau.basis.element(tau.basis.unit()), tau.basis)

    def composite(eta):
        # s(1) (x) eta, then Psi, then tau (x) id
        out = DifferentialForm(ring, eta.degree)
        for b, c in unit_coeffs.items():
            moved = lift.zeta(eta.scale(c))
            t = tau.values.get(b)
            if t is not None and not t.is_zero():
                out = out + moved.scale(t.frobenius())
        return out

    entries = []
    for i in range(dv + 1):
        for k in range(D + 1):
            sources = forms_of_total_degree(dv, i, k)
            images = [composite(DifferentialForm.monomial(ring, a, J)) for a, J in sources]
            ok = True
            zero = all(w.is_zero() for w in images)
            for (a, J), w in zip(sources, images):
                if not w.is_closed() or cartier(w) != DifferentialForm.monomial(ring, a, J):
                    ok = False
                    break
            entries.append({"i": i, "k": k, "dim": len(sources),
                            "induces_cartier": ok, "zero": zero})
    fails = sorted({e["i"] for e in entries if not e["induces_cartier"]})
    zero_on = sorted(i for i in range(dv + 1)
                     if all(e["zero"] for e in entries if e["i"] == i))
    return {"p": p, "vars": list(ring.names), "degree_cap": D,
            "tau_unit": str(tau.unit_value()), "bidegrees": entries,
            "induces_cartier": not fails, "fails_on": fails, "zero_on": zero_on}


def witt_basechange_check(ring: PolyRing, n: int, D: int, samples: int = 10, seed: int = 0) -> dict:
    """Cohomology of F_*W_n(R)/p (x) F_*Omega against F_*W_n(R)/p (x) Omega^i, per degree."""
    p, dv = ring.p, ring.nvars
    if dv > 2 or n > 2:
        raise ValueError("witt_basechange_check supports d <= 2 and n <= 2")
    if D < 1:
        raise ValueError("degree cap must be positive")
    basis = WnModPModuleBasis(ring, n)

    rng = random.Random(seed)
    action_ok = True
    for b in basis:
        r = ring.random(rng, max_deg=2, max_terms=2)
        got = express_in_basis(act(r, basis.element(b)), basis)
        if {k: v for k, v in got.items() if not v.is_zero()} != ({b: r} if not r.is_zero() else {}):
            action_ok = False
            break

    # degrees in units where R^(1) has generators of degree 1
    zeta = FrobeniusLift.canonical(ring)
    per_degree: dict = {}
    for b in basis:
        db = b.degree(p)
        for k in range(0, p * D + 1):
            delta = db + Fraction(k, p)
            if delta > D:
                break
            row = per_degree.setdefault(delta, {i: {"H": 0, "expected": 0} for i in range(dv + 1)})
            for i in range(dv + 1):
                row[i]["H"] += _cohomology_dim_total(p, dv, i, k)
                if k % p == 0:
                    row[i]["expected"] += len(forms_of_total_degree(dv, i, k // p))

    phi_ok = True
    for i in range(dv + 1):
        for k in range(D + 1):
            sources = forms_of_total_degree(dv, i, k)
            images = [zeta.zeta(DifferentialForm.monomial(ring, a, J)) for a, J in sources]
            e = _bidegree_report(p, dv, i, k, sources, images)
            phi_ok &= e["bijective"]

    degrees = []
    for delta in sorted(per_degree):
        row = per_degree[delta]
        degrees.append({"degree": str(delta),
                        "ranks": [row[i]["H"] for i in range(dv + 1)],
                        "expected": [row[i]["expected"] for i in range(dv + 1)]})
    ranks_ok = all(r["ranks"] == r["expected"] for r in degrees)
    return {"p": p, "n": n, "vars": list(ring.names), "degree_cap": D,
            "basis_size": len(basis), "basis_size_expected": p ** (n * dv),
            "module_action_ok": action_ok, "phi_bijective_on_H": phi_ok,
            "degrees": degrees, "ranks_match": ranks_ok,
            "ok": ranks_ok and action_ok and phi_ok and len(basis) == p ** (n * dv)}


def omega_rank(d_vars: int, i: int) -> int:
    return comb(d_vars, i)

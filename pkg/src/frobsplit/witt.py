"""Truncated p-typical Witt vectors over F_p-algebras of the form k[x]/(f).

Addition, multiplication and negation evaluate universal integer polynomials
(reduced mod p) on the components.  The universal polynomials are produced by
solving the ghost equations with exact integer arithmetic, and the ghost map
also serves as an independent check through :class:`GhostLift`.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from .fpoly import AmbientMismatch, FpPoly, HypersurfaceRing, PolyRing, check_prime, reduce_mod_f

MAX_LENGTH = 4


# -- integer polynomials (dict exponent -> int) ------------------------------

def zadd(a: dict, b: dict, sign: int = 1) -> dict:
    out = dict(a)
    for e, c in b.items():
        v = out.get(e, 0) + sign * c
        if v:
            out[e] = v
        else:
            out.pop(e, None)
    return out


def zmul(a: dict, b: dict, modulus: int | None = None) -> dict:
    out: dict = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            e = tuple(x + y for x, y in zip(e1, e2))
            out[e] = out.get(e, 0) + c1 * c2
    if modulus is not None:
        return {e: c % modulus for e, c in out.items() if c % modulus}
    return {e: c for e, c in out.items() if c}


def zpow(a: dict, k: int, nvars: int, modulus: int | None = None) -> dict:
    result = {(0,) * nvars: 1}
    base = a
    while k:
        if k & 1:
            result = zmul(result, base, modulus)
        k >>= 1
        if k:
            base = zmul(base, base, modulus)
    return result


def zscale(a: dict, c: int) -> dict:
    return {e: v * c for e, v in a.items() if v * c}


def _zvar(i: int, nvars: int) -> dict:
    e = [0] * nvars
    e[i] = 1
    return {tuple(e): 1}


# -- structural polynomials --------------------------------------------------

class WittError(ArithmeticError):
    """Non-exact division while solving ghost equations: an implementation bug."""


@dataclass(frozen=True)
class StructuralPolys:
    """Universal Witt polynomials for (p, n) in variables X_0..X_{n-1}, Y_0..Y_{n-1}.

    ``add[i]``, ``mul[i]`` and ``neg[i]`` are exact integer polynomials; the
    ``*_mod_p`` views drop terms whose coefficient vanishes mod p.
    """

    p: int
    n: int
    add: tuple
    mul: tuple
    neg: tuple

    def _mod(self, polys):
        p = self.p
        return tuple(tuple((e, c % p) for e, c in sorted(q.items()) if c % p) for q in polys)

    @cached_property
    def add_mod_p(self):
        return self._mod(self.add)

    @cached_property
    def mul_mod_p(self):
        return self._mod(self.mul)

    @cached_property
    def neg_mod_p(self):
        return self._mod(self.neg)


def ghost_poly(p: int, i: int, offset: int, nvars: int) -> dict:
    """w_i = sum_{j<=i} p^j Z_j^{p^(i-j)} with Z_j the variable at offset + j."""
    out: dict = {}
    for j in range(i + 1):
        e = [0] * nvars
        e[offset + j] = p ** (i - j)
        out[tuple(e)] = p ** j
    return out


def _solve_ghost(p: int, n: int, targets) -> tuple:
    """Components S_0..S_{n-1} with w_i(S) = targets[i], dividing exactly by p^i."""
    nv = 2 * n
    sols = []
    for i in range(n):
        rest = dict(targets[i])
        for j in range(i):
            rest = zadd(rest, zscale(zpow(sols[j], p ** (i - j), nv), p ** j), -1)
        q = p ** i
        comp = {}
        for e, c in rest.items():
            if c % q:
                raise WittError(f"ghost equation {i} not integral for p={p}")
            comp[e] = c // q
        sols.append(comp)
    return tuple(sols)


_CACHE: dict = {}
_CACHE_LOCK = threading.Lock()


def structural_polys(p: int, n: int) -> StructuralPolys:
    """Cached universal polynomials; written once per (p, n), read-only afterwards."""
    check_prime(p)
    if not 1 <= n <= MAX_LENGTH:
        raise ValueError(f"Witt length n={n} outside 1..{MAX_LENGTH}")
    key = (p, n)
    with _CACHE_LOCK:
        if key in _CACHE:
            return _CACHE[key]
    nv = 2 * n
    wx = [ghost_poly(p, i, 0, nv) for i in range(n)]
    wy = [ghost_poly(p, i, n, nv) for i in range(n)]
    add = _solve_ghost(p, n, [zadd(a, b) for a, b in zip(wx, wy)])
    mul = _solve_ghost(p, n, [zmul(a, b) for a, b in zip(wx, wy)])
    neg = _solve_ghost(p, n, [zscale(a, -1) for a in wx])
    sp = StructuralPolys(p, n, add, mul, neg)
    with _CACHE_LOCK:
        _CACHE.setdefault(key, sp)
        return _CACHE[key]


def _evaluate(terms, args, S: HypersurfaceRing) -> FpPoly:
    ring = S.ring
    powers: dict = {}
    acc: dict = {}
    p = ring.p
    for e, c in terms:
        term = None
        for idx, k in enumerate(e):
            if not k:
                continue
            if args[idx].is_zero():
                term = ring.zero()
                break
            key = (idx, k)
            if key not in powers:
                pw = args[idx] ** k
                powers[key] = reduce_mod_f(pw, S) if S.f is not None else pw
            term = powers[key] if term is None else term * powers[key]
        if term is None:
            term = ring.one()
        for m, v in term.terms.items():
            acc[m] = (acc.get(m, 0) + c * v) % p
    out = FpPoly(ring, acc)
    return reduce_mod_f(out, S) if S.f is not None else out


# -- Witt vectors -----------------------------------------------------------

def as_ambient(R) -> HypersurfaceRing:
    if isinstance(R, HypersurfaceRing):
        return R
    if isinstance(R, PolyRing):
        return HypersurfaceRing(R)
    raise TypeError(f"not a ring: {R!r}")


class WittVector:
    """Element (a_0, ..., a_{n-1}) of W_n(S)."""

    __slots__ = ("S", "comps")

    def __init__(self, S, comps):
        S = as_ambient(S)
        comps = tuple(comps)
        if not 1 <= len(comps) <= MAX_LENGTH:
            raise ValueError(f"Witt length {len(comps)} outside 1..{MAX_LENGTH}")
        for c in comps:
            if c.ring != S.ring:
                raise AmbientMismatch("component in a different ring")
        if S.f is not None:
            comps = tuple(reduce_mod_f(c, S) for c in comps)
        self.S = S
        self.comps = comps

    @property
    def p(self):
        return self.S.p

    @property
    def n(self):
        return len(self.comps)

    @property
    def ring(self) -> PolyRing:
        return self.S.ring

    def __getitem__(self, i):
        return self.comps[i]

    def __iter__(self):
        return iter(self.comps)

    def __eq__(self, other):
        if not isinstance(other, WittVector):
            return NotImplemented
        return self.S.ring == other.S.ring and self.comps == other.comps

    def __hash__(self):
        return hash(self.comps)

    def __repr__(self):
        return f"WittVector{dump(self)!r}"

    def __str__(self):
        return dump(self)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.comps)

    def _check(self, other):
        if not isinstance(other, WittVector):
            raise TypeError(f"expected WittVector, got {type(other).__name__}")
        if other.n != self.n:
            raise ValueError(f"Witt lengths differ: {self.n} vs {other.n}")
        if other.S.ring != self.S.ring or (self.S.f != other.S.f):
            raise AmbientMismatch("Witt vectors over different rings")

    def _binary(self, other, table) -> "WittVector":
        self._check(other)
        args = list(self.comps) + list(other.comps)
        return WittVector(self.S, [_evaluate(table[i], args, self.S) for i in range(self.n)])

    def __add__(self, other):
        return self._binary(other, structural_polys(self.p, self.n).add_mod_p)

    def __mul__(self, other):
        return self._binary(other, structural_polys(self.p, self.n).mul_mod_p)

    def __neg__(self):
        table = structural_polys(self.p, self.n).neg_mod_p
        args = list(self.comps) + [self.ring.zero()] * self.n
        return WittVector(self.S, [_evaluate(table[i], args, self.S) for i in range(self.n)])

    def __sub__(self, other):
        return self + (-other)

    def scalar(self, k: int) -> "WittVector":
        """k * self by repeated Witt addition (k >= 0)."""
        out = zero(self.S, self.n)
        for _ in range(k):
            out = out + self
        return out

    def verschiebung(self) -> "WittVector":
        """V(a) = (0, a_0, ..., a_{n-2}) at fixed length n."""
        return WittVector(self.S, (self.ring.zero(),) + self.comps[:-1])

    def frobenius(self) -> "WittVector":
        """Over an F_p-algebra F is the componentwise p-th power."""
        return WittVector(self.S, [c.frobenius() for c in self.comps])

    def mul_by_p(self) -> "WittVector":
        """p * a = VF(a) = (0, a_0^p, ..., a_{n-2}^p)."""
        return WittVector(self.S, (self.ring.zero(),) + tuple(c.frobenius() for c in self.comps[:-1]))

    def truncate(self, m: int) -> "WittVector":
        return WittVector(self.S, self.comps[:m])

    def restrict(self) -> FpPoly:
        return self.comps[0]


def teichmuller(r: FpPoly, n: int, S=None) -> WittVector:
    S = as_ambient(S if S is not None else r.ring)
    return WittVector(S, (r,) + (S.ring.zero(),) * (n - 1))


def verschiebung(a: WittVector) -> WittVector:
    return a.verschiebung()


def frobenius_W(a: WittVector) -> WittVector:
    return a.frobenius()


def mul_by_p(a: WittVector) -> WittVector:
    return a.mul_by_p()


def zero(S, n: int) -> WittVector:
    S = as_ambient(S)
    return WittVector(S, (S.ring.zero(),) * n)


def one(S, n: int) -> WittVector:
    S = as_ambient(S)
    return teichmuller(S.ring.one(), n, S)


def v_teich(i: int, r: FpPoly, n: int, S=None) -> WittVector:
    """V^i([r]): r in position i, zeros elsewhere."""
    S = as_ambient(S if S is not None else r.ring)
    z = S.ring.zero()
    return WittVector(S, [r if j == i else z for j in range(n)])


def dump(a: WittVector) -> str:
    body = "; ".join(str(c) for c in a.comps)
    return f"({body}) @ p={a.p}, n={a.n}"


def parse_dump(text: str, S) -> WittVector:
    S = as_ambient(S)
    body, _, meta = text.partition("@")
    body = body.strip()
    if not (body.startswith("(") and body.endswith(")")):
        raise ValueError(f"malformed Witt vector dump: {text!r}")
    comps = [S.ring.parse(s) for s in body[1:-1].split(";")]
    w = WittVector(S, comps)
    if meta.strip() and meta.replace(" ", "") != f"p={w.p},n={w.n}":
        raise ValueError(f"metadata {meta.strip()!r} does not match the components")
    return w


# -- ghost-component oracle --------------------------------------------------

class GhostLift:
    """Characteristic-0 view of a Witt vector over a polynomial ring.

    Components are lifted to Z[x] with coefficients in [0, p).  Ghost
    component i is well defined modulo p^(i+1) independently of the lift,
    and those residues determine the Witt vector, which gives an oracle for
    every ring operation.
    """

    def __init__(self, a: WittVector):
        if a.S.f is not None:
            raise ValueError("ghost oracle needs a polynomial ambient")
        self.p = a.p
        self.n = a.n
        self.ring = a.ring
        self.components = tuple(dict(c.terms) for c in a.comps)

    def ghost(self, i: int, modulus: int | None = None) -> dict:
        p, nv = self.p, self.ring.nvars
        modulus = p ** (i + 1) if modulus is None else modulus
        out: dict = {}
        for j in range(min(i, self.n - 1) + 1):
            pw = zpow(self.components[j], p ** (i - j), nv, modulus)
            out = zadd(out, zscale(pw, p ** j))
        return {e: c % modulus for e, c in out.items() if c % modulus}

    def ghosts(self):
        return [self.ghost(i) for i in range(self.n)]


def from_ghost(ghosts, ring: PolyRing) -> WittVector:
    """Recover a Witt vector over F_p[x] from ghost components mod p^(i+1)."""
    p, nv = ring.p, ring.nvars
    comps: list = []
    for i, g in enumerate(ghosts):
        mod = p ** (i + 1)
        rest = {e: c % mod for e, c in g.items()}
        for j, cj in enumerate(comps):
            pw = zpow(cj, p ** (i - j), nv, mod)
            rest = zadd(rest, zscale(pw, p ** j), -1)
        comp = {}
        for e, c in rest.items():
            c %= mod
            if c % (p ** i):
                raise WittError(f"ghost component {i} is not consistent with a Witt vector")
            if (c // p ** i) % p:
                comp[e] = (c // p ** i) % p
        comps.append(comp)
    return WittVector(ring, [FpPoly(ring, c) for c in comps])


def ghost_binary(a: WittVector, b: WittVector, op: str) -> WittVector:
    """a op b computed purely through ghost components (op in '+', '*')."""
    ga, gb = GhostLift(a), GhostLift(b)
    out = []
    for i in range(a.n):
        mod = a.p ** (i + 1)
        x, y = ga.ghost(i), gb.ghost(i)
        if op == "+":
            r = zadd(x, y)
        elif op == "*":
            r = zmul(x, y, mod)
        else:
            raise ValueError(op)
        out.append({e: c % mod for e, c in r.items() if c % mod})
    return from_ghost(out, a.ring)


def ghost_frobenius(a: WittVector) -> WittVector:
    """F: W_n -> W_{n-1} defined by w_i(F a) = w_{i+1}(a)."""
    g = GhostLift(a)
    return from_ghost([g.ghost(i + 1, a.p ** (i + 1)) for i in range(a.n - 1)], a.ring)


def self_check(p: int, n: int, ring: PolyRing | None = None, samples: int = 5, seed: int = 0) -> None:
    """Assert the F_p shortcuts (componentwise F, shape of p*a) against the ghost map."""
    import random

    rng = random.Random(seed)
    ring = ring or PolyRing(p, ("x",))
    for _ in range(samples):
        a = WittVector(ring, [ring.random(rng, 2, 2) for _ in range(n)])
        if n > 1:
            assert ghost_frobenius(a) == a.frobenius().truncate(n - 1)
        assert a.mul_by_p() == a.scalar(p)


# -- the quotient W_n(S)/p -----------------------------------------------------

class WnModPClass:
    """Class of a Witt vector in W_n(S)/p."""

    __slots__ = ("rep", "canonical")

    def __init__(self, rep: WittVector, canonical: bool = False):
        self.rep = rep
        self.canonical = canonical

    @property
    def n(self):
        return self.rep.n

    def __repr__(self):
        tag = "canonical " if self.canonical else ""
        return f"<{tag}class of {dump(self.rep)}>"

    def __eq__(self, other):
        if not isinstance(other, WnModPClass):
            return NotImplemented
        return class_equal(self, other)

    __hash__ = None

    def __add__(self, other):
        return WnModPClass(self.rep + other.rep)

    def __mul__(self, other):
        return WnModPClass(self.rep * other.rep)

    def __sub__(self, other):
        return WnModPClass(self.rep - other.rep)


def in_p_multiples(a: WittVector) -> bool:
    """a in p W_n(S) = {(0, b_0^p, ..., b_{n-2}^p)} (S reduced)."""
    if not a.comps[0].is_zero():
        return False
    S = a.S
    for c in a.comps[1:]:
        if S.f is None:
            if not c.is_pth_power():
                return False
        elif not S.is_pth_power(c):
            return False
    return True


def class_equal(a: WnModPClass, b: WnModPClass) -> bool:
    return in_p_multiples(a.rep - b.rep)


def canonical_form(a) -> WnModPClass:
    """Clear pure p-th-power monomials from positions 1..n-1, lowest first."""
    rep = a.rep if isinstance(a, WnModPClass) else a
    if rep.S.f is not None:
        raise ValueError("canonical forms are defined for polynomial ambients only")
    for i in range(1, rep.n):
        q = rep.comps[i].pure_pth_power_part()
        if not q.is_zero():
            rep = rep - v_teich(i, q, rep.n, rep.S)
    return WnModPClass(rep, canonical=True)


def restriction_r(a) -> FpPoly:
    rep = a.rep if isinstance(a, WnModPClass) else a
    return rep.comps[0]


def section_s(r: FpPoly, n: int, S=None) -> WnModPClass:
    """r -> class of [r]^p = [r^p]."""
    S = as_ambient(S if S is not None else r.ring)
    return WnModPClass(teichmuller(reduce_mod_f(r.frobenius(), S), n, S))


def act(r: FpPoly, w: WittVector) -> WittVector:
    """Module action of S on F_*W_n(S)/p through the section: r.w = [r^p] w."""
    return teichmuller(r.frobenius(), w.n, w.S) * w


# -- explicit basis of F_*W_n(R)/p over R --------------------------------------

@dataclass(frozen=True)
class BasisEntry:
    level: int
    exps: tuple

    def degree(self, p: int) -> Fraction:
        return Fraction(sum(self.exps), p ** (self.level + 1))

    def __str__(self):
        return f"V^{self.level}[x^{self.exps}]"


class WnModPModuleBasis:
    """Entries V^i([x^e]) forming an R-basis of F_*W_n(R)/p for R = F_p[x_1..x_d]."""

    def __init__(self, ring: PolyRing, n: int):
        self.ring = ring
        self.n = n
        self.p = ring.p
        d, p = ring.nvars, ring.p
        entries = [BasisEntry(0, e) for e in itertools.product(range(p), repeat=d)]
        for i in range(1, n):
            for e in itertools.product(range(p ** (i + 1)), repeat=d):
                if any(a % p for a in e):
                    entries.append(BasisEntry(i, e))
        self.entries = tuple(entries)
        self.index = {b: k for k, b in enumerate(self.entries)}

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def element(self, b: BasisEntry, S=None) -> WittVector:
        return v_teich(b.level, self.ring.monomial(b.exps), self.n, S if S is not None else self.ring)

    def degree(self, b: BasisEntry) -> Fraction:
        return b.degree(self.p)

    def unit(self) -> BasisEntry:
        return BasisEntry(0, (0,) * self.ring.nvars)


def express_in_basis(a, basis: WnModPModuleBasis) -> dict:
    """Coefficients {entry: c in R} with a == sum c . entry in F_*W_n(R)/p.

    Peels V-adic layers: read off layer i through the p^(i+1)-basis
    decomposition, subtract it with Witt arithmetic, and move up.
    """
    rep = a.rep if isinstance(a, WnModPClass) else a
    if rep.S.f is not None:
        raise ValueError("express_in_basis needs a polynomial ambient")
    if rep.n != basis.n or rep.ring != basis.ring:
        raise AmbientMismatch("class and basis have different ambient data")
    p, n = basis.p, basis.n
    work = rep
    coeffs: dict = {}
    for i in range(n):
        comp = work.comps[i]
        if i >= 1:
            q = comp.pure_pth_power_part()
            if not q.is_zero():
                work = work - v_teich(i, q, n, rep.S)
                comp = work.comps[i]
        if comp.is_zero():
            continue
        q = p ** (i + 1)
        layer = zero(rep.S, n)
        for e, h in comp.p_basis_decompose(q).items():
            coeffs[BasisEntry(i, e)] = h
            layer = layer + v_teich(i, recompose_single(h, e, q), n, rep.S)
        work = work - layer
        if not work.comps[i].is_zero():
            raise WittError("layer subtraction did not clear its component")
    return coeffs


def recompose_single(h: FpPoly, e, q: int) -> FpPoly:
    """h^q * x^e."""
    return FpPoly(h.ring, {tuple(q * a + b for a, b in zip(m, e)): c for m, c in h.terms.items()})


def recompose(coeffs: dict, basis: WnModPModuleBasis, S=None) -> WnModPClass:
    """sum c . entry, with the action computed by Witt multiplication."""
    S = as_ambient(S if S is not None else basis.ring)
    total = zero(S, basis.n)
    for b, c in coeffs.items():
        total = total + act(c, basis.element(b, S))
    return WnModPClass(total)

"""Sparse multivariate polynomials over a prime field F_p.

Polynomials are immutable maps from exponent tuples to nonzero residues mod p.
Monomials are ordered graded-lexicographically; the leading monomial is the
largest exponent tuple under that order.
"""

from __future__ import annotations

import itertools
import random
import re
from dataclasses import dataclass

MAX_PRIME = 13


class AmbientMismatch(ValueError):
    pass


class PolyParseError(ValueError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % q for q in range(2, int(n**0.5) + 1))


class UnsupportedPrime(ValueError):
    pass


def check_prime(p: int) -> int:
    if not is_prime(p):
        raise UnsupportedPrime(f"p={p} is not prime")
    if p > MAX_PRIME:
        raise UnsupportedPrime(f"p={p} is outside the supported range 2..{MAX_PRIME}")
    return p


def grlex_key(e):
    return (sum(e), e)


@dataclass(frozen=True)
class PolyRing:
    """F_p[names]; equality is structural so rings can be compared cheaply."""

    p: int
    names: tuple

    def __post_init__(self):
        check_prime(self.p)
        object.__setattr__(self, "names", tuple(self.names))
        if len(set(self.names)) != len(self.names):
            raise ValueError(f"repeated variable names in {self.names}")

    @property
    def nvars(self) -> int:
        return len(self.names)

    def zero(self) -> "FpPoly":
        return FpPoly(self, {})

    def one(self) -> "FpPoly":
        return self.const(1)

    def const(self, c: int) -> "FpPoly":
        return FpPoly(self, {(0,) * self.nvars: c})

    def monomial(self, exps, c: int = 1) -> "FpPoly":
        exps = tuple(exps)
        if len(exps) != self.nvars:
            raise AmbientMismatch(f"exponent vector {exps} has wrong length")
        return FpPoly(self, {exps: c})

    def gens(self):
        return tuple(self.var(i) for i in range(self.nvars))

    def var(self, i) -> "FpPoly":
        if isinstance(i, str):
            i = self.names.index(i)
        e = [0] * self.nvars
        e[i] = 1
        return self.monomial(e)

    def parse(self, text: str) -> "FpPoly":
        return parse_poly(text, self)

    def monomials_of_degree(self, k: int):
        """All exponent tuples of total degree k, in descending grlex order."""
        out = [e for e in _compositions(k, self.nvars)]
        out.sort(reverse=True)
        return out

    def random(self, rng: random.Random, max_deg: int = 3, max_terms: int = 4,
               homogeneous: int | None = None) -> "FpPoly":
        terms = {}
        for _ in range(rng.randint(0, max_terms)):
            if homogeneous is not None:
                mons = self.monomials_of_degree(homogeneous)
                e = rng.choice(mons)
            else:
                e = tuple(rng.randint(0, max_deg) for _ in range(self.nvars))
                while sum(e) > max_deg:
                    e = tuple(rng.randint(0, max_deg) for _ in range(self.nvars))
            terms[e] = (terms.get(e, 0) + rng.randrange(1, self.p)) % self.p
        return FpPoly(self, terms)


def _compositions(k, n):
    if n == 0:
        if k == 0:
            yield ()
        return
    if n == 1:
        yield (k,)
        return
    for first in range(k, -1, -1):
        for rest in _compositions(k - first, n - 1):
            yield (first,) + rest


class FpPoly:
    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: PolyRing, terms: dict):
        p = ring.p
        self.ring = ring
        self.terms = {e: c % p for e, c in terms.items() if c % p}
        self._hash = None

    # -- basic protocol -------------------------------------------------
    @property
    def p(self) -> int:
        return self.ring.p

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.ring.const(other)
        if not isinstance(other, FpPoly):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self.terms.items())))
        return self._hash

    def __repr__(self):
        return f"FpPoly({self!s} @ p={self.p})"

    def __str__(self):
        return format_poly(self)

    def _coerce(self, other) -> "FpPoly":
        if isinstance(other, int):
            return self.ring.const(other)
        if not isinstance(other, FpPoly):
            raise TypeError(f"cannot combine FpPoly with {type(other).__name__}")
        if other.ring != self.ring:
            raise AmbientMismatch(f"{self.ring} vs {other.ring}")
        return other

    # -- arithmetic -----------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        t = dict(self.terms)
        for e, c in other.terms.items():
            t[e] = t.get(e, 0) + c
        return FpPoly(self.ring, t)

    __radd__ = __add__

    def __neg__(self):
        return FpPoly(self.ring, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        if not self.terms or not other.terms:
            return self.ring.zero()
        p = self.p
        t: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                t[e] = (t.get(e, 0) + c1 * c2) % p
        return FpPoly(self.ring, t)

    __rmul__ = __mul__

    def scale(self, c: int) -> "FpPoly":
        return FpPoly(self.ring, {e: c * v for e, v in self.terms.items()})

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative exponent")
        # f^k = prod_j F^j(f^{k_j}) over the base-p digits of k
        result = self.ring.one()
        base = self
        while k:
            k, digit = divmod(k, self.p)
            if digit:
                result = result * _small_pow(base, digit)
            if k:
                base = base.frobenius()
        return result

    def frobenius(self) -> "FpPoly":
        """f^p; coefficients are fixed because c^p = c in F_p."""
        p = self.p
        return FpPoly(self.ring, {tuple(p * a for a in e): c for e, c in self.terms.items()})

    def pth_root(self):
        """g with g^p == self, or None when some exponent is not divisible by p."""
        p = self.p
        t = {}
        for e, c in self.terms.items():
            if any(a % p for a in e):
                return None
            t[tuple(a // p for a in e)] = c
        return FpPoly(self.ring, t)

    def is_pth_power(self) -> bool:
        return all(a % self.p == 0 for e in self.terms for a in e)

    def pure_pth_power_part(self) -> "FpPoly":
        """Terms whose exponents are all divisible by p."""
        p = self.p
        return FpPoly(self.ring, {e: c for e, c in self.terms.items()
                                  if all(a % p == 0 for a in e)})

    def p_basis_decompose(self, q: int | None = None) -> dict:
        """Unique {e: g_e} with self = sum_e g_e^q * x^e and 0 <= e_i < q.

        q defaults to p; powers of p give the basis of F^k_* R over R.
        """
        q = self.p if q is None else q
        out: dict = {}
        for e, c in self.terms.items():
            r = tuple(a % q for a in e)
            m = tuple(a // q for a in e)
            out.setdefault(r, {})[m] = c
        return {r: FpPoly(self.ring, t) for r, t in sorted(out.items())}

    # -- inspection -----------------------------------------------------
    def coefficient(self, exps) -> int:
        return self.terms.get(tuple(exps), 0)

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self.terms}) <= 1

    def leading_monomial(self):
        if not self.terms:
            raise ValueError("zero polynomial has no leading monomial")
        return max(self.terms, key=grlex_key)

    def leading_coefficient(self) -> int:
        return self.terms[self.leading_monomial()]

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: grlex_key(t[0]), reverse=True)

    def homogeneous_part(self, k: int) -> "FpPoly":
        return FpPoly(self.ring, {e: c for e, c in self.terms.items() if sum(e) == k})

    def derivative(self, i: int) -> "FpPoly":
        t = {}
        for e, c in self.terms.items():
            if e[i]:
                e2 = list(e)
                e2[i] -= 1
                t[tuple(e2)] = c * e[i]
        return FpPoly(self.ring, t)

    def evaluate(self, point) -> int:
        p = self.p
        total = 0
        for e, c in self.terms.items():
            v = c
            for x, a in zip(point, e):
                v = v * pow(x, a, p) % p
            total += v
        return total % p

    def substitute(self, images) -> "FpPoly":
        """Ring map x_i -> images[i] (polynomials in a common ring)."""
        images = list(images)
        target = images[0].ring
        out = target.zero()
        cache: dict = {}
        for e, c in self.terms.items():
            term = target.const(c)
            for i, a in enumerate(e):
                if a:
                    key = (i, a)
                    if key not in cache:
                        cache[key] = images[i] ** a
                    term = term * cache[key]
            out = out + term
        return out


def _small_pow(f: FpPoly, k: int) -> FpPoly:
    result = f.ring.one()
    for _ in range(k):
        result = result * f
    return result


def recompose(parts: dict, ring: PolyRing, q: int | None = None) -> FpPoly:
    """Inverse of FpPoly.p_basis_decompose."""
    q = ring.p if q is None else q
    out = ring.zero()
    for e, g in parts.items():
        shifted = {tuple(q * a + b for a, b in zip(m, e)): c for m, c in g.terms.items()}
        out = out + FpPoly(ring, shifted)
    return out


# -- hypersurface rings ---------------------------------------------------

class HypersurfaceRing:
    """k[x]/(f) with normal forms given by division by f under grlex.

    ``f`` may be None, giving the polynomial ring itself.
    """

    def __init__(self, ring: PolyRing, f: FpPoly | None = None, grading=None):
        if f is not None:
            if f.ring != ring:
                raise AmbientMismatch("f lives in a different ring")
            if f.is_zero():
                f = None
        self.ring = ring
        self.f = f
        self.grading = tuple(grading) if grading is not None else (1,) * ring.nvars
        if f is not None:
            self._lm = f.leading_monomial()
            self._lc_inv = pow(f.terms[self._lm], -1, ring.p)

    @property
    def p(self):
        return self.ring.p

    def __repr__(self):
        rel = "0" if self.f is None else str(self.f)
        return f"HypersurfaceRing(F_{self.p}[{','.join(self.ring.names)}]/({rel}))"

    def reduce(self, g: FpPoly) -> FpPoly:
        return reduce_mod_f(g, self)

    def is_graded(self) -> bool:
        return self.f is None or self.f.is_homogeneous()

    def normal_monomials(self, k: int):
        """Basis of the degree-k piece: monomials not divisible by LM(f)."""
        mons = self.ring.monomials_of_degree(k)
        if self.f is None:
            return mons
        lm = self._lm
        return [e for e in mons if not all(a >= b for a, b in zip(e, lm))]

    def is_pth_power(self, g: FpPoly) -> bool:
        return pth_root_mod(g, self) is not None


def reduce_mod_f(g: FpPoly, S: HypersurfaceRing) -> FpPoly:
    """Remainder of g under division by f (unique, since {f} is a Groebner basis)."""
    if S.f is None:
        return g
    if g.ring != S.ring:
        raise AmbientMismatch("element and hypersurface ring differ")
    p = S.p
    lm, inv = S._lm, S._lc_inv
    f_terms = list(S.f.terms.items())
    t = dict(g.terms)
    while True:
        div = [e for e in t if all(a >= b for a, b in zip(e, lm))]
        if not div:
            break
        e = max(div, key=grlex_key)
        c = t[e] * inv % p
        shift = tuple(a - b for a, b in zip(e, lm))
        for fe, fc in f_terms:
            m = tuple(a + b for a, b in zip(fe, shift))
            v = (t.get(m, 0) - c * fc) % p
            if v:
                t[m] = v
            else:
                t.pop(m, None)
    return FpPoly(g.ring, t)


def pth_root_mod(g: FpPoly, S: HypersurfaceRing):
    """Some h with h^p == g in S, or None.

    g -> g^p is F_p-linear, so this is a linear solve over normal-form
    monomials of degree <= ceil(deg g / p).
    """
    from . import linalg

    g = reduce_mod_f(g, S)
    if g.is_zero():
        return S.ring.zero()
    if S.f is None:
        return g.pth_root()
    p = S.p
    bound = -(-g.degree() // p)
    cands = [e for k in range(bound + 1) for e in S.normal_monomials(k)]
    images = [reduce_mod_f(S.ring.monomial(e).frobenius(), S) for e in cands]
    mons = sorted({m for im in images for m in im.terms} | set(g.terms), key=grlex_key)
    index = {m: i for i, m in enumerate(mons)}
    A = [[0] * len(cands) for _ in mons]
    for j, im in enumerate(images):
        for m, c in im.terms.items():
            A[index[m]][j] = c
    b = [0] * len(mons)
    for m, c in g.terms.items():
        b[index[m]] = c
    sol = linalg.solve(A, b, p)
    if sol is None:
        return None
    return FpPoly(S.ring, {e: c for e, c in zip(cands, sol) if c})


# -- text grammar -----------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*^()]))")


def _tokenize(text):
    pos = 0
    out = []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise PolyParseError(f"unexpected character at {pos}: {text[pos:pos + 10]!r}")
        num, name, op = m.groups()
        if num is not None:
            out.append(("num", int(num)))
        elif name is not None:
            out.append(("name", name))
        else:
            out.append(("op", "^" if op == "**" else op))
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    return out


def variable_names(text: str):
    """Identifiers in a polynomial string, sorted."""
    return tuple(sorted({v for kind, v in _tokenize(text) if kind == "name"}))


def parse_poly(text: str, ring: PolyRing) -> FpPoly:
    """Parse e.g. ``y^2*z + y*z^2 + x^3``; ``*`` may be omitted."""
    toks = _tokenize(text)
    if not toks:
        raise PolyParseError("empty polynomial")
    pos = 0

    def peek():
        return toks[pos] if pos < len(toks) else (None, None)

    def take():
        nonlocal pos
        tok = toks[pos]
        pos += 1
        return tok

    def expr():
        sign = 1
        if peek() in (("op", "+"), ("op", "-")):
            sign = -1 if take()[1] == "-" else 1
        acc = term().scale(sign)
        while peek() in (("op", "+"), ("op", "-")):
            op = take()[1]
            t = term()
            acc = acc + t if op == "+" else acc - t
        return acc

    def term():
        acc = power()
        while True:
            kind, val = peek()
            if (kind, val) == ("op", "*"):
                take()
                acc = acc * power()
            elif kind in ("num", "name") or (kind, val) == ("op", "("):
                acc = acc * power()
            else:
                return acc

    def power():
        base = atom()
        if peek() == ("op", "^"):
            take()
            kind, val = take() if pos < len(toks) else (None, None)
            if kind != "num":
                raise PolyParseError("exponent must be a non-negative integer")
            return base ** val
        return base

    def atom():
        if pos >= len(toks):
            raise PolyParseError("unexpected end of input")
        kind, val = take()
        if kind == "num":
            return ring.const(val)
        if kind == "name":
            if val not in ring.names:
                raise PolyParseError(f"unknown variable {val!r}; ring has {ring.names}")
            return ring.var(val)
        if val == "(":
            inner = expr()
            if take() != ("op", ")"):
                raise PolyParseError("unbalanced parentheses")
            return inner
        raise PolyParseError(f"unexpected token {val!r}")

    result = expr()
    if pos != len(toks):
        raise PolyParseError(f"trailing input at token {toks[pos][1]!r}")
    return result


def format_poly(f: FpPoly) -> str:
    if not f.terms:
        return "0"
    parts = []
    for e, c in f.sorted_terms():
        factors = []
        for name, a in zip(f.ring.names, e):
            if a == 1:
                factors.append(name)
            elif a > 1:
                factors.append(f"{name}^{a}")
        if c != 1 or not factors:
            factors.insert(0, str(c))
        parts.append("*".join(factors))
    return " + ".join(parts)


def poly(text: str, p: int, names=None) -> FpPoly:
    """Convenience constructor: ring inferred from the identifiers when not given."""
    names = variable_names(text) if names is None else tuple(names)
    return parse_poly(text, PolyRing(p, names))


def all_exponents(bound: int, d: int):
    return itertools.product(range(bound), repeat=d)

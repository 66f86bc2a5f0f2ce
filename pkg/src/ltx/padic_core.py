"""Fixed absolute-precision arithmetic in Z_p, unramified Z_q and Z_q[zeta_p].

Elements are stored as integer coefficient vectors in a Z_p-basis together
with a p-power denominator ``shift`` so that the fraction field is available
(value = coeffs / p**shift).  Absolute precision ``prec`` is measured in units
with v(p) = 1; for the cyclotomic ring it is a multiple of 1/(p-1).

Basis conventions
-----------------
base        : [1]
unramified  : y^j, j < k, with y a root of the ring modulus f
cyclotomic  : pi^i y^j with pi = zeta_p - 1, index i*k + j
"""
from __future__ import annotations

import itertools
import math
import os
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import gmpy2
import sympy

from .errors import InvalidDegree, InvalidPrime, InputError, PrecisionExhausted

DEFAULT_PREC = int(os.environ.get("LTX_PRECISION", "20"))


def check_prime(p) -> int:
    if isinstance(p, bool) or not isinstance(p, int):
        raise InvalidPrime(f"p must be an integer, got {p!r}")
    if p == 2:
        raise InvalidPrime("p = 2 is not supported; p must be an odd prime")
    if p < 2 or not sympy.isprime(p):
        raise InvalidPrime(f"{p} is not a prime")
    return p


def vp(n: int, p: int) -> int | None:
    """p-adic valuation of a rational integer (None for 0)."""
    if n == 0:
        return None
    return int(gmpy2.remove(gmpy2.mpz(n), p)[1])


def vp_rational(x, p: int) -> int | None:
    x = Fraction(x)
    if x == 0:
        return None
    return vp(x.numerator, p) - vp(x.denominator, p)


def _ceil(x) -> int:
    return -((-x.numerator) // x.denominator) if isinstance(x, Fraction) else int(math.ceil(x))


def _norm(x):
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x)
    return x


# ---------------------------------------------------------------------------
# polynomial helpers (coefficient lists, low degree first)


def poly_mulmod(a: Sequence[int], b: Sequence[int], f: Sequence[int], m: int) -> list[int]:
    """a*b mod (monic f, m).  f given with its leading 1 included."""
    k = len(f) - 1
    prod = [0] * (len(a) + len(b) - 1) if a and b else [0]
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] += ai * bj
    for t in range(len(prod) - 1, k - 1, -1):
        c = prod[t]
        if c:
            for i in range(k):
                prod[t - k + i] -= c * f[i]
    out = prod[:k] + [0] * max(0, k - len(prod))
    return [c % m for c in out]


class ResidueField:
    """F_q = F_p[y]/(f mod p) with elements as k-tuples."""

    def __init__(self, p: int, modulus: Sequence[int]):
        self.p = p
        self.f = [c % p for c in modulus]
        self.k = len(modulus) - 1
        self.q = p ** self.k
        self._gen = None

    def __repr__(self):
        return f"F_{self.q}"

    def zero(self):
        return (0,) * self.k

    def one(self):
        return (1,) + (0,) * (self.k - 1)

    def from_int(self, a: int):
        return (a % self.p,) + (0,) * (self.k - 1)

    def add(self, a, b):
        return tuple((x + y) % self.p for x, y in zip(a, b))

    def sub(self, a, b):
        return tuple((x - y) % self.p for x, y in zip(a, b))

    def neg(self, a):
        return tuple((-x) % self.p for x in a)

    def scale(self, c: int, a):
        return tuple((c * x) % self.p for x in a)

    def mul(self, a, b):
        if self.k == 1:
            return ((a[0] * b[0]) % self.p,)
        return tuple(poly_mulmod(a, b, self.f, self.p))

    def pow(self, a, n: int):
        if n < 0:
            a, n = self.inv(a), -n
        result = self.one()
        while n:
            if n & 1:
                result = self.mul(result, a)
            a = self.mul(a, a)
            n >>= 1
        return result

    def is_zero(self, a) -> bool:
        return not any(a)

    def inv(self, a):
        if self.is_zero(a):
            raise ZeroDivisionError("inverse of 0 in residue field")
        return self.pow(a, self.q - 2)

    def frob(self, a, n: int = 1):
        return self.pow(a, self.p ** (n % self.k)) if self.k > 1 else a

    def trace(self, a) -> int:
        total = self.zero()
        x = a
        for _ in range(self.k):
            total = self.add(total, x)
            x = self.frob(x)
        return total[0]

    def elements(self):
        for t in itertools.product(range(self.p), repeat=self.k):
            yield tuple(reversed(t))

    def random(self, rng: random.Random):
        return tuple(rng.randrange(self.p) for _ in range(self.k))

    def element_order(self, a) -> int:
        n = self.q - 1
        order = n
        for ell in sympy.factorint(n):
            while order % ell == 0 and self.pow(a, order // ell) == self.one():
                order //= ell
        return order

    def generator(self):
        if self._gen is None:
            for a in self.elements():
                if any(a) and self.element_order(a) == self.q - 1:
                    self._gen = a
                    break
        return self._gen

    def discrete_log_table(self) -> dict:
        g = self.generator()
        table, x = {}, self.one()
        for i in range(self.q - 1):
            table[x] = i
            x = self.mul(x, g)
        return table

    def linear_map_matrix(self, fn) -> list[list[int]]:
        """Matrix over F_p (columns = images of y^j) of an F_p-linear map."""
        cols = []
        for j in range(self.k):
            e = tuple(1 if i == j else 0 for i in range(self.k))
            cols.append(fn(e))
        return [[cols[j][i] for j in range(self.k)] for i in range(self.k)]


def least_irreducible(p: int, k: int) -> tuple[int, ...]:
    """Lexicographically least monic degree-k polynomial irreducible mod p.

    Candidates are ordered by their coefficients read from x^(k-1) down to x^0.
    Returned low-degree-first with the leading 1.
    """
    if k == 1:
        return (0, 1)
    x = sympy.Symbol("x")
    for tail in itertools.product(range(p), repeat=k):
        coeffs_high = (1,) + tail
        if tail[-1] == 0:
            continue
        if sympy.Poly(list(coeffs_high), x, modulus=p).is_irreducible:
            return tuple(reversed(coeffs_high))
    raise AssertionError("no irreducible polynomial found")


# ---------------------------------------------------------------------------
# rings


@dataclass(eq=False)
class RingDescriptor:
    p: int
    kind: str  # "base" | "unramified" | "cyclotomic"
    k: int  # degree of the unramified part
    modulus: tuple[int, ...]  # monic, low degree first
    e: int
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def f(self) -> int:
        return self.k

    @property
    def dim(self) -> int:
        return self.k * self.e

    @property
    def q(self) -> int:
        return self.p ** self.k

    def __eq__(self, other):
        return (
            isinstance(other, RingDescriptor)
            and (self.p, self.kind, self.k, self.e, self.modulus)
            == (other.p, other.kind, other.k, other.e, other.modulus)
        )

    def __hash__(self):
        return hash((self.p, self.kind, self.k, self.e, self.modulus))

    def __repr__(self):
        if self.kind == "base":
            return f"Z_{self.p}"
        if self.kind == "unramified":
            return f"Z_{self.p}^({self.k})"
        return f"Z_{self.p}^({self.k})[zeta_{self.p}]"

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "kind": self.kind,
            "k": self.k,
            "modulus": list(self.modulus),
            "e": self.e,
            "f": self.f,
        }

    @classmethod
    def from_json(cls, d: dict) -> "RingDescriptor":
        return make_ring(d["p"], d["kind"], d.get("k", 1))

    # -- residue field and unramified subring --------------------------------

    @property
    def residue_field(self) -> ResidueField:
        if "rf" not in self._cache:
            self._cache["rf"] = ResidueField(self.p, self.modulus)
        return self._cache["rf"]

    def unramified_part(self) -> "RingDescriptor":
        if self.kind != "cyclotomic":
            return self
        return make_ring(self.p, "unramified", self.k) if self.k > 1 else make_ring(self.p, "base")

    # -- constructors --------------------------------------------------------

    def element(self, value=0, prec=None) -> "PadicElement":
        """Coerce an int, Fraction, residue tuple or coefficient list."""
        prec = DEFAULT_PREC if prec is None else prec
        if isinstance(value, PadicElement):
            return value.change_ring(self).with_prec(prec)
        if isinstance(value, (int, Fraction)) and not isinstance(value, bool):
            value = Fraction(value)
            num, den = value.numerator, value.denominator
            s = vp(den, self.p) or 0
            den //= self.p ** s
            mod = self.p ** max(_ceil(Fraction(prec)) + s, 0)
            c = (num * pow(den, -1, mod)) % mod if mod > 1 else 0
            coeffs = [c] + [0] * (self.dim - 1)
            return PadicElement(self, coeffs, prec, s)
        coeffs = list(value)
        if len(coeffs) > self.dim:
            raise InputError(f"too many coefficients for {self!r}")
        coeffs = [int(c) for c in coeffs] + [0] * (self.dim - len(coeffs))
        return PadicElement(self, coeffs, prec, 0)

    def zero(self, prec=None):
        return self.element(0, prec)

    def one(self, prec=None):
        return self.element(1, prec)

    def gen(self, prec=None):
        """y for unramified rings, zeta_p for the cyclotomic ring."""
        prec = DEFAULT_PREC if prec is None else prec
        if self.kind == "cyclotomic":
            c = [0] * self.dim
            c[0] = 1
            c[self.k] = 1
            return PadicElement(self, c, prec, 0)
        if self.k == 1:
            return self.element(-self.modulus[0], prec)
        c = [0] * self.dim
        c[1] = 1
        return PadicElement(self, c, prec, 0)

    def uniformizer(self, prec=None):
        prec = DEFAULT_PREC if prec is None else prec
        if self.kind == "cyclotomic":
            c = [0] * self.dim
            c[self.k] = 1
            return PadicElement(self, c, prec, 0)
        return self.element(self.p, prec)

    def random_element(self, rng: random.Random, prec=None, min_val: int = 0):
        prec = DEFAULT_PREC if prec is None else prec
        top = self.p ** _ceil(Fraction(prec))
        lo = self.p ** min_val
        coeffs = [rng.randrange(top) * lo % top for _ in range(self.dim)]
        return PadicElement(self, coeffs, prec, 0)

    def random_unit(self, rng: random.Random, prec=None):
        while True:
            x = self.random_element(rng, prec)
            if x.is_unit():
                return x

    def from_residue(self, c, prec=None):
        """Lift a residue-field tuple (or int) to an element with small coefficients."""
        if isinstance(c, int):
            c = (c,)
        c = list(c) + [0] * (self.k - len(c))
        return self.element(c + [0] * (self.dim - self.k), prec)

    # -- structure for multiplication ----------------------------------------

    def pi_relation(self) -> list[int]:
        """Integers rho_i with pi^(p-1) = sum rho_i pi^i (cyclotomic only)."""
        return [-math.comb(self.p, i + 1) for i in range(self.e)]

    def structure_constants(self) -> list[list[dict[int, int]]]:
        """basis_a * basis_b = sum_c T[a][b][c] basis_c over Z."""
        if "struct" not in self._cache:
            table = []
            for a in range(self.dim):
                row = []
                for b in range(self.dim):
                    ea = [0] * self.dim
                    eb = [0] * self.dim
                    ea[a] = 1
                    eb[b] = 1
                    prod = _raw_mul(self, ea, eb, None)
                    row.append({c: v for c, v in enumerate(prod) if v})
                table.append(row)
            self._cache["struct"] = table
        return self._cache["struct"]

    # -- Frobenius -----------------------------------------------------------

    def frobenius_matrix(self, prec: int) -> list[list[int]]:
        """Integer matrix (mod p^prec) of phi on the unramified basis y^j."""
        prec = max(int(prec), 1)
        cache = self._cache.setdefault("frobmat", {})
        for P, mat in cache.items():
            if P >= prec:
                m = self.p ** prec
                return [[c % m for c in row] for row in mat]
        mat = _compute_frobenius_matrix(self, prec)
        cache.clear()
        cache[prec] = mat
        return mat

    def eta_inverse(self, prec) -> "PadicElement":
        """Inverse of the unit eta = pi^(p-1)/p (cyclotomic only)."""
        cache = self._cache.setdefault("etainv", {})
        P = _ceil(Fraction(prec)) + 2
        for Q, val in cache.items():
            if Q >= P:
                return val.with_prec(prec)
        rho = self.pi_relation()
        coeffs = [0] * self.dim
        for i in range(self.e):
            coeffs[i * self.k] = rho[i] // self.p
        eta = PadicElement(self, coeffs, P, 0)
        inv = eta.inverse()
        cache.clear()
        cache[P] = inv
        return inv.with_prec(prec)


_RING_CACHE: dict = {}


def make_ring(p: int, kind: str = "base", k: int = 1) -> RingDescriptor:
    """Ring descriptor for Z_p, the degree-k unramified ring, or Z_q[zeta_p]."""
    check_prime(p)
    if isinstance(k, bool) or not isinstance(k, int) or k < 1:
        raise InvalidDegree(f"degree must be a positive integer, got {k!r}")
    kind = {"unramified_p": "unramified", "cyclotomic_p": "cyclotomic"}.get(kind, kind)
    if kind not in ("base", "unramified", "cyclotomic"):
        raise InputError(f"unknown ring kind {kind!r}")
    if kind == "base" and k != 1:
        raise InvalidDegree("the base ring has degree 1")
    key = (p, kind, k)
    if key not in _RING_CACHE:
        modulus = (0, 1) if kind == "base" else least_irreducible(p, k)
        e = p - 1 if kind == "cyclotomic" else 1
        _RING_CACHE[key] = RingDescriptor(p, kind, k, modulus, e)
    return _RING_CACHE[key]


# ---------------------------------------------------------------------------
# raw coefficient arithmetic


def _raw_mul(ring: RingDescriptor, a, b, m):
    """Product of coefficient vectors; reduced mod m if m is given."""
    k, e = ring.k, ring.e
    if e == 1:
        if k == 1:
            return [a[0] * b[0] if m is None else (a[0] * b[0]) % m]
        return _poly_mul_unreduced_mod(a, b, ring.modulus, m)
    blocks_a = [a[i * k:(i + 1) * k] for i in range(e)]
    blocks_b = [b[i * k:(i + 1) * k] for i in range(e)]
    prod = [[0] * k for _ in range(2 * e - 1)]
    for i, A in enumerate(blocks_a):
        if not any(A):
            continue
        for j, B in enumerate(blocks_b):
            if not any(B):
                continue
            c = _poly_mul_unreduced_mod(A, B, ring.modulus, None)
            t = prod[i + j]
            for idx in range(k):
                t[idx] += c[idx]
    rho = ring.pi_relation()
    for t in range(2 * e - 2, e - 1, -1):
        ct = prod[t]
        if any(ct):
            for i in range(e):
                tgt = prod[t - e + i]
                r = rho[i]
                for idx in range(k):
                    tgt[idx] += r * ct[idx]
    out = []
    for i in range(e):
        out.extend(prod[i])
    if m is not None:
        out = [c % m for c in out]
    return out


def _poly_mul_unreduced_mod(a, b, f, m):
    k = len(f) - 1
    prod = [0] * (2 * k - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                if bj:
                    prod[i + j] += ai * bj
    for t in range(2 * k - 2, k - 1, -1):
        c = prod[t]
        if c:
            for i in range(k):
                prod[t - k + i] -= c * f[i]
    out = prod[:k]
    if m is not None:
        out = [c % m for c in out]
    return out


def _compute_frobenius_matrix(ring: RingDescriptor, prec: int):
    """Hensel-lift the root of f congruent to y^p and tabulate its powers."""
    p, k = ring.p, ring.k
    if k == 1:
        return [[1]]
    base = make_ring(p, "unramified", k)
    P = prec + 2
    rf = base.residue_field
    y = (0, 1) + (0,) * (k - 2)
    r = base.element(list(rf.pow(y, p)), P)
    f = list(base.modulus)
    fprime = [i * f[i] for i in range(1, len(f))]

    def peval(coeffs, x):
        acc = base.zero(P)
        for c in reversed(coeffs):
            acc = acc * x + c
        return acc

    for _ in range(P.bit_length() + 2):
        val = peval(f, r)
        if val.is_zero():
            break
        r = r - val / peval(fprime, r)
    assert peval(f, r).is_zero(), "Frobenius lift failed"
    m = p ** prec
    cols = []
    power = base.one(P)
    for _ in range(k):
        cols.append([c % m for c in power.coeffs])
        power = power * r
    return [[cols[j][i] for j in range(k)] for i in range(k)]


# ---------------------------------------------------------------------------


class AtLeast:
    """Marker for a valuation that is not below the precision bound."""

    __slots__ = ("bound",)

    def __init__(self, bound):
        self.bound = _norm(Fraction(bound))

    def __repr__(self):
        return f"≥ {self.bound}"

    def __eq__(self, other):
        return isinstance(other, AtLeast) and other.bound == self.bound

    def to_json(self):
        return {"at_least": str(self.bound)}


class PadicElement:
    """Element of a ring from :func:`make_ring` (or its fraction field)."""

    __slots__ = ("ring", "coeffs", "prec", "shift")

    def __init__(self, ring: RingDescriptor, coeffs, prec, shift: int = 0):
        self.ring = ring
        self.prec = _norm(Fraction(prec))
        self.shift = shift
        self.coeffs = self._reduce(list(coeffs))
        self._normalize()

    # -- internals ------------------------------------------------------------

    def _moduli(self):
        p, k, e = self.ring.p, self.ring.k, self.ring.e
        top = Fraction(self.prec) + self.shift
        if e == 1:
            m = p ** max(_ceil(top), 0)
            return [m] * self.ring.dim
        mods = []
        for i in range(e):
            m = p ** max(_ceil(top - Fraction(i, e)), 0)
            mods.extend([m] * k)
        return mods

    def _reduce(self, coeffs):
        return [c % m for c, m in zip(coeffs, self._moduli())]

    def _normalize(self):
        p = self.ring.p
        if not any(self.coeffs):
            self.shift = 0
            self.coeffs = self._reduce(self.coeffs)
            return
        while self.shift > 0 and all(c % p == 0 for c in self.coeffs):
            self.coeffs = [c // p for c in self.coeffs]
            self.shift -= 1

    def _num_val(self):
        """Valuation of the numerator vector (None if zero)."""
        p, k, e = self.ring.p, self.ring.k, self.ring.e
        best = None
        for idx, c in enumerate(self.coeffs):
            if c:
                v = vp(c, p) + Fraction(idx // k, e)
                if best is None or v < best:
                    best = v
        return best

    def _like(self, coeffs, prec, shift):
        return PadicElement(self.ring, coeffs, prec, shift)

    def _coerce(self, other, for_mul: bool):
        if isinstance(other, PadicElement):
            if other.ring != self.ring:
                other = other.change_ring(self.ring)
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            v = vp_rational(other, self.ring.p) or 0
            vb = self.val_bound()
            extra = abs(v) + abs(vb) + 2 if for_mul else 0
            return self.ring.element(other, _ceil(Fraction(self.prec)) + extra)
        return NotImplemented

    # -- public API -----------------------------------------------------------

    @property
    def p(self) -> int:
        return self.ring.p

    def valuation(self):
        """Exact valuation (Fraction/int) or an :class:`AtLeast` marker."""
        v = self._num_val()
        if v is None:
            return AtLeast(self.prec)
        return _norm(v - self.shift)

    def val_bound(self):
        """Valuation, or the precision bound when the element is ~0."""
        v = self.valuation()
        return v.bound if isinstance(v, AtLeast) else v

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_unit(self) -> bool:
        v = self.valuation()
        return not isinstance(v, AtLeast) and v == 0

    def is_integral(self) -> bool:
        v = self.valuation()
        return isinstance(v, AtLeast) or v >= 0

    def with_prec(self, prec) -> "PadicElement":
        prec = min(Fraction(prec), Fraction(self.prec))
        return self._like(self.coeffs, prec, self.shift)

    def lift_prec(self, prec) -> "PadicElement":
        """Pretend the stored representative is exact to the given precision."""
        return self._like(self.coeffs, prec, self.shift)

    def change_ring(self, ring: RingDescriptor) -> "PadicElement":
        if ring == self.ring:
            return self
        src = self.ring
        if ring.p != src.p:
            raise InputError("rings over different primes")
        if src.kind == "base" or (src.k == 1 and src.e == 1):
            coeffs = [self.coeffs[0]] + [0] * (ring.dim - 1)
            return PadicElement(ring, coeffs, self.prec, self.shift)
        if src.e == 1 and ring.kind == "cyclotomic" and ring.k == src.k:
            coeffs = list(self.coeffs) + [0] * (ring.dim - src.dim)
            return PadicElement(ring, coeffs, self.prec, self.shift)
        if src.kind == "cyclotomic" and ring.e == 1 and ring.k == src.k:
            if any(self.coeffs[src.k:]):
                raise InputError("element does not lie in the unramified subring")
            return PadicElement(ring, self.coeffs[:src.k], self.prec, self.shift)
        raise InputError(f"no canonical map {src!r} -> {ring!r}")

    def __add__(self, other):
        other = self._coerce(other, False)
        if other is NotImplemented:
            return other
        s = max(self.shift, other.shift)
        p = self.ring.p
        a = self.coeffs if s == self.shift else [c * p ** (s - self.shift) for c in self.coeffs]
        b = other.coeffs if s == other.shift else [c * p ** (s - other.shift) for c in other.coeffs]
        return self._like([x + y for x, y in zip(a, b)], min(self.prec, other.prec), s)

    __radd__ = __add__

    def __neg__(self):
        return self._like([-c for c in self.coeffs], self.prec, self.shift)

    def __sub__(self, other):
        other = self._coerce(other, False)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other, True)
        if other is NotImplemented:
            return other
        prec = min(self.prec + other.val_bound(), other.prec + self.val_bound())
        shift = self.shift + other.shift
        top = Fraction(prec) + shift
        m = self.ring.p ** max(_ceil(top), 0)
        coeffs = _raw_mul(self.ring, self.coeffs, other.coeffs, m)
        return self._like(coeffs, prec, shift)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = self.ring.one(self.prec + abs(self.val_bound()) * n + 2)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def _unit_inverse(self) -> "PadicElement":
        """Inverse of a unit with shift 0."""
        ring, p = self.ring, self.ring.p
        P = _ceil(Fraction(self.prec))
        if ring.e == 1 and ring.k == 1:
            m = p ** P
            return self._like([pow(self.coeffs[0], -1, m)], self.prec, 0)
        rf = ring.residue_field
        lead = tuple(c % p for c in self.coeffs[: ring.k])
        z0 = ring.from_residue(rf.inv(lead), self.prec)
        z = z0
        one = ring.one(self.prec)
        target = Fraction(self.prec)
        for _ in range(2 * max(P, 1).bit_length() + 2 * ring.e + 4):
            err = one - self * z
            if err.is_zero():
                break
            z = z + z * err
        if not (one - self * z).is_zero():
            raise PrecisionExhausted("unit inversion did not converge")
        return z.with_prec(target)

    def inverse(self) -> "PadicElement":
        v = self.valuation()
        if isinstance(v, AtLeast):
            raise PrecisionExhausted("division by an element indistinguishable from 0")
        ring, p, e = self.ring, self.ring.p, self.ring.e
        # split value = p^a * pi^b * w with w a unit
        num_v = self._num_val()
        a = int(num_v // 1)
        b = int((num_v - a) * e)
        coeffs = [c // p ** a for c in self.coeffs] if e == 1 else None
        if e == 1:
            w = PadicElement(ring, coeffs, Fraction(self.prec) + self.shift - a, 0)
            return _shifted(w._unit_inverse(), a - self.shift)
        # cyclotomic: divide numerator by p^a then by pi^b
        num = PadicElement(ring, self.coeffs, Fraction(self.prec) + self.shift, 0)
        w = _exact_div_p(num, a)
        for _ in range(b):
            w = _exact_div_pi(w)
        winv = w._unit_inverse()
        # value^-1 = p^shift * winv / (p^a pi^b)
        res = winv
        for _ in range(b):
            res = _mul_pi_inverse(res)
        return _shifted(res, a - self.shift)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            other = Fraction(other)
            if other == 0:
                raise ZeroDivisionError
            return self * (1 / other)
        other = self._coerce(other, False)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __eq__(self, other):
        try:
            diff = self - other
        except Exception:
            return NotImplemented
        if diff is NotImplemented:
            return NotImplemented
        return diff.is_zero()

    __hash__ = None

    def frobenius(self, power: int = 1) -> "PadicElement":
        ring = self.ring
        if ring.k == 1 or power % ring.k == 0:
            return self
        P = max(_ceil(Fraction(self.prec)) + self.shift, 1)
        mat = ring.frobenius_matrix(P)
        k = ring.k
        coeffs = list(self.coeffs)
        for _ in range(power % k):
            new = []
            for i in range(ring.e):
                block = coeffs[i * k:(i + 1) * k]
                new.extend(sum(mat[r][j] * block[j] for j in range(k)) for r in range(k))
            coeffs = new
        return self._like(coeffs, self.prec, self.shift)

    def residue(self):
        """Image in the residue field (requires an integral element)."""
        if not self.is_integral():
            raise ArithmeticError("residue of a non-integral element")
        if self.shift:
            return (0,) * self.ring.k
        return tuple(c % self.ring.p for c in self.coeffs[: self.ring.k])

    def to_fraction(self) -> Fraction:
        """Representative in Q (base ring only)."""
        if self.ring.dim != 1:
            raise InputError("to_fraction needs a rank-one ring")
        return Fraction(self.coeffs[0], self.ring.p ** self.shift)

    def signed_rep(self) -> Fraction:
        """Representative with numerator in the symmetric range (base ring)."""
        m = self._moduli()[0]
        c = self.coeffs[0]
        if m > 1 and c > m // 2:
            c -= m
        return Fraction(c, self.ring.p ** self.shift)

    def to_json(self) -> dict:
        d = {
            "ring": self.ring.to_json(),
            "coeffs": [str(c) for c in self.coeffs],
            "prec": str(self.prec),
        }
        if self.shift:
            d["shift"] = self.shift
        return d

    @classmethod
    def from_json(cls, d: dict) -> "PadicElement":
        ring = RingDescriptor.from_json(d["ring"])
        return cls(ring, [int(c) for c in d["coeffs"]], Fraction(d["prec"]), int(d.get("shift", 0)))

    def __repr__(self):
        if self.ring.dim == 1:
            body = str(self.signed_rep())
        else:
            body = "[" + ", ".join(str(c) for c in self.coeffs) + "]"
            if self.shift:
                body += f"/{self.ring.p}^{self.shift}"
        return f"{body} + O({self.ring.p}^{self.prec})"


def _shifted(x: PadicElement, s: int) -> PadicElement:
    """x * p^(-s) exactly."""
    if s >= 0:
        return PadicElement(x.ring, x.coeffs, Fraction(x.prec) - s, x.shift + s)
    p = x.ring.p
    return PadicElement(x.ring, [c * p ** (-s) for c in x.coeffs], Fraction(x.prec) - s, x.shift)


def _exact_div_p(x: PadicElement, a: int) -> PadicElement:
    if a == 0:
        return x
    p = x.ring.p
    q = p ** a
    assert all(c % q == 0 for c in x.coeffs)
    return PadicElement(x.ring, [c // q for c in x.coeffs], Fraction(x.prec) - a, 0)


def _mul_pi_inverse(x: PadicElement) -> PadicElement:
    """x / pi = x * pi^(e-1) * eta^-1 / p."""
    ring = x.ring
    t = x
    pi = ring.uniformizer(Fraction(x.prec) + 2)
    for _ in range(ring.e - 1):
        t = t * pi
    t = t * ring.eta_inverse(Fraction(x.prec) + 2)
    return _shifted(t, 1)


def _exact_div_pi(x: PadicElement) -> PadicElement:
    """Divide an integral multiple of pi by pi, staying integral."""
    y = _mul_pi_inverse(x)
    if y.shift:
        y = PadicElement(y.ring, [c // y.ring.p ** y.shift for c in y.coeffs], y.prec, 0) \
            if all(c % y.ring.p ** y.shift == 0 for c in y.coeffs) else y
    return y


# ---------------------------------------------------------------------------
# public operations


def frobenius(x: PadicElement, power: int = 1) -> PadicElement:
    """Arithmetic Frobenius (identity on Z_p and on zeta_p)."""
    return x.frobenius(power)


def teichmuller(c, ring: RingDescriptor, prec=None) -> PadicElement:
    """The (q-1)-th root of unity (or 0) lifting the residue c."""
    prec = DEFAULT_PREC if prec is None else prec
    rf = ring.residue_field
    if isinstance(c, int):
        c = rf.from_int(c)
    c = tuple(int(x) % ring.p for x in c) + (0,) * (ring.k - len(c))
    if rf.is_zero(c):
        return ring.zero(prec)
    q = ring.q
    P = _ceil(Fraction(prec)) + 2
    x = ring.from_residue(c, P)
    for _ in range(P.bit_length() + 3):
        xq1 = x ** (q - 1)
        err = xq1 - 1
        if err.is_zero():
            break
        x = x - err * x / (xq1 * (q - 1))
    assert (x ** (q - 1) - 1).is_zero()
    return x.with_prec(prec)


def valuation(x: PadicElement):
    return x.valuation()

"""Truncated multivariate power series over Z_p and Q_p.

A series stores one numerator per monomial of total degree <= D, a common
p-power denominator ``shift`` and a single absolute precision ``prec``:
coefficient(alpha) = num[alpha] / p**shift, known modulo p**prec.
Monomials are enumerated by (degree, lexicographic) order; see
:class:`MonomialIndex`.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import (
    ConstantTermNonzero,
    ConvergenceViolation,
    DimensionMismatch,
    SingularLinearPart,
    TailTooWeak,
)
from .padic_core import DEFAULT_PREC, AtLeast, PadicElement, make_ring, vp

# ---------------------------------------------------------------------------
# monomial bookkeeping


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


class MonomialIndex:
    """All exponent vectors in ``nvars`` variables of total degree <= D."""

    def __init__(self, nvars: int, D: int):
        self.nvars, self.D = nvars, D
        exps = [e for deg in range(D + 1) for e in _compositions(deg, nvars)] if nvars else [()]
        self.exps = exps
        self.pos = {e: i for i, e in enumerate(exps)}
        self.size = len(exps)
        self.degrees = np.fromiter((sum(e) for e in exps), dtype=np.int64, count=self.size)
        # offsets[d] = first index of degree d; offsets[D+1] = size
        self.offsets = np.searchsorted(self.degrees, np.arange(D + 2))
        self.exp_array = np.array(exps, dtype=np.int64).reshape(self.size, nvars)
        radix = (D + 1) ** np.arange(nvars, dtype=np.int64)
        self.codes = self.exp_array @ radix if nvars else np.zeros(1, dtype=np.int64)
        self._code_order = np.argsort(self.codes)
        self._sorted_codes = self.codes[self._code_order]
        self._mul = None

    def index_of_codes(self, codes):
        return self._code_order[np.searchsorted(self._sorted_codes, codes)]

    def mul_table(self):
        """(I, J, K) with exps[I] + exps[J] = exps[K], sorted by I, plus block starts."""
        if self._mul is None:
            counts = self.offsets[self.D + 1 - self.degrees]
            I = np.repeat(np.arange(self.size), counts)
            starts = np.concatenate(([0], np.cumsum(counts)))
            J = np.concatenate([np.arange(c) for c in counts])
            K = self.index_of_codes(self.codes[I] + self.codes[J])
            self._mul = (I, J, K, starts)
        return self._mul


@lru_cache(maxsize=None)
def monomial_index(nvars: int, D: int) -> MonomialIndex:
    return MonomialIndex(nvars, D)


def _obj_zeros(n):
    out = np.empty(n, dtype=object)
    out.fill(0)
    return out


def _ceil_int(x) -> int:
    x = Fraction(x)
    return -((-x.numerator) // x.denominator)


def _floor_log(n: int, p: int) -> int:
    i = 0
    while p ** (i + 1) <= n:
        i += 1
    return i


# ---------------------------------------------------------------------------


class TruncSeries:
    __slots__ = ("p", "nvars", "D", "num", "shift", "prec")

    def __init__(self, p: int, nvars: int, D: int, num, shift: int = 0, prec=None):
        self.p, self.nvars, self.D = p, nvars, D
        self.prec = DEFAULT_PREC if prec is None else int(prec)
        self.shift = shift
        num = np.asarray(num, dtype=object)
        if num.shape != (monomial_index(nvars, D).size,):
            raise DimensionMismatch("coefficient vector has the wrong length")
        self.num = num
        self._normalize()

    # -- internals ------------------------------------------------------------

    def _normalize(self):
        p = self.p
        top = self.prec + self.shift
        if top <= 0:
            self.num = _obj_zeros(self.num.size)
            self.shift = 0
            return
        self.num = self.num % (p ** top)
        if self.shift > 0:
            g = 0
            for c in self.num:
                if c:
                    g = math.gcd(g, int(c))
                    if g == 1:
                        break
            if g == 0:
                self.shift = 0
                self.num = self.num % (p ** self.prec) if self.prec > 0 else _obj_zeros(self.num.size)
                return
            k = min(vp(g, p), self.shift)
            if k:
                self.num = self.num // (p ** k)
                self.shift -= k

    @property
    def index(self) -> MonomialIndex:
        return monomial_index(self.nvars, self.D)

    def _like(self, num, shift, prec, D=None, nvars=None):
        return TruncSeries(self.p, self.nvars if nvars is None else nvars,
                           self.D if D is None else D, num, shift, prec)

    # -- constructors ---------------------------------------------------------

    @classmethod
    def zero(cls, p, nvars, D, prec=None):
        return cls(p, nvars, D, _obj_zeros(monomial_index(nvars, D).size), 0, prec)

    @classmethod
    def from_terms(cls, p, nvars, D, terms: dict, prec=None):
        """Build from {exponent tuple: int | Fraction}; degrees above D are dropped."""
        idx = monomial_index(nvars, D)
        fr = {e: Fraction(c) for e, c in terms.items() if sum(e) <= D and c != 0}
        shift = max((vp(c.denominator, p) or 0 for c in fr.values()), default=0)
        prec = DEFAULT_PREC if prec is None else prec
        mod = p ** max(prec + shift, 1)
        num = _obj_zeros(idx.size)
        for e, c in fr.items():
            den_p = p ** (vp(c.denominator, p) or 0)
            unit = c.denominator // den_p
            num[idx.pos[tuple(e)]] = c.numerator * (p ** shift // den_p) * pow(unit, -1, mod) % mod
        return cls(p, nvars, D, num, shift, prec)

    @classmethod
    def variable(cls, p, nvars, D, v, prec=None):
        e = tuple(int(i == v) for i in range(nvars))
        return cls.from_terms(p, nvars, D, {e: 1}, prec)

    @classmethod
    def constant(cls, p, nvars, D, c, prec=None):
        return cls.from_terms(p, nvars, D, {(0,) * nvars: c}, prec)

    # -- access ---------------------------------------------------------------

    def coeff(self, exp) -> Fraction:
        return Fraction(int(self.num[self.index.pos[tuple(exp)]]), self.p ** self.shift)

    def coeff_element(self, exp) -> PadicElement:
        ring = make_ring(self.p)
        return PadicElement(ring, [int(self.num[self.index.pos[tuple(exp)]])], self.prec, self.shift)

    def signed_coeff(self, exp) -> Fraction:
        """Representative with numerator in the symmetric range mod p^(prec+shift)."""
        m = self.p ** (self.prec + self.shift)
        c = int(self.num[self.index.pos[tuple(exp)]])
        if c > m // 2:
            c -= m
        return Fraction(c, self.p ** self.shift)

    def terms(self):
        """Iterate (exponent, Fraction) over stored nonzero coefficients."""
        den = self.p ** self.shift
        for i in np.flatnonzero(self.num != 0):
            yield self.index.exps[i], Fraction(int(self.num[i]), den)

    def valuations(self):
        """{exponent: valuation} of nonzero coefficients."""
        return {e: vp(c.numerator, self.p) - vp(c.denominator, self.p) for e, c in self.terms()}

    def minval(self):
        """Least coefficient valuation; the precision when every coefficient is ~0."""
        best = None
        for c in self.num:
            if c:
                v = vp(int(c), self.p)
                if best is None or v < best:
                    best = v
                    if best == 0:
                        break
        return self.prec if best is None else best - self.shift

    def is_zero(self) -> bool:
        return not np.any(self.num != 0)

    def constant_term(self) -> Fraction:
        return Fraction(int(self.num[0]), self.p ** self.shift)

    def degree_part(self, d: int) -> "TruncSeries":
        idx = self.index
        num = _obj_zeros(idx.size)
        a, b = idx.offsets[d], idx.offsets[d + 1]
        num[a:b] = self.num[a:b]
        return self._like(num, self.shift, self.prec)

    def truncate(self, D: int) -> "TruncSeries":
        """Drop degrees above D and re-index with cap D (D <= self.D)."""
        if D == self.D:
            return self
        if D > self.D:
            return self.extend_cap(D)
        n = monomial_index(self.nvars, D).size
        return self._like(self.num[:n].copy(), self.shift, self.prec, D=D)

    def extend_cap(self, D: int) -> "TruncSeries":
        """Same coefficients under a larger cap (new degrees set to 0)."""
        num = _obj_zeros(monomial_index(self.nvars, D).size)
        num[: self.num.size] = self.num
        return self._like(num, self.shift, self.prec, D=D)

    def with_prec(self, prec) -> "TruncSeries":
        return self._like(self.num, self.shift, min(int(prec), self.prec))

    def lift_prec(self, prec) -> "TruncSeries":
        return self._like(self.num, self.shift, int(prec))

    # -- arithmetic -----------------------------------------------------------

    def _align(self, other):
        if not isinstance(other, TruncSeries):
            other = TruncSeries.constant(self.p, self.nvars, self.D, Fraction(other), self.prec + self.shift + 2)
        if (other.nvars, other.D, other.p) != (self.nvars, self.D, self.p):
            raise DimensionMismatch("series shapes differ")
        s = max(self.shift, other.shift)
        a = self.num * (self.p ** (s - self.shift)) if s != self.shift else self.num
        b = other.num * (self.p ** (s - other.shift)) if s != other.shift else other.num
        return a, b, s, other

    def __add__(self, other):
        a, b, s, other = self._align(other)
        return self._like(a + b, s, min(self.prec, other.prec))

    __radd__ = __add__

    def __neg__(self):
        return self._like(-self.num, self.shift, self.prec)

    def __sub__(self, other):
        a, b, s, other = self._align(other)
        return self._like(a - b, s, min(self.prec, other.prec))

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "TruncSeries":
        """Multiply by a rational scalar or a Z_p/Q_p element."""
        if isinstance(c, PadicElement):
            cnum, cshift, cprec = c.coeffs[0], c.shift, c.prec
            cval = c.val_bound()
        else:
            c = Fraction(c)
            if c == 0:
                return self._like(_obj_zeros(self.num.size), 0, self.prec)
            v = vp(c.numerator, self.p) - vp(c.denominator, self.p)
            cshift = max(-v, 0)
            mod = self.p ** (self.prec + self.shift + cshift + abs(v) + 2)
            scaled = c * self.p ** cshift
            cnum = scaled.numerator * pow(scaled.denominator, -1, mod) % mod
            cprec, cval = None, v
        mv = self.minval()
        prec = self.prec + cval if cprec is None else min(self.prec + cval, cprec + mv)
        return self._like(self.num * cnum, self.shift + cshift, prec)

    def __mul__(self, other):
        if not isinstance(other, TruncSeries):
            return self.scale(other)
        if (other.nvars, other.D, other.p) != (self.nvars, self.D, self.p):
            raise DimensionMismatch("series shapes differ")
        prec = min(self.prec + other.minval(), other.prec + self.minval())
        shift = self.shift + other.shift
        return self._like(_raw_product(self.index, self.num, other.num), shift, prec)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        result = TruncSeries.constant(self.p, self.nvars, self.D, 1, self.prec + 2 * n)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        if not isinstance(other, TruncSeries):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def derivative(self, v: int) -> "TruncSeries":
        """d/dX_v, capped at D - 1."""
        idx = self.index
        D1 = max(self.D - 1, 0)
        out_idx = monomial_index(self.nvars, D1)
        num = _obj_zeros(out_idx.size)
        e = idx.exp_array
        mask = e[:, v] > 0
        src = np.flatnonzero(mask)
        if src.size:
            tgt_exps = e[src].copy()
            tgt_exps[:, v] -= 1
            keep = tgt_exps.sum(axis=1) <= D1
            src, tgt_exps = src[keep], tgt_exps[keep]
            radix = (D1 + 1) ** np.arange(self.nvars, dtype=np.int64)
            tgt = out_idx.index_of_codes(tgt_exps @ radix)
            num[tgt] = self.num[src] * e[src, v].astype(object)
        return self._like(num, self.shift, self.prec, D=D1)

    def dilate(self, k: int) -> "TruncSeries":
        """f(p^k X) / p^k.  The constant term must vanish."""
        if self.num[0]:
            raise ConstantTermNonzero("dilate expects a series without constant term")
        deg = self.index.degrees.astype(object)
        if k >= 0:
            num = self.num * np.array([self.p ** (k * (int(d) - 1)) if d else 0 for d in deg], dtype=object)
            return self._like(num, self.shift, self.prec)
        k = -k
        mult = np.array([self.p ** (k * (self.D - int(d))) if d else 0 for d in deg], dtype=object)
        return self._like(self.num * mult, self.shift + k * (self.D - 1), self.prec - k * (self.D - 1))

    def embed(self, nvars: int, var_map) -> "TruncSeries":
        """Rename variable i to var_map[i] inside ``nvars`` variables."""
        idx = self.index
        out_idx = monomial_index(nvars, self.D)
        radix = (self.D + 1) ** np.asarray(var_map, dtype=np.int64)
        codes = idx.exp_array @ radix if self.nvars else np.zeros(1, dtype=np.int64)
        num = _obj_zeros(out_idx.size)
        num[out_idx.index_of_codes(codes)] = self.num
        return self._like(num, self.shift, self.prec, nvars=nvars)

    def times_monomial(self, beta) -> "TruncSeries":
        """Multiply by X^beta (truncating)."""
        b = np.asarray(beta, dtype=np.int64)
        db = int(b.sum())
        idx = self.index
        keep = np.flatnonzero(idx.degrees <= self.D - db)
        radix = (self.D + 1) ** np.arange(self.nvars, dtype=np.int64)
        tgt = idx.index_of_codes(idx.codes[keep] + int(b @ radix))
        num = _obj_zeros(idx.size)
        num[tgt] = self.num[keep]
        return self._like(num, self.shift, self.prec)

    def substitute_frobenius_power(self) -> "TruncSeries":
        """X_i -> X_i^p."""
        idx = self.index
        e = idx.exp_array * self.p
        keep = np.flatnonzero(e.sum(axis=1) <= self.D)
        radix = (self.D + 1) ** np.arange(self.nvars, dtype=np.int64)
        num = _obj_zeros(idx.size)
        num[idx.index_of_codes(e[keep] @ radix)] = self.num[keep]
        return self._like(num, self.shift, self.prec)

    # -- serialization --------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "vars": self.nvars,
            "cap": self.D,
            "p": self.p,
            "prec": self.prec,
            "terms": [{"exp": list(e), "coeff": str(c)} for e, c in self.terms()],
        }

    @classmethod
    def from_json(cls, d: dict) -> "TruncSeries":
        terms = {tuple(t["exp"]): Fraction(t["coeff"]) for t in d["terms"]}
        return cls.from_terms(d["p"], d["vars"], d["cap"], terms, d.get("prec"))

    def __repr__(self):
        parts = []
        for e, c in list(self.terms())[:8]:
            mono = "*".join(f"X{i}^{k}" if k > 1 else f"X{i}" for i, k in enumerate(e) if k) or "1"
            parts.append(f"({c})*{mono}")
        more = " + ..." if np.count_nonzero(self.num != 0) > 8 else ""
        return (" + ".join(parts) or "0") + more + f" + O(deg {self.D + 1}, {self.p}^{self.prec})"


def _raw_product(idx: MonomialIndex, a, b):
    """Truncated product of numerator vectors."""
    nza = np.flatnonzero(a != 0)
    nzb = np.flatnonzero(b != 0)
    if nza.size == 0 or nzb.size == 0:
        return _obj_zeros(idx.size)
    if nzb.size < nza.size:
        a, b, nza = b, a, nzb
    I, J, K, starts = idx.mul_table()
    if nza.size == idx.size:
        sel = slice(None)
        Isel, Jsel, Ksel = I, J, K
    else:
        sel = np.concatenate([np.arange(starts[i], starts[i + 1]) for i in nza])
        Isel, Jsel, Ksel = I[sel], J[sel], K[sel]
    prods = a[Isel] * b[Jsel]
    out = _obj_zeros(idx.size)
    np.add.at(out, Ksel, prods)
    return out


# ---------------------------------------------------------------------------
# vectors of series


class SeriesVec:
    """Tuple of series sharing p, number of variables and cap."""

    __slots__ = ("comps",)

    def __init__(self, comps):
        comps = list(comps)
        if not comps:
            raise DimensionMismatch("empty series vector")
        shape = {(c.p, c.nvars, c.D) for c in comps}
        if len(shape) != 1:
            raise DimensionMismatch("components of different shapes")
        self.comps = comps

    @classmethod
    def identity(cls, p, r, D, prec=None):
        return cls([TruncSeries.variable(p, r, D, v, prec) for v in range(r)])

    @property
    def p(self):
        return self.comps[0].p

    @property
    def nvars(self):
        return self.comps[0].nvars

    @property
    def D(self):
        return self.comps[0].D

    @property
    def prec(self):
        return min(c.prec for c in self.comps)

    def __len__(self):
        return len(self.comps)

    def __getitem__(self, i):
        return self.comps[i]

    def __iter__(self):
        return iter(self.comps)

    def map(self, fn) -> "SeriesVec":
        return SeriesVec([fn(c) for c in self.comps])

    def __add__(self, other):
        return SeriesVec([a + b for a, b in zip(self.comps, other.comps)])

    def __sub__(self, other):
        return SeriesVec([a - b for a, b in zip(self.comps, other.comps)])

    def __neg__(self):
        return self.map(lambda c: -c)

    def __eq__(self, other):
        if not isinstance(other, SeriesVec) or len(other) != len(self):
            return NotImplemented
        return all(a == b for a, b in zip(self.comps, other.comps))

    __hash__ = None

    def is_zero(self):
        return all(c.is_zero() for c in self.comps)

    def minval(self):
        return min(c.minval() for c in self.comps)

    def linear_matrix(self):
        """Coefficient matrix of the degree-1 part as Fractions (rows = components)."""
        n = self.nvars
        return [[c.coeff(tuple(int(i == j) for i in range(n))) for j in range(n)] for c in self.comps]

    def apply_matrix(self, M) -> "SeriesVec":
        """Left-multiply the column vector of components by a rational matrix."""
        out = []
        for row in M:
            acc = None
            for coef, comp in zip(row, self.comps):
                if Fraction(coef) == 0:
                    continue
                term = comp.scale(coef)
                acc = term if acc is None else acc + term
            out.append(acc if acc is not None else TruncSeries.zero(self.p, self.nvars, self.D, self.prec))
        return SeriesVec(out)

    def truncate(self, D):
        return self.map(lambda c: c.truncate(D))

    def with_prec(self, prec):
        return self.map(lambda c: c.with_prec(prec))

    def dilate(self, k):
        return self.map(lambda c: c.dilate(k))

    def embed(self, nvars, var_map):
        return self.map(lambda c: c.embed(nvars, var_map))

    def to_json(self):
        return [c.to_json() for c in self.comps]

    @classmethod
    def from_json(cls, data):
        return cls([TruncSeries.from_json(d) for d in data])

    def __repr__(self):
        return "SeriesVec(" + ", ".join(repr(c) for c in self.comps) + ")"


def _as_vec(f):
    return f if isinstance(f, SeriesVec) else SeriesVec([f])


# ---------------------------------------------------------------------------
# composition


def _pure_variable(g: TruncSeries):
    """Index w if g is exactly the variable X_w, else None."""
    if g.shift:
        return None
    nz = np.flatnonzero(g.num != 0)
    if nz.size != 1 or g.num[nz[0]] != 1:
        return None
    e = g.index.exps[nz[0]]
    if sum(e) != 1:
        return None
    return e.index(1)


def _used_variables(g: TruncSeries):
    nz = np.flatnonzero(g.num != 0)
    if nz.size == 0:
        return set()
    return set(np.flatnonzero(g.index.exp_array[nz].sum(axis=0)).tolist())


class _PowerCache:
    """Products g^alpha of a list of series, built on demand."""

    def __init__(self, comps, D):
        self.comps = comps
        self.D = D
        s = len(comps)
        base = comps[0]
        self.cache = {(0,) * s: TruncSeries.constant(base.p, base.nvars, D, 1, max(c.prec for c in comps) + 2)}

    def get(self, alpha):
        alpha = tuple(alpha)
        hit = self.cache.get(alpha)
        if hit is not None:
            return hit
        nz = [i for i, a in enumerate(alpha) if a]
        v = nz[-1]
        if len(nz) == 1:
            k = alpha[v]
            half = list(alpha)
            if k % 2 == 0:
                half[v] = k // 2
                h = self.get(half)
                res = h * h
            else:
                half[v] = k - 1
                res = self.get(half) * self.comps[v]
        else:
            rest = list(alpha)
            rest[v] = 0
            pure = [0] * len(alpha)
            pure[v] = alpha[v]
            res = self.get(rest) * self.get(pure)
        self.cache[alpha] = res
        return res


def compose(f, g) -> SeriesVec:
    """f o g for f in s variables and g a vector of s series without constant terms."""
    f, g = _as_vec(f), _as_vec(g)
    s, t = f.nvars, g.nvars
    if len(g) != s:
        raise DimensionMismatch(f"f has {s} variables but g has {len(g)} components")
    for comp in g:
        if comp.num[0]:
            raise ConstantTermNonzero("inner series must have zero constant term")
    D = min(f.D, g.D)
    p = f.p
    gD = [c.truncate(D) for c in g]
    pure = [_pure_variable(c) for c in gD]
    nonpure = [i for i in range(s) if pure[i] is None]
    used = set().union(*(_used_variables(gD[i]) for i in nonpure)) if nonpure else set()
    pure_targets = [pure[i] for i in range(s) if pure[i] is not None]
    if used & set(pure_targets) or len(set(pure_targets)) != len(pure_targets):
        pure = [None] * s
        nonpure = list(range(s))
        used = set().union(*(_used_variables(c) for c in gD))
    sub_vars = sorted(used)
    if not sub_vars and nonpure:
        sub_vars = [0]
    sub_map = {v: i for i, v in enumerate(sub_vars)}
    # restrict non-pure components to the variables they use
    restricted = []
    for i in nonpure:
        comp = gD[i]
        idx = comp.index
        sub_idx = monomial_index(len(sub_vars), D)
        num = _obj_zeros(sub_idx.size)
        nz = np.flatnonzero(comp.num != 0)
        if nz.size:
            sub_exps = idx.exp_array[nz][:, sub_vars]
            radix = (D + 1) ** np.arange(len(sub_vars), dtype=np.int64)
            num[sub_idx.index_of_codes(sub_exps @ radix)] = comp.num[nz]
        restricted.append(TruncSeries(p, len(sub_vars), D, num, comp.shift, comp.prec))
    cache = _PowerCache(restricted, D) if restricted else None
    out = [_compose_one(fc.truncate(D), nonpure, pure, cache, sub_vars, t, D) for fc in f]
    return SeriesVec(out)


def _compose_one(fc: TruncSeries, nonpure, pure, cache, sub_vars, t, D):
    p = fc.p
    idx = fc.index
    nz = np.flatnonzero(fc.num != 0)
    groups: dict = {}
    for i in nz:
        e = idx.exps[i]
        alpha = tuple(e[j] for j in nonpure)
        beta = [0] * t
        for j, w in enumerate(pure):
            if w is not None:
                beta[w] += e[j]
        groups.setdefault(tuple(beta), []).append((alpha, i))
    result = TruncSeries.zero(p, t, D, fc.prec)
    fmin = fc.minval()
    for beta, items in sorted(groups.items()):
        db = sum(beta)
        if cache is None:
            coef = fc.num[[i for _, i in items]].sum()
            part = TruncSeries.constant(p, t, D, Fraction(int(coef), p ** fc.shift), fc.prec)
            result = result + part.times_monomial(beta)
            continue
        powers = [cache.get(a) for a, _ in items]
        shift = max(pw.shift for pw in powers)
        gprec = min(pw.prec for pw in powers)
        gmin = min(pw.minval() for pw in powers)
        size = powers[0].num.size
        mat = np.empty((len(powers), size), dtype=object)
        for row, pw in enumerate(powers):
            mat[row] = pw.num * (p ** (shift - pw.shift)) if shift != pw.shift else pw.num
        coefs = fc.num[[i for _, i in items]]
        num = coefs @ mat
        prec = min(fc.prec + gmin, gprec + fmin)
        sub = TruncSeries(p, len(sub_vars), D, num, fc.shift + shift, prec)
        if db:
            sub = sub.truncate(D - db).extend_cap(D)
        part = sub.embed(t, sub_vars).times_monomial(beta)
        result = result + part
    return result


# ---------------------------------------------------------------------------


def _rational_inverse(M):
    import sympy

    Ms = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in row] for row in M])
    if Ms.det() == 0:
        raise SingularLinearPart("linear part is singular")
    inv = Ms.inv()
    return [[Fraction(int(x.p), int(x.q)) for x in inv.row(i)] for i in range(inv.rows)]


def reversion(f) -> SeriesVec:
    """Compositional inverse g with f(g(X)) = X, solved degree by degree.

    Each pass corrects g by -L^{-1}(f o g - X) where L is the linear part;
    the number of correct degrees grows by at least one per pass.
    """
    f = _as_vec(f)
    r = f.nvars
    if len(f) != r:
        raise DimensionMismatch("reversion needs as many components as variables")
    for comp in f:
        if comp.num[0]:
            raise ConstantTermNonzero("series to revert has a constant term")
    p, D = f.p, f.D
    L = f.linear_matrix()
    Linv = _rational_inverse(L)
    ident = SeriesVec.identity(p, r, D, f.prec + 4)
    g = ident.apply_matrix(Linv).with_prec(f.prec + 4)
    for _ in range(D + 1):
        resid = compose(f, g) - ident
        if resid.is_zero():
            break
        g = g - resid.apply_matrix(Linv)
    return g.with_prec(min(g.prec, f.prec))


def jacobian(f) -> list[list[TruncSeries]]:
    f = _as_vec(f)
    return [[c.derivative(j) for j in range(f.nvars)] for c in f]


def matrix_series_product(A, B):
    """Product of matrices whose entries are series of equal shape."""
    out = []
    for row in A:
        new_row = []
        for j in range(len(B[0])):
            acc = None
            for k, a in enumerate(row):
                term = a * B[k][j]
                acc = term if acc is None else acc + term
            new_row.append(acc)
        out.append(new_row)
    return out


def substitute_frobenius_power(f) -> SeriesVec:
    return _as_vec(f).map(lambda c: c.substitute_frobenius_power())


# ---------------------------------------------------------------------------
# evaluation with certified tails


def tail_bound(kind: str, minval, D: int, p: int, e_p: Fraction | None = None):
    """Lower bound on the valuation of every omitted term of degree n > D."""
    mu = Fraction(minval)
    if kind == "integral":
        return (D + 1) * mu
    if kind == "exp":
        slope = mu - Fraction(1, p - 1)
        return mu + D * slope  # n = D + 1 is the minimum since slope > 0
    if kind == "log":
        # n*mu - floor(log_p n) is minimised at n = D+1 or at a power of p
        cands = [D + 1]
        k = 1
        while p ** k <= (D + 1) * 1000 and p ** k < 10 ** 12:
            if p ** k > D + 1:
                cands.append(p ** k)
            k += 1
        return min(n * mu - _floor_log(n, p) for n in cands)
    raise ValueError(f"unknown tail kind {kind!r}")


def evaluate(f, x, tau=0, kind: str = "integral", polynomial: bool = False):
    """Evaluate a series vector at a point with a certified precision.

    ``tau`` is the convergence threshold: every coordinate must have
    valuation strictly above it.  ``kind`` selects the tail estimate
    ("integral", "log" or "exp").  With ``polynomial`` the series is taken
    to be exactly its truncation and no tail bound applies.
    """
    f = _as_vec(f)
    x = list(x)
    if len(x) != f.nvars:
        raise DimensionMismatch("point has the wrong number of coordinates")
    ring = x[0].ring
    vals = [xi.val_bound() for xi in x]
    mu = min(vals)
    if not mu > tau:
        raise ConvergenceViolation(f"min valuation {mu} does not exceed threshold {tau}")
    if kind == "exp" and not mu > Fraction(1, f.p - 1):
        raise ConvergenceViolation("exponential needs valuation above 1/(p-1)")
    tail = None if polynomial else tail_bound(kind, mu, f.D, f.p)
    if tail is not None and tail < 1:
        raise TailTooWeak(f"certified tail precision {tail} < 1")
    idx = f[0].index
    # monomial values x^alpha via a ladder over the index
    needed = set()
    for comp in f:
        needed.update(np.flatnonzero(comp.num != 0).tolist())
    mon = {0: ring.one(max(xi.prec for xi in x) + 2 * f.D)}
    for i in sorted(needed):
        _monomial_value(i, idx, x, mon)
    out = []
    for comp in f:
        acc = ring.zero(comp.prec + 4 * f.D)
        for i in np.flatnonzero(comp.num != 0):
            c = PadicElement(ring, [int(comp.num[i])] + [0] * (ring.dim - 1), comp.prec, comp.shift)
            acc = acc + c * mon[i]
        # coefficients absent from storage are still only known mod p^prec
        zero_err = comp.prec + Fraction(mu)
        bounds = [Fraction(acc.prec), zero_err] + ([tail] if tail is not None else [])
        acc = acc.with_prec(min(bounds))
        out.append(acc)
    return out


def _monomial_value(i, idx, x, mon):
    if i in mon:
        return mon[i]
    e = list(idx.exps[i])
    v = max(j for j, k in enumerate(e) if k)
    e[v] -= 1
    prev = _monomial_value(idx.pos[tuple(e)], idx, x, mon)
    val = prev * x[v]
    mon[i] = val
    return val

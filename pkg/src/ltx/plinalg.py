"""Dense matrices over the rings of :mod:`ltx.padic_core`."""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import prod

import sympy

from .errors import (
    CheckFailure,
    DimensionMismatch,
    InfiniteModule,
    NonUnitDeterminant,
    NotInvertibleModP,
    PrecisionExhausted,
)
from .padic_core import DEFAULT_PREC, AtLeast, PadicElement, RingDescriptor
from .report import AuditReport

SMITH_GUARD = 5


class PMatrix:
    """Immutable rectangular matrix of :class:`PadicElement` sharing one ring."""

    __slots__ = ("ring", "rows", "cols", "entries")

    def __init__(self, ring: RingDescriptor, entries):
        entries = [list(row) for row in entries]
        self.ring = ring
        self.rows = len(entries)
        self.cols = len(entries[0]) if entries else 0
        for row in entries:
            if len(row) != self.cols:
                raise DimensionMismatch("ragged matrix")
        self.entries = [[_coerce(x, ring) for x in row] for row in entries]

    # -- constructors ---------------------------------------------------------

    @classmethod
    def from_ints(cls, ring: RingDescriptor, rows, prec=None) -> "PMatrix":
        prec = DEFAULT_PREC if prec is None else prec
        return cls(ring, [[ring.element(v, prec) for v in row] for row in rows])

    @classmethod
    def identity(cls, ring, n, prec=None) -> "PMatrix":
        return cls.from_ints(ring, [[int(i == j) for j in range(n)] for i in range(n)], prec)

    @classmethod
    def zeros(cls, ring, rows, cols=None, prec=None) -> "PMatrix":
        cols = rows if cols is None else cols
        return cls.from_ints(ring, [[0] * cols for _ in range(rows)], prec)

    @classmethod
    def blocks(cls, grid) -> "PMatrix":
        """Assemble a block matrix from a grid of PMatrix (all rows aligned)."""
        ring = next(b.ring for row in grid for b in row)
        out = []
        for brow in grid:
            heights = {b.rows for b in brow}
            if len(heights) != 1:
                raise DimensionMismatch("block row heights differ")
            for i in range(heights.pop()):
                out.append([x for b in brow for x in b.entries[i]])
        return cls(ring, out)

    # -- basic protocol -------------------------------------------------------

    @property
    def shape(self):
        return (self.rows, self.cols)

    def __getitem__(self, idx):
        i, j = idx
        return self.entries[i][j]

    def __iter__(self):
        return iter(self.entries)

    def __repr__(self):
        return f"PMatrix({self.ring!r}, {self.entries!r})"

    def map(self, fn) -> "PMatrix":
        return PMatrix(self.ring, [[fn(x) for x in row] for row in self.entries])

    def change_ring(self, ring) -> "PMatrix":
        return PMatrix(ring, [[x.change_ring(ring) for x in row] for row in self.entries])

    def with_prec(self, prec) -> "PMatrix":
        return self.map(lambda x: x.with_prec(prec))

    def transpose(self) -> "PMatrix":
        return PMatrix(self.ring, [list(col) for col in zip(*self.entries)])

    T = property(transpose)

    def submatrix(self, r0, r1, c0, c1) -> "PMatrix":
        return PMatrix(self.ring, [row[c0:c1] for row in self.entries[r0:r1]])

    def frobenius(self, power: int = 1) -> "PMatrix":
        return self.map(lambda x: x.frobenius(power))

    def _check_same(self, other):
        if self.shape != other.shape:
            raise DimensionMismatch(f"{self.shape} vs {other.shape}")

    def __add__(self, other):
        if not isinstance(other, PMatrix):
            other = PMatrix.identity(self.ring, self.rows, self.prec()) * other
        self._check_same(other)
        return PMatrix(self.ring, [[a + b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)])

    __radd__ = __add__

    def __neg__(self):
        return self.map(lambda x: -x)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, PMatrix):
            if self.cols != other.rows:
                raise DimensionMismatch(f"cannot multiply {self.shape} by {other.shape}")
            cols = list(zip(*other.entries))
            out = []
            for row in self.entries:
                out.append([_dot(row, col, self.ring) for col in cols])
            return PMatrix(self.ring, out)
        return self.map(lambda x: x * other)

    def __rmul__(self, other):
        return self.map(lambda x: other * x)

    def __pow__(self, n: int):
        if self.rows != self.cols:
            raise DimensionMismatch("power of a non-square matrix")
        if n < 0:
            return inverse(self) ** (-n)
        result = PMatrix.identity(self.ring, self.rows, self.prec() + 4 * n + 4)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, PMatrix) or self.shape != other.shape:
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def is_zero(self) -> bool:
        return all(x.is_zero() for row in self.entries for x in row)

    def prec(self):
        return min((x.prec for row in self.entries for x in row), default=DEFAULT_PREC)

    def min_valuation(self):
        """Minimal entry valuation (precision bound if all entries vanish)."""
        return min((x.val_bound() for row in self.entries for x in row), default=AtLeast(0).bound)

    def residue(self):
        """Reduction mod the maximal ideal, as a grid of residue-field tuples."""
        return [[x.residue() for x in row] for row in self.entries]

    def to_ints(self):
        """Signed integer representatives (Z_p matrices only)."""
        return [[x.signed_rep() for x in row] for row in self.entries]

    def to_json(self):
        return [[x.to_json() for x in row] for row in self.entries]

    @classmethod
    def from_json(cls, data):
        entries = [[PadicElement.from_json(x) for x in row] for row in data]
        return cls(entries[0][0].ring, entries)


def _coerce(x, ring):
    if isinstance(x, PadicElement):
        return x if x.ring == ring else x.change_ring(ring)
    return ring.element(x)


def _dot(row, col, ring):
    acc = None
    for a, b in zip(row, col):
        term = a * b
        acc = term if acc is None else acc + term
    return acc if acc is not None else ring.zero()


# ---------------------------------------------------------------------------
# determinants and inverses


def _det_cofactor(m):
    n = len(m)
    if n == 0:
        return None
    if n == 1:
        return m[0][0]
    if n == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    total = None
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        term = m[0][j] * _det_cofactor(minor)
        if j % 2:
            term = -term
        total = term if total is None else total + term
    return total


def det(M: PMatrix) -> PadicElement:
    """Determinant; cofactor expansion up to 4x4, valuation-pivoted elimination above."""
    if M.rows != M.cols:
        raise DimensionMismatch("determinant of a non-square matrix")
    if M.rows == 0:
        return M.ring.one()
    if M.rows <= 4:
        return _det_cofactor(M.entries)
    return _det_elimination(M)


def _det_elimination(M: PMatrix) -> PadicElement:
    a = [list(row) for row in M.entries]
    n = len(a)
    result = M.ring.one(M.prec() + n * 4)
    sign = 1
    for k in range(n):
        best, bi, bj = None, -1, -1
        for i in range(k, n):
            for j in range(k, n):
                v = a[i][j].valuation()
                if isinstance(v, AtLeast):
                    continue
                if best is None or v < best:
                    best, bi, bj = v, i, j
        if best is None:
            # remaining block indistinguishable from zero
            zero = a[k][k]
            for i in range(k, n):
                for j in range(k, n):
                    if a[i][j].prec < zero.prec:
                        zero = a[i][j]
            return result * zero
        if bi != k:
            a[k], a[bi] = a[bi], a[k]
            sign = -sign
        if bj != k:
            for row in a:
                row[k], row[bj] = row[bj], row[k]
            sign = -sign
        piv = a[k][k]
        inv = piv.inverse()
        result = result * piv
        for i in range(k + 1, n):
            if a[i][k].is_zero():
                continue
            factor = a[i][k] * inv
            rowk = a[k]
            rowi = a[i]
            for j in range(k + 1, n):
                rowi[j] = rowi[j] - factor * rowk[j]
    return result if sign == 1 else -result


def inverse(M: PMatrix) -> PMatrix:
    """Inverse of a matrix whose determinant is a unit (Gauss-Jordan, unit pivots)."""
    if M.rows != M.cols:
        raise DimensionMismatch("inverse of a non-square matrix")
    n = M.rows
    ring = M.ring
    if min((x.val_bound() for row in M.entries for x in row), default=0) < 0:
        # rescale fraction-field input to integral, invert, rescale back
        s = -Fraction(min(x.val_bound() for row in M.entries for x in row))
        s = int(-(-s.numerator // s.denominator))
        scale = ring.element(ring.p ** s, M.prec() + s + 2)
        return inverse(M * scale) * scale
    a = [list(row) + [ring.element(int(i == j), M.prec() + 2) for j in range(n)]
         for i, row in enumerate(M.entries)]
    for k in range(n):
        piv_row = None
        for i in range(k, n):
            if a[i][k].is_unit():
                piv_row = i
                break
        if piv_row is None:
            raise NonUnitDeterminant("determinant is not a unit at working precision")
        a[k], a[piv_row] = a[piv_row], a[k]
        inv = a[k][k].inverse()
        a[k] = [x * inv for x in a[k]]
        for i in range(n):
            if i != k and not a[i][k].is_zero():
                f = a[i][k]
                a[i] = [x - f * y for x, y in zip(a[i], a[k])]
    return PMatrix(ring, [row[n:] for row in a])


# ---------------------------------------------------------------------------
# integer matrices mod p


def _int_matmul(a, b, m):
    return [[sum(x * y for x, y in zip(row, col)) % m for col in zip(*b)] for row in a]


def _int_matpow(a, n, m):
    size = len(a)
    result = [[int(i == j) for j in range(size)] for i in range(size)]
    while n:
        if n & 1:
            result = _int_matmul(result, a, m)
        a = _int_matmul(a, a, m)
        n >>= 1
    return result


def residue_ints(M: PMatrix):
    """Z_p matrix reduced mod p as integers."""
    return [[x.residue()[0] for x in row] for row in M.entries]


def order_bound(p: int, r: int) -> int:
    """p^s * t with s = r(r-1)/2 and t = prod (p^i - 1): the order of Gl_r(F_p)."""
    return p ** (r * (r - 1) // 2) * prod(p ** i - 1 for i in range(1, r + 1))


def matrix_order_mod_p(u: PMatrix) -> int:
    """Least k >= 1 with u^k = 1 mod p."""
    p = u.ring.p
    a = residue_ints(u)
    r = len(a)
    if sympy.Matrix(a).det() % p == 0:
        raise NotInvertibleModP("matrix is singular mod p")
    ident = [[int(i == j) for j in range(r)] for i in range(r)]
    order = order_bound(p, r)
    if _int_matpow(a, order, p) != ident:
        raise AssertionError("group order bound violated")
    for ell in sympy.factorint(order):
        while order % ell == 0 and _int_matpow(a, order // ell, p) == ident:
            order //= ell
    return order


# ---------------------------------------------------------------------------
# Smith normal form over Z_p


@dataclass(frozen=True)
class SmithProfile:
    valuations: tuple
    certified: bool = True

    @property
    def omega(self) -> int:
        return sum(self.valuations)

    def to_json(self):
        return {"valuations": list(self.valuations), "certified": self.certified}


def smith_valuations(M: PMatrix) -> SmithProfile:
    """Elementary-divisor valuations of a Z_p matrix.

    Pivots on the entry of least valuation (row-major tie break).  A pivot is
    only trusted when it sits at least SMITH_GUARD digits below the working
    precision.
    """
    if M.ring.dim != 1:
        raise DimensionMismatch("Smith form is implemented over Z_p only")
    a = [list(row) for row in M.entries]
    rows, cols = M.rows, M.cols
    vals = []
    for k in range(min(rows, cols)):
        best, bi, bj = None, -1, -1
        for i in range(k, rows):
            for j in range(k, cols):
                v = a[i][j].valuation()
                if not isinstance(v, AtLeast) and (best is None or v < best):
                    best, bi, bj = v, i, j
        floor = min(x.prec for row in a[k:] for x in row[k:])
        if best is None or best > floor - SMITH_GUARD:
            raise PrecisionExhausted(
                f"Smith pivot {k} not certified (valuation {best}, precision {floor})"
            )
        a[k], a[bi] = a[bi], a[k]
        for row in a:
            row[k], row[bj] = row[bj], row[k]
        piv = a[k][k]
        inv = piv.inverse()
        for i in range(k + 1, rows):
            if not a[i][k].is_zero():
                f = a[i][k] * inv
                a[i] = a[i][:k] + [a[i][k].ring.zero(a[i][k].prec)] + [
                    x - f * y for x, y in zip(a[i][k + 1:], a[k][k + 1:])
                ]
        for j in range(k + 1, cols):
            if not a[k][j].is_zero():
                a[k][j] = a[k][j].ring.zero(a[k][j].prec)
        # with column k cleared below the pivot, column operations only touch row k
        vals.append(int(best))
    return SmithProfile(tuple(sorted(vals)), True)


def finite_quotient_structure(A: PMatrix) -> SmithProfile:
    """Structure of Z_p^r / A Z_p^r; ``omega`` is the log_p of its order."""
    if A.rows != A.cols:
        raise DimensionMismatch("square matrix expected")
    prof = smith_valuations(A)
    return SmithProfile(tuple(v for v in prof.valuations), prof.certified)


def _coker_exponent(phi: PMatrix, A: PMatrix) -> int:
    """log_p #(Z_p^r / (phi Z_p^r + A Z_p^r))."""
    stacked = PMatrix(phi.ring, [r1 + r2 for r1, r2 in zip(phi.entries, A.entries)])
    return smith_valuations(stacked).omega


@dataclass(frozen=True)
class TateCohomology:
    h0_exponent: int
    hminus1_exponent: int
    module: SmithProfile

    def to_json(self):
        return {
            "H0_order_exponent": self.h0_exponent,
            "Hminus1_order_exponent": self.hminus1_exponent,
            "module": self.module.to_json(),
        }


def tate_cohomology_cyclic(U: PMatrix, d: int, relations: PMatrix | None = None) -> TateCohomology:
    """Tate cohomology of <g> (order d, g acting by U) on M = Z_p^r / A Z_p^r.

    A defaults to U^d - 1; pass ``relations`` to study another finite module
    stable under U (e.g. U = 1 for a trivial action).  For an endomorphism f
    of M, #ker f is the order of the cokernel of [f | A].
    """
    if d < 1:
        raise DimensionMismatch("cyclic group order must be positive")
    r = U.rows
    ident = PMatrix.identity(U.ring, r, U.prec() + 4)
    A = U ** d - ident if relations is None else relations
    if det(A).is_zero():
        raise InfiniteModule("relation matrix is singular at working precision")
    module = finite_quotient_structure(A)
    omega = module.omega
    norm = reduce(lambda acc, i: acc + U ** i, range(1, d), ident)
    ker_g1 = _coker_exponent(U - ident, A)  # log #M^g
    ker_n = _coker_exponent(norm, A)
    im_n = omega - ker_n
    im_g1 = omega - ker_g1
    return TateCohomology(ker_g1 - im_n, ker_n - im_g1, module)


# ---------------------------------------------------------------------------
# block determinant identity


def block_det_matrix(A: PMatrix, B: list) -> PMatrix:
    """Assemble the nr x nr matrix: identities on the diagonal, A below it,
    last block column B_1, ..., B_{n-1}, 1 + B_n."""
    n = len(B)
    r = A.rows
    for blk in [A, *B]:
        if blk.shape != (r, r) or blk.ring != A.ring:
            raise DimensionMismatch("blocks must be square of equal size over one ring")
    prec = min(blk.prec() for blk in [A, *B])
    ident = PMatrix.identity(A.ring, r, prec)
    zero = PMatrix.zeros(A.ring, r, r, prec)
    grid = [[zero] * n for _ in range(n)]
    for i in range(n):
        grid[i][i] = ident
        if i > 0:
            grid[i][i - 1] = A
        grid[i][n - 1] = B[i]
    grid[n - 1][n - 1] = ident + B[n - 1]
    return PMatrix.blocks(grid)


def block_det_formula(A: PMatrix, B: list) -> PadicElement:
    n = len(B)
    r = A.rows
    ident = PMatrix.identity(A.ring, r, min(blk.prec() for blk in [A, *B]))
    total = ident
    power = ident
    for i in range(n):
        total = total + power * B[n - 1 - i]
        power = power * (-A)
    return det(total)


def block_det(A: PMatrix, B: list, verify: bool = True) -> PadicElement:
    """det(1 + sum_{i<n} (-A)^i B_{n-i}); optionally cross-checked against the
    assembled block matrix."""
    if not B:
        raise DimensionMismatch("need at least one B block")
    value = block_det_formula(A, B)
    if verify:
        direct = det(block_det_matrix(A, B))
        if not (value - direct).is_zero():
            raise CheckFailure(f"block determinant mismatch: {value} vs {direct}")
    return value


def block_det_audit(samples: int = 50, seed: int = 0, p: int = 3, prec: int = 20,
                    max_r: int = 3, max_n: int = 4) -> AuditReport:
    """Formula against the assembled determinant on random (A, B_1..B_n)."""
    from .padic_core import make_ring

    ring = make_ring(p)
    rng = random.Random(seed)
    audit = AuditReport("block-det", {"p": p, "samples": samples, "max_r": max_r, "max_n": max_n},
                        seed=seed)
    bad = None
    for _ in range(samples):
        r, n = rng.randint(1, max_r), rng.randint(1, max_n)

        def rand():
            return PMatrix(ring, [[ring.random_element(rng, prec) for _ in range(r)] for _ in range(r)])

        A, B = rand(), [rand() for _ in range(n)]
        f, d = block_det_formula(A, B), det(block_det_matrix(A, B))
        if bad is None and not (f - d).is_zero():
            bad = {"r": r, "n": n, "formula": str(f), "direct": str(d)}
    audit.check("formula = assembled determinant", bad is None,
                "det of the block matrix = det(1 + sum (-A)^i B_{n-i})", prec,
                **({"counterexample": bad} if bad else {}))
    return audit.finish()

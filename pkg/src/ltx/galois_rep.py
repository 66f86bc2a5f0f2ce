"""Unramified representations u in Gl_r(Z_p): profiles and twist matrices."""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import sympy

from .errors import (
    DegreeBudgetExceeded,
    DimensionMismatch,
    NonInvertibleU,
    PrecisionExhausted,
    RandomnessExhausted,
)
from .padic_core import DEFAULT_PREC, PadicElement, check_prime, make_ring, vp
from .plinalg import PMatrix, det, inverse, matrix_order_mod_p, order_bound
from .report import AuditReport

MAX_DEGREE = 64
RESIDUE_RETRIES = 64


@dataclass
class UnramifiedRep:
    p: int
    u: list
    prec: int = DEFAULT_PREC

    def __post_init__(self):
        check_prime(self.p)
        rows = [[int(x) for x in row] for row in self.u]
        if not rows or any(len(row) != len(rows) for row in rows):
            raise DimensionMismatch("u must be a non-empty square integer matrix")
        if sympy.Matrix(rows).det() % self.p == 0:
            raise NonInvertibleU("det(u) is divisible by p")
        self.u = rows

    @property
    def r(self) -> int:
        return len(self.u)

    @property
    def sym(self) -> sympy.Matrix:
        return sympy.Matrix(self.u)

    def power(self, n: int) -> list:
        return [[int(x) for x in row] for row in (self.sym ** n).tolist()]

    def matrix(self, ring=None, prec=None) -> PMatrix:
        ring = ring or make_ring(self.p)
        return PMatrix.from_ints(ring, self.u, self.prec if prec is None else prec)

    def inverse_matrix(self, ring=None, prec=None) -> PMatrix:
        return inverse(self.matrix(ring, prec))

    @property
    def d_tilde(self) -> int:
        return matrix_order_mod_p(self.matrix())

    def to_json(self):
        return {"p": self.p, "r": self.r, "u": self.u, "precision": self.prec}


@dataclass
class RepProfile:
    d_N: int
    U_N: list
    hyp_F: bool
    hyp_I: bool
    hyp_T: bool
    mixed: bool
    omega: int | None
    d_tilde: int
    det_UN_minus_1: int

    def to_json(self):
        return {k: (str(v) if isinstance(v, int) and abs(v) >= 2 ** 53 else v)
                for k, v in self.__dict__.items()}


def rep_profile(rep: UnramifiedRep, d_N: int) -> RepProfile:
    """U_N = u^{d_N} and the hypothesis flags (F), (I), (T)."""
    if d_N < 1:
        raise DimensionMismatch("d_N must be positive")
    p, r = rep.p, rep.r
    UN = rep.sym ** d_N
    A = UN - sympy.eye(r)
    D = int(A.det())
    if D == 0:
        hyp_F, omega = False, None
    else:
        omega = vp(D, p)
        if omega >= rep.prec:
            raise PrecisionExhausted(f"v_p(det(U_N - 1)) = {omega} is beyond precision {rep.prec}")
        hyp_F = True
    hyp_I = D % p != 0
    hyp_T = all(int(x) % p == 0 for x in A)
    return RepProfile(
        d_N=d_N,
        U_N=[[int(x) for x in row] for row in UN.tolist()],
        hyp_F=hyp_F,
        hyp_I=hyp_I,
        hyp_T=hyp_T,
        mixed=not hyp_I and not hyp_T,
        omega=omega,
        d_tilde=rep.d_tilde,
        det_UN_minus_1=D,
    )


# ---------------------------------------------------------------------------
# F_p-linear algebra for the Artin-Schreier step


def _solve_mod_p(A, b, p):
    """One solution of A x = b over F_p (None if inconsistent)."""
    A = np.array(A, dtype=np.int64) % p
    b = np.array(b, dtype=np.int64) % p
    n, m = A.shape
    M = np.concatenate([A, b.reshape(-1, 1)], axis=1)
    pivots = []
    row = 0
    for col in range(m):
        nz = np.flatnonzero(M[row:, col]) if row < n else []
        if len(nz) == 0:
            continue
        piv = row + nz[0]
        M[[row, piv]] = M[[piv, row]]
        M[row] = (M[row] * pow(int(M[row, col]), -1, p)) % p
        for i in range(n):
            if i != row and M[i, col]:
                M[i] = (M[i] - M[i, col] * M[row]) % p
        pivots.append(col)
        row += 1
        if row == n:
            break
    if np.any(M[row:, m] % p):
        return None
    x = np.zeros(m, dtype=np.int64)
    for i, col in enumerate(pivots):
        x[col] = M[i, m]
    return x


class _ArtinSchreier:
    """Solve delta - delta^p = c in F_q via the F_p-linear map 1 - Frob."""

    def __init__(self, rf):
        self.rf = rf
        self.p = rf.p
        self.mat = rf.linear_map_matrix(lambda x: rf.sub(x, rf.frob(x)))

    def solve(self, c):
        if self.rf.trace(c) % self.p:
            return None
        x = _solve_mod_p(self.mat, list(c), self.p)
        return None if x is None else tuple(int(v) for v in x)


# ---------------------------------------------------------------------------


@dataclass
class TwistSolution:
    ring: object
    T: PMatrix
    k_final: int
    retries: int
    residual_valuation: object
    seed: object
    precision: int
    enlargements: list = field(default_factory=list)

    def to_json(self):
        return {
            "ring": self.ring.to_json(),
            "T": self.T.to_json(),
            "k_final": self.k_final,
            "retries": self.retries,
            "residual_valuation": str(self.residual_valuation),
            "seed": self.seed,
            "precision": self.precision,
            "enlargements": self.enlargements,
        }


def _residue_matrix_ops(rf):
    def mul(A, B):
        n, m, l = len(A), len(B), len(B[0])
        out = [[rf.zero() for _ in range(l)] for _ in range(n)]
        for i in range(n):
            for j in range(l):
                acc = rf.zero()
                for t in range(m):
                    acc = rf.add(acc, rf.mul(A[i][t], B[t][j]))
                out[i][j] = acc
        return out

    def det_(A):
        n = len(A)
        a = [list(row) for row in A]
        d = rf.one()
        for k in range(n):
            piv = next((i for i in range(k, n) if not rf.is_zero(a[i][k])), None)
            if piv is None:
                return rf.zero()
            if piv != k:
                a[k], a[piv] = a[piv], a[k]
                d = rf.neg(d)
            d = rf.mul(d, a[k][k])
            inv = rf.inv(a[k][k])
            for i in range(k + 1, n):
                f = rf.mul(a[i][k], inv)
                a[i] = [rf.sub(x, rf.mul(f, y)) for x, y in zip(a[i], a[k])]
        return d

    def inv_(A):
        n = len(A)
        a = [list(row) + [rf.one() if i == j else rf.zero() for j in range(n)] for i, row in enumerate(A)]
        for k in range(n):
            piv = next(i for i in range(k, n) if not rf.is_zero(a[i][k]))
            a[k], a[piv] = a[piv], a[k]
            inv = rf.inv(a[k][k])
            a[k] = [rf.mul(inv, x) for x in a[k]]
            for i in range(n):
                if i != k and not rf.is_zero(a[i][k]):
                    f = a[i][k]
                    a[i] = [rf.sub(x, rf.mul(f, y)) for x, y in zip(a[i], a[k])]
        return [row[n:] for row in a]

    return mul, det_, inv_


def averaged_residue(ubar, C, rf, k):
    """T = sum_{i<k} ubar^i Frob^i(C) over F_q (ubar an F_p matrix)."""
    mul, _, _ = _residue_matrix_ops(rf)
    r = len(ubar)
    U = [[rf.from_int(x) for x in row] for row in ubar]
    power = [[rf.one() if i == j else rf.zero() for j in range(r)] for i in range(r)]
    Ci = C
    total = [[rf.zero()] * r for _ in range(r)]
    for _ in range(k):
        term = mul(power, Ci)
        total = [[rf.add(a, b) for a, b in zip(r1, r2)] for r1, r2 in zip(total, term)]
        power = mul(power, U)
        Ci = [[rf.frob(x) for x in row] for row in Ci]
    return total


def _twist_ring(p, k):
    return make_ring(p) if k == 1 else make_ring(p, "unramified", k)


def _solve_at_degree(rep, k, rng, prec, residue_mode):
    """Attempt a solution over the degree-k ring.

    Returns (T, retries, None) on success or (None, retries, level) when an
    Artin-Schreier obstruction appears at p-adic level ``level``.
    """
    p, r = rep.p, rep.r
    ring = _twist_ring(p, k)
    rf = ring.residue_field
    _, det_, inv_ = _residue_matrix_ops(rf)
    ubar = [[x % p for x in row] for row in rep.u]
    Tbar = None
    retries = 0
    for attempt in range(RESIDUE_RETRIES):
        if residue_mode == "scalar":
            c = rf.random(rng)
            C = [[c if i == j else rf.zero() for j in range(r)] for i in range(r)]
        else:
            C = [[rf.random(rng) for _ in range(r)] for _ in range(r)]
        cand = averaged_residue(ubar, C, rf, k)
        if not rf.is_zero(det_(cand)):
            Tbar = cand
            break
        retries += 1
    if Tbar is None:
        raise RandomnessExhausted(f"no invertible averaged residue after {RESIDUE_RETRIES} tries (k = {k})")
    T = PMatrix(ring, [[ring.from_residue(x, prec) for x in row] for row in Tbar])
    uinv = inverse(rep.matrix(ring, prec + 2)).with_prec(prec)
    u_res = [[rf.from_int(x) for x in row] for row in ubar]
    Tbar_inv = inv_(Tbar)
    mul = _residue_matrix_ops(rf)[0]
    AS = _ArtinSchreier(rf) if k > 1 else None
    for n in range(1, prec):
        R = T.frobenius() - uinv * T
        if R.is_zero():
            break
        # E = T^{-1} u (phi(T) - u^{-1} T) / p^n  (mod p)
        scaled = [[_residue_of_scaled(x, n) for x in row] for row in R.entries]
        E = mul(mul(Tbar_inv, u_res), scaled)
        Delta = []
        for row in E:
            out_row = []
            for e in row:
                if k == 1:
                    if any(e):
                        return None, retries, n
                    out_row.append(rf.zero())
                    continue
                d = AS.solve(e)
                if d is None:
                    return None, retries, n
                out_row.append(d)
            Delta.append(out_row)
        Dm = PMatrix(ring, [[ring.from_residue(x, prec) for x in row] for row in Delta])
        T = T + (T * Dm) * (p ** n)
        T = T.with_prec(prec)
    return T, retries, None


def _residue_of_scaled(x: PadicElement, n: int):
    """(x / p^n) mod p for x divisible by p^n."""
    p = x.ring.p
    q = p ** n
    if x.shift:
        raise PrecisionExhausted("unexpected denominator in the twist residual")
    return tuple((c // q) % p for c in x.coeffs[: x.ring.k])


def solve_twist_matrix(rep: UnramifiedRep, seed=0, prec: int | None = None,
                       max_degree: int = MAX_DEGREE, base_degree: int = 1,
                       residue_mode: str = "random") -> TwistSolution:
    """T over a finite unramified ring with phi(T) = u^{-1} T mod p^prec.

    The degree starts at lcm(d~, base_degree) and is multiplied by p whenever
    an Artin-Schreier trace obstruction blocks a Hensel step; each enlargement
    restarts the solve in the bigger ring.
    """
    prec = rep.prec if prec is None else prec
    rng = random.Random(seed)
    k = math.lcm(rep.d_tilde, base_degree)
    total_retries = 0
    history = []
    while True:
        if k > max_degree:
            err = DegreeBudgetExceeded(
                f"degree {k} exceeds the budget {max_degree}; obstruction history {history}")
            err.history = history
            raise err
        T, retries, level = _solve_at_degree(rep, k, rng, prec, residue_mode)
        total_retries += retries
        if T is not None:
            ring = T.ring
            uinv = inverse(rep.matrix(ring, prec + 2)).with_prec(prec)
            R = T.frobenius() - uinv * T
            resid = min(x.val_bound() for row in R.entries for x in row)
            return TwistSolution(ring, T, k, total_retries, resid, seed, prec, history)
        history.append({"k": k, "obstruction_level": level})
        k *= rep.p


def epsilon_matrix(sol: TwistSolution, rep: UnramifiedRep):
    """eps = T^{-1}; returns (eps, residual valuation of phi(eps^{-1}) eps - u^{-1})."""
    eps = inverse(sol.T)
    uinv = inverse(rep.matrix(sol.ring, sol.precision + 2)).with_prec(sol.precision)
    lhs = inverse(eps).frobenius() * eps
    diff = lhs - uinv
    return eps, min(x.val_bound() for row in diff.entries for x in row)


def is_frobenius_fixed(M: PMatrix) -> bool:
    return (M.frobenius() - M).is_zero()


def twist_det_class(rep: UnramifiedRep, runs: int = 2, seeds=None, prec=None,
                    max_degree: int = MAX_DEGREE) -> AuditReport:
    """Independent twist matrices differ by a right factor in Gl_r(Z_p)."""
    seeds = list(seeds) if seeds is not None else list(range(runs))
    rep_ = AuditReport("twist-det-class", {"u": rep.u, "p": rep.p}, seed=seeds)
    sols = [solve_twist_matrix(rep, s, prec, max_degree) for s in seeds]
    k = max(s.k_final for s in sols)
    sols = [s if s.k_final == k else solve_twist_matrix(rep, s.seed, prec, max_degree, base_degree=k)
            for s in sols]
    T0 = sols[0].T
    for s in sols[1:]:
        S = inverse(T0) * s.T
        ratio = det(s.T) / det(T0)
        rep_.check(f"S phi-fixed (seed {s.seed})", is_frobenius_fixed(S),
                   "T^{-1} T' in Gl_r(Z_p)", s.precision)
        rep_.check(f"det ratio unit (seed {s.seed})", ratio.is_unit() and (ratio.frobenius() - ratio).is_zero(),
                   "det(T')/det(T) in Z_p^x", s.precision, valuation=str(ratio.valuation()))
        rep_.check(f"S invertible (seed {s.seed})", det(S).is_unit(), "S in Gl_r(Z_p)")
    rep_.data["k_final"] = k
    return rep_.finish()


# ---------------------------------------------------------------------------
# finite-order test matrices


FINITE_ORDER = {2: [[-1, 0], [0, -1]], 3: [[0, -1], [1, -1]], 4: [[0, -1], [1, 0]], 6: [[1, -1], [1, 0]]}


def random_sl2_conjugate(base, rng: random.Random, steps: int = 4):
    """g base g^{-1} for a random product g of elementary SL_2(Z) matrices."""
    g = sympy.eye(2)
    for _ in range(steps):
        t = rng.choice([-2, -1, 1, 2])
        g = g * (sympy.Matrix([[1, t], [0, 1]]) if rng.random() < 0.5 else sympy.Matrix([[1, 0], [t, 1]]))
    m = g * sympy.Matrix(base) * g.inv()
    return [[int(x) for x in row] for row in m.tolist()]


def random_finite_order_hyp_i(p: int, rng: random.Random):
    """A random conjugate of a finite-order integer 2x2 matrix with u - 1 invertible mod p."""
    for _ in range(100):
        order = rng.choice(sorted(FINITE_ORDER))
        u = random_sl2_conjugate(FINITE_ORDER[order], rng)
        d = sympy.Matrix(u) - sympy.eye(2)
        if int(d.det()) % p:
            return u
    raise RandomnessExhausted("no hypothesis-(I) matrix found")

"""H^1/H^2 invariants of Z_p^r(1)(rho^nr) and cohomological triviality."""
from __future__ import annotations

import math
import random
from dataclasses import dataclass

import sympy

from .errors import DimensionMismatch, HypothesisFViolated, RandomnessExhausted
from .galois_rep import UnramifiedRep, rep_profile
from .padic_core import make_ring, vp
from .plinalg import PMatrix, SmithProfile, finite_quotient_structure, tate_cohomology_cyclic
from .report import AuditReport

GUARD = 10


@dataclass(frozen=True)
class ExtensionShape:
    """N/K with K/Q_p unramified of degree m, ramification e and inertia degree d."""

    m: int
    e: int
    d: int
    p: int

    def __post_init__(self):
        if min(self.m, self.e, self.d) < 1:
            raise DimensionMismatch("m, e and d must be positive")

    @property
    def tame(self) -> bool:
        return math.gcd(self.p, self.e) == 1

    @property
    def d_N(self) -> int:
        return self.m * self.d

    @property
    def n_N(self) -> int:
        return self.e * self.d * self.m

    def to_json(self):
        return {"m": self.m, "e": self.e, "d": self.d, "tame": self.tame,
                "d_N": self.d_N, "n_N": self.n_N}


@dataclass
class CohomologyProfile:
    h2_divisors: SmithProfile
    omega: int
    h1_rank: int
    coh_trivial: bool
    reason: str

    def to_json(self):
        return {"h2_divisors": self.h2_divisors.to_json(), "omega": self.omega,
                "h1_rank": self.h1_rank, "coh_trivial": self.coh_trivial, "reason": self.reason}


def _int_matrix_padic(rows, p, prec):
    return PMatrix.from_ints(make_ring(p), [[int(x) for x in row] for row in rows], prec)


def h2_structure(rep: UnramifiedRep, d_N: int) -> SmithProfile:
    """Elementary divisors of Z_p^r / (U_N - 1)."""
    prof = rep_profile(rep, d_N)
    if not prof.hyp_F:
        raise HypothesisFViolated(f"det(U_N - 1) = 0 for d_N = {d_N}")
    A = (sympy.Matrix(prof.U_N) - sympy.eye(rep.r)).tolist()
    prec = max(rep.prec, prof.omega + GUARD)
    return finite_quotient_structure(_int_matrix_padic(A, rep.p, prec))


def cohomology_profile(rep: UnramifiedRep, shape: ExtensionShape) -> CohomologyProfile:
    if shape.p != rep.p:
        raise DimensionMismatch("shape and representation use different primes")
    prof = rep_profile(rep, shape.d_N)
    if not prof.hyp_F:
        raise HypothesisFViolated("det(U_N - 1) = 0")
    divisors = h2_structure(rep, shape.d_N)
    if shape.tame:
        trivial, reason = True, "tame"
    elif prof.hyp_I:
        trivial, reason = True, "wild_unit"
    else:
        trivial, reason = False, "wild_nontrivial"
    return CohomologyProfile(divisors, divisors.omega, rep.r * shape.n_N, trivial, reason)


def tame_triviality_audit(rep: UnramifiedRep, shape: ExtensionShape) -> AuditReport:
    """1 - U_N = (1 + U_K + ... + U_K^{d-1})(1 - U_K) and vanishing Tate cohomology."""
    audit = AuditReport("audit-tame", {"u": rep.u, "p": rep.p, "shape": shape.to_json()})
    if not shape.tame:
        audit.check("shape is tame", False, "p does not divide e_{N/K}")
        return audit.finish()
    prof = rep_profile(rep, shape.d_N)
    if not prof.hyp_F:
        audit.check("hypothesis (F)", False, "det(U_N - 1) != 0")
        return audit.finish()
    r, d = rep.r, shape.d
    UK = rep.sym ** shape.m
    UN = UK ** d
    I = sympy.eye(r)
    norm = sum((UK ** i for i in range(d)), sympy.zeros(r, r))
    lhs = I - UN
    rhs = norm * (I - UK)
    audit.check("factorization", lhs == rhs, "1 - U_N = (1 + U_K + ... + U_K^{d-1})(1 - U_K)",
                "exact")
    dk, dn = int((I - UK).det()), int(norm.det())
    audit.check("det(1 - U_K) != 0", dk != 0, "det(1 - U_K) != 0", "exact", value=dk)
    audit.check("det(norm) != 0", dn != 0, "det(1 + U_K + ... + U_K^{d-1}) != 0", "exact", value=dn)
    prec = max(rep.prec, (prof.omega or 0) + GUARD)
    U = _int_matrix_padic([[int(x) for x in row] for row in UK.tolist()], rep.p, prec)
    tc = tate_cohomology_cyclic(U, d)
    audit.check("Tate cohomology trivial", tc.h0_exponent == 0 and tc.hminus1_exponent == 0,
                "H^0 = H^-1 = 0 for <F_K> acting on Z_p^r/(U_N - 1)", prec, **tc.to_json())
    return audit.finish()


def wild_nontriviality_witness(rep: UnramifiedRep, shape: ExtensionShape) -> AuditReport:
    """Hom(Z/p, H^2) is nonzero exactly when omega > 0."""
    audit = AuditReport("audit-wild", {"u": rep.u, "p": rep.p, "shape": shape.to_json()})
    if shape.tame:
        audit.check("shape is wild", False, "p divides e_{N/K}")
        return audit.finish()
    prof = rep_profile(rep, shape.d_N)
    if not prof.hyp_F:
        audit.check("hypothesis (F)", False, "det(U_N - 1) != 0")
        return audit.finish()
    div = h2_structure(rep, shape.d_N)
    dim = sum(1 for v in div.valuations if v >= 1)
    audit.data.update({"omega": div.omega, "hom_dimension": dim, "divisors": list(div.valuations)})
    audit.check("witness consistent", (dim > 0) == (div.omega > 0),
                "Hom(Z/p, M) = 0 iff M = 0", "exact", hom_dimension=dim, omega=div.omega)
    cp = cohomology_profile(rep, shape)
    audit.check("triviality iff (I)", cp.coh_trivial == prof.hyp_I == (div.omega == 0),
                "H^2 trivial iff U_N - 1 in Gl_r(Z_p)", "exact", coh_trivial=cp.coh_trivial)
    return audit.finish()


def torsion_free_check(rep: UnramifiedRep, samples: int = 10, seed: int = 0, degree: int | None = None) -> AuditReport:
    """For (I)-representations: [p](x) != 0 on sampled nonzero points of F(pZ_p^r)."""
    from .lubin_tate import lt_group_law
    from .powerseries import evaluate

    audit = AuditReport("torsion-free", {"u": rep.u, "p": rep.p}, seed=seed)
    D = degree or rep.p ** 2
    fgl = lt_group_law(rep.u, D, rep.p, rep.prec, verify=False)
    ps = fgl.p_series()
    ring = make_ring(rep.p)
    rng = random.Random(seed)
    ok = True
    for _ in range(samples):
        x = [ring.random_element(rng, rep.prec, 1) for _ in range(rep.r)]
        if all(c.is_zero() for c in x):
            continue
        y = evaluate(ps, x, 0, "integral")
        ok &= not all(c.is_zero() for c in y)
    audit.check("[p] injective on samples", ok, "no p-torsion in F(p^(r))")
    return audit.finish()


def random_hyp_f_matrix(p: int, r: int, d_N: int, rng: random.Random, bound: int = 6):
    """Random integer u with det(u) prime to p and det(u^{d_N} - 1) != 0."""
    for _ in range(1000):
        u = [[rng.randint(-bound, bound) for _ in range(r)] for _ in range(r)]
        M = sympy.Matrix(u)
        if M.det() % p == 0:
            continue
        D = (M ** d_N - sympy.eye(r)).det()
        if D != 0 and vp(int(D), p) < 10:
            return u
    raise RandomnessExhausted("no suitable matrix found")

"""r-dimensional Lubin-Tate formal groups F_{pu^{-1}} over Z_p.

The logarithm is f(X) = sum_i p^{-i} u^i X^{(p^i)} where X^{(m)} is the
coordinatewise m-th power.  All reversions and compositions are carried out
on the integral rescaling f~(X) = f(pX)/p (linear part X, integral
coefficients) and undone at the end with ``dilate(-1)``; a coefficient of
degree n then picks up p^{1-n}, so the working precision is N + D - 1.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

import sympy

from .errors import (
    DimensionMismatch,
    IntegralityFailure,
    InvalidDegree,
    NonInvertibleU,
    ThresholdViolation,
)
from .padic_core import DEFAULT_PREC, PadicElement, check_prime, vp
from .powerseries import (
    SeriesVec,
    TruncSeries,
    compose,
    evaluate,
    jacobian,
    matrix_series_product,
    reversion,
)
from .report import AuditReport


def _check_u(u, p):
    rows = [list(map(int, row)) for row in u]
    r = len(rows)
    if r == 0 or any(len(row) != r for row in rows):
        raise DimensionMismatch("u must be a non-empty square matrix")
    d = sympy.Matrix(rows).det()
    if d % p == 0:
        raise NonInvertibleU(f"det(u) = {d} is not a unit at p = {p}")
    return rows


def _mat_pow(u, i):
    return [[int(x) for x in row] for row in (sympy.Matrix(u) ** i).tolist()]


def lt_logarithm(u, D: int, p: int, prec: int | None = None, scaled: bool = False) -> SeriesVec:
    """f(X) = sum_{p^i <= D} p^{-i} u^i X^{(p^i)}; with ``scaled`` return f(pX)/p."""
    check_prime(p)
    u = _check_u(u, p)
    if D < 1:
        raise InvalidDegree("degree cap must be positive")
    r = len(u)
    prec = DEFAULT_PREC if prec is None else prec
    terms = [dict() for _ in range(r)]
    i = 0
    while p ** i <= D:
        ui = _mat_pow(u, i)
        scale = Fraction(p ** (p ** i - 1), p ** i) if scaled else Fraction(1, p ** i)
        for a in range(r):
            for b in range(r):
                if ui[a][b]:
                    e = tuple(p ** i if v == b else 0 for v in range(r))
                    terms[a][e] = terms[a].get(e, 0) + ui[a][b] * scale
        i += 1
    return SeriesVec([TruncSeries.from_terms(p, r, D, t, prec) for t in terms])


def _unscale(series: SeriesVec, what: str) -> SeriesVec:
    out = series.dilate(-1)
    for comp in out:
        if comp.shift > 0:
            bad = [(e, c) for e, c in comp.terms() if vp(c.denominator, comp.p)]
            raise IntegralityFailure(f"{what}: non-integral coefficient at {bad[0][0]} ({bad[0][1]})")
    return out


def _split_vars(vec: SeriesVec, nvars: int, start: int) -> SeriesVec:
    return vec.embed(nvars, list(range(start, start + vec.nvars)))


@dataclass
class FormalGroupLaw:
    p: int
    u: list
    D: int
    prec: int
    law: SeriesVec
    log: SeriesVec
    log_cap: int
    _scaled_inverse: SeriesVec = field(repr=False)
    certificate: dict = field(default_factory=dict)
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def r(self) -> int:
        return len(self.u)

    # -- derived series -----------------------------------------------------

    @property
    def exp(self) -> SeriesVec:
        if "exp" not in self._cache:
            self._cache["exp"] = lt_exponential(self)
        return self._cache["exp"]

    def p_series(self) -> SeriesVec:
        """[p](X) = f^{-1}(p f(X)) with cap D."""
        if "pseries" not in self._cache:
            M = self.prec + self.D - 1
            ft = lt_logarithm(self.u, self.D, self.p, M + 2, scaled=True)
            gt = self._scaled_inverse.truncate(self.D)
            inner = ft.map(lambda c: c.scale(self.p))
            self._cache["pseries"] = _unscale(compose(gt, inner), "[p]-series")
        return self._cache["pseries"]

    def negation(self) -> SeriesVec:
        """iota(X) = f^{-1}(-f(X)), so that F(X, iota(X)) = 0."""
        if "neg" not in self._cache:
            M = self.prec + self.D - 1
            ft = lt_logarithm(self.u, self.D, self.p, M + 2, scaled=True)
            gt = self._scaled_inverse.truncate(self.D)
            self._cache["neg"] = _unscale(compose(gt, -ft), "negation")
        return self._cache["neg"]

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "r": self.r,
            "u": self.u,
            "degree": self.D,
            "precision": self.prec,
            "law": self.law.to_json(),
            "certificate": self.certificate,
        }


def lt_group_law(u, D: int | None = None, p: int = 3, prec: int | None = None,
                 log_cap: int | None = None, verify: bool = True) -> FormalGroupLaw:
    """Construct F(X, Y) = f^{-1}(f(X) + f(Y)) and record the axiom checks."""
    check_prime(p)
    u = _check_u(u, p)
    r = len(u)
    if D is None:
        D = p ** 3 if r == 1 else p ** 2
    if D < 1:
        raise InvalidDegree("degree cap must be positive")
    prec = DEFAULT_PREC if prec is None else prec
    log_cap = D if log_cap is None else log_cap
    cap = max(D, log_cap)
    M = prec + cap - 1
    ft = lt_logarithm(u, cap, p, M + 2, scaled=True)
    gt = reversion(ft).with_prec(M)
    ftD = ft.truncate(D)
    h = _split_vars(ftD, 2 * r, 0) + _split_vars(ftD, 2 * r, r)
    Ft = compose(gt.truncate(D), h).with_prec(prec + D - 1)
    law = _unscale(Ft, "group law")
    log = lt_logarithm(u, log_cap, p, prec + log_cap)
    fgl = FormalGroupLaw(p, u, D, prec, law, log, log_cap, gt)
    if verify:
        fgl.certificate = verify_axioms(fgl).to_json(timing=False)
    return fgl


def _substitute(vec: SeriesVec, images) -> SeriesVec:
    return compose(vec, SeriesVec(images))


def verify_axioms(fgl: FormalGroupLaw, associativity: bool = True) -> AuditReport:
    """Integrality, identity, commutativity, associativity, Jacobian identity."""
    rep = AuditReport("group-law-axioms", {"p": fgl.p, "u": fgl.u, "degree": fgl.D})
    p, r, D = fgl.p, fgl.r, fgl.D
    F = fgl.law
    vals = [v for comp in F for v in comp.valuations().values()]
    rep.check("integrality", all(v >= 0 for v in vals), "every coefficient of F in Z_p",
              fgl.prec, min_valuation=min(vals, default=None))
    X = [TruncSeries.variable(p, r, D, v, fgl.prec) for v in range(r)]
    zero = TruncSeries.zero(p, r, D, fgl.prec)
    ident = SeriesVec(X)
    rep.check("F(X,0)=X", _substitute(F, X + [zero] * r) == ident, "F(X,0) = X", fgl.prec)
    rep.check("F(0,Y)=Y", _substitute(F, [zero] * r + X) == ident, "F(0,Y) = Y", fgl.prec)
    swapped = F.embed(2 * r, list(range(r, 2 * r)) + list(range(r)))
    rep.check("commutativity", swapped == F, "F(X,Y) = F(Y,X)", fgl.prec)
    if associativity:
        left, right = associativity_sides(fgl)
        resid = left - right
        rep.check("associativity", resid.is_zero(), "F(F(X,Y),Z) = F(X,F(Y,Z))", fgl.prec,
                  residual_min_valuation=resid.minval())
    jl, jf0 = jacobian_identity_parts(fgl)
    prod = matrix_series_product(jl, jf0)
    ok = all((prod[i][j] - (1 if i == j else 0)).is_zero() for i in range(r) for j in range(r))
    rep.check("jacobian", ok, "J_log(X) J_{F(X,.)}(0) = 1", fgl.prec)
    rep.check("J_log(0)=1", all(jl[i][j].constant_term() == (1 if i == j else 0)
                                for i in range(r) for j in range(r)), "J_log(0) = 1")
    rep.check("J_log integral", all(e.minval() >= 0 for row in jl for e in row),
              "J_log(X) has Z_p coefficients")
    return rep.finish()


def associativity_sides(fgl: FormalGroupLaw):
    p, r, D = fgl.p, fgl.r, fgl.D
    F = fgl.law
    n = 3 * r
    Xs = [TruncSeries.variable(p, n, D, v, fgl.prec) for v in range(n)]
    FXY = F.embed(n, list(range(2 * r)))
    FYZ = F.embed(n, list(range(r, 3 * r)))
    left = compose(F, SeriesVec(list(FXY) + Xs[2 * r:]))
    right = compose(F, SeriesVec(Xs[:r] + list(FYZ)))
    return left, right


def jacobian_identity_parts(fgl: FormalGroupLaw):
    """(J_log(X), J_{F(X,.)}(0)) truncated to degree D - 1."""
    p, r, D = fgl.p, fgl.r, fgl.D
    jl = [[e.truncate(D - 1) for e in row] for row in jacobian(fgl.log.truncate(D))]
    X = [TruncSeries.variable(p, r, D, v, fgl.prec) for v in range(r)]
    zero = TruncSeries.zero(p, r, D, fgl.prec)
    jf0 = []
    for i in range(r):
        row = []
        for j in range(r):
            d = fgl.law[i].derivative(r + j).extend_cap(D)
            at0 = _substitute(SeriesVec([d]), X + [zero] * r)[0]
            row.append(at0.truncate(D - 1))
        jf0.append(row)
    return jl, jf0


def lt_exponential(fgl: FormalGroupLaw, verify: bool = True) -> SeriesVec:
    """exp = log^{-1} (cap = the law's log cap), with the factorial check."""
    exp = fgl._scaled_inverse.truncate(fgl.log_cap).with_prec(fgl.prec + fgl.log_cap - 1).dilate(-1)
    if verify:
        bad = factorial_integrality_violations(exp)
        if bad:
            raise IntegralityFailure(f"exp coefficient times factorials not integral at {bad[0]}")
    return exp


def factorial_integrality_violations(exp: SeriesVec):
    out = []
    for comp in exp:
        for e, c in comp.terms():
            fac = 1
            for m in e:
                fac *= sympy.factorial(m)
            val = c * int(fac)
            if vp(val.denominator, comp.p):
                out.append(e)
    return out


def p_series_report(fgl: FormalGroupLaw) -> AuditReport:
    """Linear part p, integrality, [p](X) = u X^(p) + O(X^(p))^2 mod p,
    and (r = 1, u = 1) the exact comparison with pX + X^p."""
    rep = AuditReport("p-series", {"p": fgl.p, "u": fgl.u})
    p, r, D = fgl.p, fgl.r, fgl.D
    ps = fgl.p_series()
    lin = ps.linear_matrix()
    rep.check("linear part p", all(lin[i][j] == (p if i == j else 0) for i in range(r) for j in range(r)),
              "[p](X) = pX + ...")
    rep.check("integral", ps.minval() >= 0, "[p](X) has Z_p coefficients")
    X = [TruncSeries.variable(p, r, D, v, fgl.prec) for v in range(r)]
    target = SeriesVec([x ** p for x in X]).apply_matrix(fgl.u)
    low = [(a - b).degree_part(p) for a, b in zip(ps, target)]
    frob_shape = all(all(k % p == 0 for k in e) for comp in ps for e, c in comp.terms()
                     if c.numerator % p)
    rep.check("congruence mod p", frob_shape and all(c.minval() >= 1 for c in low),
              "[p](X) = u X^(p) + (higher terms in X^(p)) mod p")
    if r == 1 and fgl.u == [[1]]:
        classical = SeriesVec([X[0].scale(p) + X[0] ** p])
        d = ps - classical
        from .padic_core import make_ring
        base = make_ring(p)
        witness = {str(e): base.element(c, fgl.prec).to_json() for e, c in list(d[0].terms())[:4]}
        rep.check("classical [p] = pX + X^p", d.is_zero(), "f^{-1}(p f(X)) = pX + X^p", fgl.prec,
                  **({"first_differences": witness} if witness else {}))
    return rep.finish()


# ---------------------------------------------------------------------------
# points


@dataclass
class FormalPoint:
    coords: list

    def __post_init__(self):
        for c in self.coords:
            if not c.val_bound() > 0:
                raise ValueError("formal points need coordinates of positive valuation")

    @property
    def ring(self):
        return self.coords[0].ring

    def min_valuation(self):
        return min(c.val_bound() for c in self.coords)

    def prec(self):
        return min(c.prec for c in self.coords)

    def to_json(self):
        return [c.to_json() for c in self.coords]

    def __iter__(self):
        return iter(self.coords)

    def __len__(self):
        return len(self.coords)


def _point(x) -> FormalPoint:
    return x if isinstance(x, FormalPoint) else FormalPoint(list(x))


def point_add(fgl: FormalGroupLaw, x, y) -> FormalPoint:
    x, y = _point(x), _point(y)
    return FormalPoint(evaluate(fgl.law, list(x) + list(y), tau=0, kind="integral"))


def point_negate(fgl: FormalGroupLaw, x) -> FormalPoint:
    return FormalPoint(evaluate(fgl.negation(), list(_point(x)), tau=0, kind="integral"))


def _check_level(fgl, ring, n):
    e = ring.e
    if not Fraction(n) > Fraction(e, fgl.p - 1):
        raise ThresholdViolation(f"level {n} must exceed e/(p-1) = {Fraction(e, fgl.p - 1)}")


def log_point(fgl: FormalGroupLaw, x, n: int = 1):
    """Formal logarithm on F((p^n)^(r)); returns the additive vector."""
    coords = list(_point(x)) if not isinstance(x, FormalPoint) else list(x)
    ring = coords[0].ring
    _check_level(fgl, ring, n)
    if any(c.val_bound() < Fraction(n, ring.e) for c in coords):
        raise ThresholdViolation("point is not in the requested filtration step")
    out = evaluate(fgl.log, coords, tau=0, kind="log")
    return out


def exp_point(fgl: FormalGroupLaw, v, n: int = 1) -> FormalPoint:
    coords = list(v)
    ring = coords[0].ring
    _check_level(fgl, ring, n)
    if any(c.val_bound() < Fraction(n, ring.e) for c in coords):
        raise ThresholdViolation("vector is not in the requested filtration step")
    return FormalPoint(evaluate(fgl.exp, coords, tau=Fraction(1, fgl.p - 1), kind="exp"))


def points_agree(a, b):
    """Coordinates agree to the weaker of their precisions."""
    return all((x - y).is_zero() for x, y in zip(a, b))


def filtration_check(fgl: FormalGroupLaw, i: int, samples: int = 50, seed: int = 0,
                     ring=None) -> AuditReport:
    """F(x, y) = x + y mod p^(i+1) for x, y in (p^i)^(r)."""
    from .padic_core import make_ring

    ring = ring or make_ring(fgl.p)
    rng = random.Random(seed)
    rep = AuditReport("filtration-check", {"i": i, "samples": samples}, seed=seed)
    if i < 1:
        raise ThresholdViolation("filtration level must be >= 1")
    failures = []
    for _ in range(samples):
        x = [ring.random_element(rng, fgl.prec, min_val=i) for _ in range(fgl.r)]
        y = [ring.random_element(rng, fgl.prec, min_val=i) for _ in range(fgl.r)]
        x = [c if c.val_bound() > 0 else c + ring.element(fgl.p ** i, fgl.prec) for c in x]
        y = [c if c.val_bound() > 0 else c + ring.element(fgl.p ** i, fgl.prec) for c in y]
        s = point_add(fgl, x, y)
        for a, b, c in zip(s, x, y):
            d = a - b - c
            if d.val_bound() < i + 1:
                failures.append({"x": [str(t) for t in x], "y": [str(t) for t in y]})
                break
    rep.check("F(x,y) = x+y mod p^(i+1)", not failures,
              "F(p^i)/F(p^(i+1)) = p^i/p^(i+1)", fgl.prec,
              **({"counterexample": failures[0]} if failures else {}))
    return rep.finish()


def log_exp_audit(fgl: FormalGroupLaw, samples: int = 50, seed: int = 0, ring=None,
                  min_digits: int = 10) -> AuditReport:
    """exp(log x) = x and log F(x, y) = log x + log y on random points of F(p^(r)).

    Each comparison is certified to the precision the tail bounds allow; a
    sample only counts if that precision reaches ``min_digits``.
    """
    from .padic_core import make_ring

    ring = ring or make_ring(fgl.p)
    rng = random.Random(seed)
    rep = AuditReport("log-exp-check", {"p": fgl.p, "u": fgl.u, "samples": samples,
                                        "ring": ring.to_json()}, seed=seed)
    worst_rt, worst_hom = None, None
    bad_rt, bad_hom = [], []
    for _ in range(samples):
        x = [_nonzero_point_coord(ring, rng, fgl.prec) for _ in range(fgl.r)]
        y = [_nonzero_point_coord(ring, rng, fgl.prec) for _ in range(fgl.r)]
        lx, ly = log_point(fgl, x), log_point(fgl, y)
        back = exp_point(fgl, lx)
        d_rt = min(Fraction((a - b).val_bound()) for a, b in zip(back, x))
        s = point_add(fgl, x, y)
        ls = log_point(fgl, s)
        d_hom = min(Fraction((a - b - c).val_bound()) for a, b, c in zip(ls, lx, ly))
        worst_rt = d_rt if worst_rt is None else min(worst_rt, d_rt)
        worst_hom = d_hom if worst_hom is None else min(worst_hom, d_hom)
        if d_rt < min_digits:
            bad_rt.append([str(c) for c in x])
        if d_hom < min_digits:
            bad_hom.append({"x": [str(c) for c in x], "y": [str(c) for c in y]})
    rep.check("exp(log x) = x", not bad_rt, "exp(log(x)) = x", worst_rt,
              **({"counterexample": bad_rt[0]} if bad_rt else {}))
    rep.check("log homomorphism", not bad_hom, "log(F(x,y)) = log(x) + log(y)", worst_hom,
              **({"counterexample": bad_hom[0]} if bad_hom else {}))
    return rep.finish()


def _nonzero_point_coord(ring, rng, prec):
    c = ring.random_element(rng, prec, min_val=1)
    return c if not c.is_zero() else ring.element(ring.p, prec)

"""Brute-force oracles shared by several test modules."""
import itertools

import sympy
from sympy.matrices.normalforms import smith_normal_form

from ltx.padic_core import vp


def brute_tate(U, d, p):
    """(log_p #H^0, log_p #H^-1) by enumerating M = Z^r / ((U^d - 1) Z^r + p^a Z^r)."""
    r = len(U)
    Um = sympy.Matrix(U)
    A = Um ** d - sympy.eye(r)
    a = vp(int(A.det()), p) + 1
    mod = p ** a
    gens = [tuple(int(x) % mod for x in A.col(j)) for j in range(r)]
    # subgroup generated by the relation columns
    sub = {tuple([0] * r)}
    frontier = list(sub)
    while frontier:
        new = []
        for v in frontier:
            for g in gens:
                w = tuple((x + y) % mod for x, y in zip(v, g))
                if w not in sub:
                    sub.add(w)
                    new.append(w)
        frontier = new
    sub = sorted(sub)

    def canon(v):
        return min(tuple((x + s) % mod for x, s in zip(v, t)) for t in sub)

    elems = sorted({canon(v) for v in itertools.product(range(mod), repeat=r)})

    def act(M, v):
        return canon(tuple(int(x) % mod for x in (M * sympy.Matrix(v))))

    Nm = sum((Um ** i for i in range(d)), sympy.zeros(r, r))
    zero = canon(tuple([0] * r))
    fixed = [v for v in elems if act(Um, v) == v]
    norm_img = {act(Nm, v) for v in elems}
    ker_n = [v for v in elems if act(Nm, v) == zero]
    g1_img = {act(Um - sympy.eye(r), v) for v in elems}

    def log(n):
        return vp(n, p) if n > 1 else 0

    return log(len(fixed) // len(norm_img)), log(len(ker_n) // len(g1_img))


def p_torsion_dim(U, p):
    """dim_Fp of Hom(Z/p, Z^r/(U - 1)Z^r), from sympy's integral Smith form."""
    r = len(U)
    snf = smith_normal_form(sympy.Matrix(U) - sympy.eye(r), domain=sympy.ZZ)
    return sum(1 for i in range(r) if int(snf[i, i]) % p == 0)


def h2_exponent(U, p):
    """log_p of #(Z_p^r/(U - 1)) = v_p(det(U - 1))."""
    return vp(int((sympy.Matrix(U) - sympy.eye(len(U))).det()), p)

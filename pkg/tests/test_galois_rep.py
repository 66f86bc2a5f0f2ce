import random

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from ltx.errors import DegreeBudgetExceeded, NonInvertibleU
from ltx.galois_rep import (
    UnramifiedRep,
    averaged_residue,
    epsilon_matrix,
    is_frobenius_fixed,
    random_finite_order_hyp_i,
    rep_profile,
    solve_twist_matrix,
    twist_det_class,
)
from ltx.padic_core import make_ring, vp
from ltx.plinalg import PMatrix, det

N = 20
FINITE = [[[1]], [[-1]], [[0, 1], [1, 0]], [[0, -1], [1, -1]], [[0, -1], [1, 0]], [[1, 0], [0, -1]]]


def gl_order(p, r):
    n = p ** (r * (r - 1) // 2)
    for i in range(1, r + 1):
        n *= p ** i - 1
    return n


def invertible_u(p, r, rng, lo=-6, hi=6):
    while True:
        u = [[rng.randint(lo, hi) for _ in range(r)] for _ in range(r)]
        if sympy.Matrix(u).det() % p:
            return u


def residual_oracle(sol, u, p):
    """Min valuation of phi(T) - u^{-1} T, with u^{-1} from sympy mod p^(N+5)."""
    m = p ** (N + 5)
    uinv = sympy.Matrix(u).inv_mod(m)
    U = PMatrix.from_ints(sol.ring, [[int(x) for x in row] for row in uinv.tolist()], N)
    R = sol.T.frobenius() - U * sol.T
    return min(x.val_bound() for row in R.entries for x in row)


# -- profiles -----------------------------------------------------------------


def test_profile_examples():
    pr = rep_profile(UnramifiedRep(3, [[4]]), 1)
    assert pr.hyp_F and pr.hyp_T and not pr.hyp_I and pr.omega == 1
    pr = rep_profile(UnramifiedRep(3, [[2]]), 1)
    assert pr.hyp_I and pr.omega == 0
    pr = rep_profile(UnramifiedRep(3, [[2, 0], [0, 4]]), 1)
    assert pr.mixed and pr.omega == 1 and not pr.hyp_I and not pr.hyp_T


def test_profile_uses_power():
    pr = rep_profile(UnramifiedRep(3, [[2]]), 2)
    assert pr.U_N == [[4]] and pr.hyp_T and pr.omega == 1


def test_profile_without_hyp_f():
    pr = rep_profile(UnramifiedRep(3, [[0, 1], [1, 0]]), 2)
    assert not pr.hyp_F and pr.omega is None


def test_rejects_non_unit_det():
    with pytest.raises(NonInvertibleU):
        UnramifiedRep(3, [[3, 0], [0, 1]])


@given(st.integers(0, 2 ** 32), st.sampled_from([3, 5, 7]), st.integers(1, 3), st.integers(1, 6))
def test_profile_flags_consistent(seed, p, r, d_N):
    u = invertible_u(p, r, random.Random(seed))
    pr = rep_profile(UnramifiedRep(p, u, 60), d_N)
    A = sympy.Matrix(u) ** d_N - sympy.eye(r)
    D = int(A.det())
    assert pr.hyp_F == (D != 0)
    if pr.hyp_F:
        assert pr.omega == vp(D, p)
        assert sum([pr.hyp_I, pr.hyp_T, pr.mixed]) == 1
    if pr.hyp_I:
        assert pr.omega == 0
    if pr.hyp_T:
        assert all(int(x) % p == 0 for x in A)
        assert not pr.hyp_F or pr.omega > 0


@given(st.integers(0, 2 ** 32), st.sampled_from([3, 5]), st.integers(1, 3))
def test_d_tilde_divides_group_order(seed, p, r):
    u = invertible_u(p, r, random.Random(seed))
    dt = UnramifiedRep(p, u).d_tilde
    assert gl_order(p, r) % dt == 0
    assert (sympy.Matrix(u) ** dt).applyfunc(lambda x: x % p) == sympy.eye(r)


# -- averaging step -----------------------------------------------------------


@given(st.integers(0, 2 ** 32), st.sampled_from(FINITE[2:]))
def test_averaged_residue_identity(seed, u):
    """phi(T) = u^{-1} T exactly over F_q once u^k = 1 mod p."""
    p = 3
    k = UnramifiedRep(p, u).d_tilde * 2
    rf = make_ring(p, "unramified", k).residue_field
    rng = random.Random(seed)
    r = len(u)
    C = [[rf.random(rng) for _ in range(r)] for _ in range(r)]
    ubar = [[x % p for x in row] for row in u]
    T = averaged_residue(ubar, C, rf, k)
    uinv = sympy.Matrix(u).inv_mod(p)
    for i in range(r):
        for j in range(r):
            rhs = rf.zero()
            for t in range(r):
                rhs = rf.add(rhs, rf.mul(rf.from_int(int(uinv[i, t])), T[t][j]))
            assert rf.frob(T[i][j]) == rhs


# -- twist matrix -------------------------------------------------------------


def test_twist_trivial():
    sol = solve_twist_matrix(UnramifiedRep(3, [[1]], N), seed=0)
    assert sol.k_final == 1 and sol.residual_valuation >= N
    assert is_frobenius_fixed(sol.T)


@pytest.mark.parametrize("u", FINITE)
def test_twist_finite_order(u):
    rep = UnramifiedRep(3, u, N)
    sol = solve_twist_matrix(rep, seed=1)
    assert sol.k_final % rep.d_tilde == 0
    assert residual_oracle(sol, u, 3) >= N
    assert det(sol.T).is_unit()


def test_twist_infinite_order_scalar_exceeds_budget():
    # phi^k(T) = T on a degree-k ring forces 2^k = 1 mod 3^N, i.e. 2 * 3^(N-1) | k
    assert sympy.n_order(2, 3 ** N) == 2 * 3 ** (N - 1)
    with pytest.raises(DegreeBudgetExceeded) as exc:
        solve_twist_matrix(UnramifiedRep(3, [[2]], N), seed=0)
    assert [h["k"] for h in exc.value.history] == [2, 6, 18, 54]
    # each enlargement by p buys one more level, matching v_3(2^k - 1) = 1 + v_3(k)
    for h in exc.value.history:
        assert h["obstruction_level"] == vp(2 ** h["k"] - 1, 3)


def test_twist_low_precision_scalar():
    # 2^2 = 4 = 1 mod 3, so one level needs only k = 2
    sol = solve_twist_matrix(UnramifiedRep(3, [[2]], 1), seed=0)
    assert sol.k_final == 2


def test_twist_reproducible():
    rep = UnramifiedRep(3, [[0, 1], [1, 0]], N)
    a, b = solve_twist_matrix(rep, seed=7), solve_twist_matrix(rep, seed=7)
    assert a.to_json() == b.to_json()


@pytest.mark.parametrize("u", [[[1]], [[0, 1], [1, 0]], [[0, -1], [1, -1]]])
def test_twist_det_class(u):
    rep = twist_det_class(UnramifiedRep(3, u, N), runs=3)
    assert rep.passed, rep.to_json()


def test_epsilon_defining_identity():
    rep = UnramifiedRep(3, [[0, -1], [1, 0]], N)
    sol = solve_twist_matrix(rep, seed=2)
    eps, resid = epsilon_matrix(sol, rep)
    assert resid >= N


# -- random hypothesis-(I) matrices --------------------------------------------


@given(st.integers(0, 2 ** 32), st.sampled_from([3, 5, 7]))
def test_random_hyp_i_matrix(seed, p):
    u = random_finite_order_hyp_i(p, random.Random(seed))
    M = sympy.Matrix(u)
    assert (M - sympy.eye(2)).det() % p != 0
    assert any(M ** n == sympy.eye(2) for n in (1, 2, 3, 4, 6))
    assert rep_profile(UnramifiedRep(p, u), 1).hyp_I

import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ltx.errors import InvalidDegree, InvalidPrime
from ltx.padic_core import AtLeast, frobenius, make_ring, teichmuller, valuation, vp

N = 20


# -- rings ------------------------------------------------------------------


def test_base_ring_frobenius_is_identity():
    R = make_ring(3)
    x = R.element(1234567, N)
    assert frobenius(x) == x


def test_unramified_frobenius_squared_is_identity():
    R = make_ring(3, "unramified", 2)
    rng = random.Random(1)
    for _ in range(50):
        x = R.random_element(rng, N)
        assert frobenius(x, 2) == x
        assert frobenius(frobenius(x)) == x


def test_cyclotomic_ring_shape():
    R = make_ring(5, "cyclotomic_p", 1)
    assert R.e == 4
    zeta = R.gen(N)
    assert valuation(zeta - 1) == Fraction(1, 4)
    assert (zeta ** 5 - 1).is_zero()


@pytest.mark.parametrize("p", [2, 4, 9, 1, 0])
def test_bad_primes_rejected(p):
    with pytest.raises(InvalidPrime):
        make_ring(p)


def test_zero_degree_rejected():
    with pytest.raises(InvalidDegree):
        make_ring(3, "unramified", 0)


def test_modulus_is_irreducible():
    import sympy

    for p, k in [(3, 2), (3, 3), (5, 2), (7, 3)]:
        f = make_ring(p, "unramified", k).modulus
        poly = sympy.Poly(list(reversed(f)), sympy.Symbol("x"), modulus=p)
        assert poly.is_irreducible


# -- arithmetic against integer arithmetic mod p^N ----------------------------


@given(st.integers(-10 ** 30, 10 ** 30), st.integers(-10 ** 30, 10 ** 30))
def test_base_arithmetic_matches_integers(a, b):
    R = make_ring(5)
    m = 5 ** N
    x, y = R.element(a, N), R.element(b, N)
    assert (x + y).coeffs[0] % m == (a + b) % m
    assert (x * y).coeffs[0] % m == (a * b) % m
    assert (x - y).coeffs[0] % m == (a - b) % m
    assert (x * y).prec >= N


@given(st.integers(1, 10 ** 12).filter(lambda n: n % 3))
def test_unit_inverse_matches_modular_inverse(a):
    R = make_ring(3)
    inv = R.element(a, N).inverse()
    assert inv.coeffs[0] == pow(a, -1, 3 ** N)


def test_division_by_p_consumes_precision():
    R = make_ring(3)
    x = R.element(9, N) / 3
    assert x == R.element(3, N)
    assert x.prec <= N


# -- valuation ----------------------------------------------------------------


def test_valuation_normalization():
    for kind in ("base", "unramified", "cyclotomic"):
        R = make_ring(3, kind, 2 if kind != "base" else 1)
        assert valuation(R.element(3, N)) == 1


def test_valuation_of_zeta_minus_one():
    for p in (3, 5, 7):
        R = make_ring(p, "cyclotomic", 1)
        assert valuation(R.gen(N) - 1) == Fraction(1, p - 1)


def test_valuation_p_squared_times_unit():
    R = make_ring(3, "unramified", 2)
    rng = random.Random(7)
    for _ in range(20):
        u = R.random_unit(rng, N)
        assert valuation(u * 9) == 2


def test_zero_reports_marker():
    R = make_ring(3)
    v = valuation(R.zero(N))
    assert isinstance(v, AtLeast) and v.bound == N


@given(st.integers(1, 10 ** 15), st.integers(1, 10 ** 15))
def test_valuation_is_additive(a, b):
    R = make_ring(3)
    assert valuation(R.element(a, 40) * R.element(b, 40)) == vp(a, 3) + vp(b, 3)


@given(st.integers(0, 2 ** 32), st.integers(0, 2 ** 32))
def test_valuation_additive_cyclotomic(s1, s2):
    R = make_ring(3, "cyclotomic", 2)
    x = R.random_element(random.Random(s1), N)
    y = R.random_element(random.Random(s2), N)
    vx, vy = valuation(x), valuation(y)
    if isinstance(vx, AtLeast) or isinstance(vy, AtLeast) or vx + vy >= N - 2:
        return
    assert valuation(x * y) == vx + vy


# -- Frobenius ----------------------------------------------------------------


@given(st.integers(0, 2 ** 32))
def test_frobenius_is_ring_homomorphism(seed):
    R = make_ring(3, "unramified", 3)
    rng = random.Random(seed)
    x, y = R.random_element(rng, N), R.random_element(rng, N)
    assert frobenius(x + y) == frobenius(x) + frobenius(y)
    assert frobenius(x * y) == frobenius(x) * frobenius(y)
    assert frobenius(x, 3) == x


@given(st.integers(0, 2 ** 32))
def test_frobenius_lifts_pth_power(seed):
    R = make_ring(5, "unramified", 2)
    x = R.random_element(random.Random(seed), N)
    assert (frobenius(x) - x ** 5).val_bound() >= 1


def test_frobenius_on_cyclotomic_fixes_zeta():
    R = make_ring(3, "cyclotomic", 2)
    z = R.gen(N)
    assert frobenius(z) == z


# -- Teichmueller -------------------------------------------------------------


def test_teichmuller_trivial_values():
    R = make_ring(3, "unramified", 2)
    assert teichmuller(1, R, N) == R.one(N)
    assert teichmuller(0, R, N).is_zero()


def test_teichmuller_base_matches_power_limit():
    # omega(c) = c^(p^(N-1)) mod p^N, an independent oracle
    for p in (3, 5, 7):
        R = make_ring(p)
        for c in range(1, p):
            assert teichmuller(c, R, N).coeffs[0] == pow(c, p ** (N - 1), p ** N)


def test_teichmuller_q9_root_of_unity_and_frobenius():
    R = make_ring(3, "unramified", 2)
    rf = R.residue_field
    g = rf.generator()
    t = teichmuller(g, R, N)
    assert (t ** 8 - 1).is_zero()
    assert t.residue() == g
    assert frobenius(t) == teichmuller(rf.pow(g, 3), R, N)


def test_teichmuller_unramified_matches_power_limit():
    # for q = 9: omega(c) = lim x^(q^n) with x any lift of c
    R = make_ring(3, "unramified", 2)
    rf = R.residue_field
    P = 12
    for c in rf.elements():
        if rf.is_zero(c):
            continue
        x = R.from_residue(c, P)
        for _ in range(P):
            x = x ** 9
        assert teichmuller(c, R, P) == x


@given(st.integers(0, 2 ** 32))
def test_teichmuller_is_multiplicative(seed):
    R = make_ring(5, "unramified", 2)
    rf = R.residue_field
    rng = random.Random(seed)
    a, b = rf.random(rng), rf.random(rng)
    assert teichmuller(rf.mul(a, b), R, N) == teichmuller(a, R, N) * teichmuller(b, R, N)


# -- precision ----------------------------------------------------------------


@given(st.integers(0, 2 ** 32))
def test_precision_never_over_reported(seed):
    """Recomputing at N + 10 agrees with every digit claimed at N."""
    R = make_ring(3, "unramified", 2)

    def compute(prec):
        rng = random.Random(seed)
        x = R.element([rng.getrandbits(200), rng.getrandbits(200)], prec)
        y = R.element([rng.getrandbits(200), rng.getrandbits(200)], prec)
        z = (x * y + 3) / 9 + x ** 3
        return z

    lo, hi = compute(N), compute(N + 10)
    assert (lo - hi.with_prec(lo.prec)).is_zero()
    assert lo.prec <= N


def test_product_precision_rule():
    R = make_ring(3)
    x = R.element(9, 10)  # v = 2
    y = R.element(5, 12)  # v = 0
    assert (x * y).prec >= min(10 + 0, 12 + 2)


def test_json_round_trip():
    from ltx.padic_core import PadicElement

    R = make_ring(5, "cyclotomic", 2)
    x = R.random_element(random.Random(3), N)
    assert PadicElement.from_json(x.to_json()) == x

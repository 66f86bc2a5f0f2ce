import random

import pytest
import sympy
from hypothesis import assume, given
from hypothesis import strategies as st

from ltx.cohomology import (
    ExtensionShape,
    cohomology_profile,
    h2_structure,
    random_hyp_f_matrix,
    tame_triviality_audit,
    torsion_free_check,
    wild_nontriviality_witness,
)
from ltx.errors import DimensionMismatch, HypothesisFViolated
from ltx.galois_rep import UnramifiedRep, random_finite_order_hyp_i
from oracles import brute_tate, h2_exponent, p_torsion_dim


def U_N(u, d_N):
    return [[int(x) for x in row] for row in (sympy.Matrix(u) ** d_N).tolist()]


def test_shape_fields():
    s = ExtensionShape(m=2, e=6, d=3, p=3)
    assert s.n_N == 36 and s.d_N == 6 and not s.tame
    assert ExtensionShape(1, 2, 1, 3).tame
    with pytest.raises(DimensionMismatch):
        ExtensionShape(0, 1, 1, 3)


def test_profile_tame_example():
    cp = cohomology_profile(UnramifiedRep(3, [[2]]), ExtensionShape(1, 2, 1, 3))
    assert cp.omega == 0 and cp.coh_trivial and cp.reason == "tame"
    assert cp.h1_rank == 2


def test_profile_wild_example():
    cp = cohomology_profile(UnramifiedRep(3, [[4]]), ExtensionShape(1, 3, 1, 3))
    assert cp.omega == 1 and not cp.coh_trivial and cp.reason == "wild_nontrivial"


def test_profile_wild_unit():
    cp = cohomology_profile(UnramifiedRep(3, [[2]]), ExtensionShape(1, 3, 1, 3))
    assert cp.coh_trivial and cp.reason == "wild_unit"


def test_h2_diag_example():
    u = [[2, 1], [0, 2]]
    div = h2_structure(UnramifiedRep(3, u), 2)
    assert div.omega == h2_exponent(U_N(u, 2), 3)
    assert list(div.valuations).count(0) + sum(1 for v in div.valuations if v) == 2


def test_hyp_f_violation():
    with pytest.raises(HypothesisFViolated):
        cohomology_profile(UnramifiedRep(3, [[1]]), ExtensionShape(1, 1, 1, 3))


@given(st.integers(0, 2 ** 32), st.sampled_from([3, 5]), st.integers(1, 3), st.integers(1, 4))
def test_h2_order_is_det_valuation(seed, p, r, d_N):
    u = random_hyp_f_matrix(p, r, d_N, random.Random(seed))
    div = h2_structure(UnramifiedRep(p, u, 30), d_N)
    assert div.omega == h2_exponent(U_N(u, d_N), p)
    assert sum(1 for v in div.valuations if v) == p_torsion_dim(U_N(u, d_N), p)


@given(st.integers(0, 2 ** 32), st.sampled_from([3, 5]), st.integers(1, 3), st.integers(1, 6))
def test_tame_audit_random(seed, p, r, d):
    rng = random.Random(seed)
    shape = ExtensionShape(1, p - 1, d, p)
    u = random_hyp_f_matrix(p, r, shape.d_N, rng, bound=4)
    assert tame_triviality_audit(UnramifiedRep(p, u, 30), shape).passed


def test_tame_factorization_trivial_degree():
    rep = tame_triviality_audit(UnramifiedRep(3, [[2]]), ExtensionShape(1, 2, 1, 3))
    assert rep.passed


def test_tame_scalar_identity():
    # (1 - 4) = (1 + 2)(1 - 2)
    rep = tame_triviality_audit(UnramifiedRep(3, [[2]]), ExtensionShape(1, 2, 2, 3))
    checks = {c.name: c for c in rep.checks}
    assert checks["factorization"].status == "pass"
    assert checks["det(1 - U_K) != 0"].witness["value"] == -1
    assert checks["det(norm) != 0"].witness["value"] == 3


@given(st.integers(0, 2 ** 32), st.integers(2, 3))
def test_tame_tate_groups_match_enumeration(seed, d):
    rng = random.Random(seed)
    u = random_hyp_f_matrix(3, 1, d, rng, bound=10)
    assume(h2_exponent(U_N(u, d), 3) <= 4)
    assert brute_tate(u, d, 3) == (0, 0)
    assert tame_triviality_audit(UnramifiedRep(3, u), ExtensionShape(1, 2, d, 3)).passed


def test_wild_witness_examples():
    rep = wild_nontriviality_witness(UnramifiedRep(3, [[4]]), ExtensionShape(1, 3, 1, 3))
    assert rep.passed and rep.data["hom_dimension"] == 1
    rep = wild_nontriviality_witness(UnramifiedRep(3, [[4, 0], [0, 4]]), ExtensionShape(1, 3, 1, 3))
    assert rep.passed and rep.data["hom_dimension"] == 2
    rep = wild_nontriviality_witness(UnramifiedRep(3, [[2]]), ExtensionShape(1, 3, 1, 3))
    assert rep.passed and rep.data["hom_dimension"] == 0


def test_wild_rejects_tame_shape():
    assert not wild_nontriviality_witness(UnramifiedRep(3, [[4]]), ExtensionShape(1, 2, 1, 3)).passed


@given(st.integers(0, 2 ** 32), st.sampled_from([3, 5]), st.integers(1, 3))
def test_wild_equivalence_chain(seed, p, r):
    u = random_hyp_f_matrix(p, r, 1, random.Random(seed))
    shape = ExtensionShape(1, p, 1, p)
    rep = wild_nontriviality_witness(UnramifiedRep(p, u, 30), shape)
    assert rep.passed
    hyp_i = int((sympy.Matrix(u) - sympy.eye(r)).det()) % p != 0
    assert cohomology_profile(UnramifiedRep(p, u, 30), shape).coh_trivial == hyp_i
    assert rep.data["hom_dimension"] == p_torsion_dim(u, p)


def test_torsion_free_for_hyp_i():
    u = random_finite_order_hyp_i(3, random.Random(4))
    assert torsion_free_check(UnramifiedRep(3, u), samples=5, degree=9).passed

from hypothesis import given

from dgtot.algebra import QQ, PolyRing
from dgtot.dg import (
    DGMorphism,
    SemifreeDG,
    default_slack,
    dg_homology,
    dg_morphism_check,
    identity_dg_morphism,
    is_minimal,
    suggest_window,
    validate_dg,
)
from conftest import load_module
from oracles import dg_homology_dims
from strategies import bivariate_modules, univariate_modules

R = PolyRing(QQ, ["x"])


def test_e1_validates_with_well_order(e1):
    v = validate_dg(e1)
    assert v.ok and v.well_order == ["e1", "e2", "e3", "e4"]


def test_e1_is_not_a_dg_module_under_koszul_signs():
    v = validate_dg(load_module("e1", "koszul"))
    assert not v.ok
    assert v.violation.kind == "d_squared" and v.violation.element == "e4"


def test_dsquared_fixture_reports_the_offending_generator():
    v = validate_dg(load_module("dsquared"))
    assert not v.ok
    assert (v.violation.kind, v.violation.element, v.violation.entry) == ("d_squared", "e3", "e1")


def test_inhomogeneous_entry_is_a_homogeneity_violation():
    M = SemifreeDG(R, ["a", "b"], [0, 3], [[R.zero, R.parse("x + x^2")], [R.zero, R.zero]])
    v = validate_dg(M)
    assert v.violation.kind == "homogeneity" and v.violation.element == "b"


def test_e1_homology_presentation(e1):
    H = dg_homology(e1, (0, 20))
    assert H.certified
    assert sorted(H.generator_degrees) == [0, 5]
    assert sorted(H.relation_degrees) == [2, 3, 7]
    oracle = dg_homology_dims(e1, (0, 20))
    assert {d: H.dims[d] for d in range(0, 21)} == oracle


def test_e3_homology_dims_match_oracle(e3):
    H = dg_homology(e3)
    lo, hi = H.window
    assert H.certified
    assert {d: H.dims[d] for d in range(lo, hi + 1)} == dg_homology_dims(e3, H.window)


def test_short_window_is_not_certified(e1):
    H = dg_homology(e1, (0, 6))
    assert not H.certified and H.suggested_window == (0, 14)


def test_window_rules():
    assert default_slack((0, 20)) == 5
    assert default_slack((3, 4)) == 1
    assert suggest_window((0, 20)) == (0, 40)
    assert suggest_window((0, 3)) == (0, 11)


def test_minimality(e1, e3):
    assert is_minimal(e1) and is_minimal(e3)
    M = SemifreeDG(R, ["a", "b"], [0, 1], [[R.zero, R.one], [R.zero, R.zero]])
    assert not is_minimal(M)


def test_identity_is_a_quasi_isomorphism(e3):
    assert dg_morphism_check(identity_dg_morphism(e3)).ok


def test_non_chain_map_is_rejected(e3):
    n = e3.rank
    m = [[R.zero] * n for _ in range(n)]
    m[0][0] = R.one
    cert = dg_morphism_check(DGMorphism(e3, e3, m))
    assert not cert.chain_map and cert.failure["element"] == "e4"


@given(univariate_modules(), univariate_modules("koszul"))
def test_random_modules_are_valid(M, K):
    assert validate_dg(M).ok and validate_dg(K).ok


@given(bivariate_modules(max_rank=3))
def test_homology_dims_match_oracle(M):
    H = dg_homology(M)
    lo, hi = H.window
    assert {d: H.dims[d] for d in range(lo, hi + 1)} == dg_homology_dims(M, H.window)

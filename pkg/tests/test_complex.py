from hypothesis import given

from dgtot.algebra import QQ, PolyRing
from dgtot.complex import (
    ComplexMorphism,
    GradedComplex,
    check_homotopy,
    concentrated_replacement,
    homology_concentration,
    homology_truncated,
    homotopy_between,
    identity_morphism,
    is_quasiiso,
    shift_complex,
    tensor_complexes,
    validate_complex,
    validate_morphism,
    zero_morphism,
)
from dgtot.graded import GradedMatrix, TwistedFreeModule
from conftest import load_complex
from strategies import complex_pairs, complexes

R = PolyRing(QQ, ["x", "y"])


def contractible():
    F = TwistedFreeModule(R, [0])
    return GradedComplex(R, {0: F, 1: F}, {1: GradedMatrix(F, F, [[R.one]])})


def test_koszul_homology_is_the_residue_field():
    K = load_complex("koszul")
    table = homology_truncated(K, (0, 5))
    nonzero = {k: v for k, v in table.items() if v}
    assert nonzero == {(0, 0): 1}
    assert homology_concentration(K, (0, 5)) == [0]


def test_composite_violation_is_located():
    F0, F1, F2 = (TwistedFreeModule(R, [a]) for a in (0, 1, 2))
    X = GradedComplex(R, {0: F0, 1: F1, 2: F2},
                      {1: GradedMatrix(F1, F0, [[R.parse("x")]]),
                       2: GradedMatrix(F2, F1, [[R.parse("y")]])})
    bad = validate_complex(X)
    assert bad is not None and bad.position == 2 and bad.entry == (0, 0)


def test_identity_is_homotopic_to_zero_on_a_contractible_complex():
    X = contractible()
    mu, lam = identity_morphism(X), zero_morphism(X, X)
    sigma = homotopy_between(mu, lam)
    assert sigma is not None
    assert check_homotopy(mu, lam, sigma)


def test_identity_not_homotopic_to_zero_with_homology():
    K = load_complex("koszul")
    assert homotopy_between(identity_morphism(K), zero_morphism(K, K)) is None


def test_quasi_isomorphism_certificate_for_identity():
    K = load_complex("koszul")
    assert is_quasiiso(identity_morphism(K), (0, 6)).ok


def test_zero_map_is_not_a_quasi_isomorphism():
    K = load_complex("koszul")
    cert = is_quasiiso(zero_morphism(K, K), (0, 4))
    assert cert.chain_map and not cert.ok


def test_non_chain_map_reported():
    K = load_complex("koszul")
    F = K.module(0)
    mu = ComplexMorphism(K, K, {0: GradedMatrix(F, F, [[R.one]])})
    bad = validate_morphism(mu)
    assert bad is not None and bad.position == 1


def test_shift_negates_odd_differentials():
    K = load_complex("koszul")
    S = shift_complex(K, 1)
    assert S.support == [1, 2, 3]
    assert S.diff(2).entries == [[-p for p in row] for row in K.diff(1).entries]
    assert validate_complex(S) is None


def test_concentrated_replacement_on_koszul():
    K = load_complex("koszul")
    rep = concentrated_replacement(K, 0, (0, 6))
    assert rep.certified
    assert rep.homology.dim((0, 0)) == 1
    assert rep.homology.dim((0, 3)) == 0


@given(complexes())
def test_random_complexes_validate(X):
    assert validate_complex(X) is None


@given(complex_pairs())
def test_tensor_product_is_a_complex(pair):
    X, Y = pair
    T = tensor_complexes(X, Y)
    assert validate_complex(T) is None
    assert sorted(T.twists()) == sorted(a + b for a in X.twists() for b in Y.twists())


@given(complexes())
def test_identity_is_homotopic_to_itself(X):
    mu = identity_morphism(X)
    sigma = homotopy_between(mu, mu)
    assert sigma is not None and check_homotopy(mu, mu, sigma)


@given(complexes())
def test_replacement_certifies_when_concentrated(X):
    window = X.auto_window()
    conc = homology_concentration(X, window)
    if len(conc) == 1:
        assert concentrated_replacement(X, conc[0], window).certified

import random

import pytest
from hypothesis import given

from dgtot.algebra import QQ, PolyRing
from dgtot.complex import validate_complex
from dgtot.dg import SemifreeDG
from dgtot.graded import GradedMatrix, TwistedFreeModule
from dgtot.randomgen import COEFFS
from dgtot.univariate import (
    CertificationError,
    boundary_preimage,
    build_resolution_complex,
    embed,
    graded_diagonalize,
    homology_decompose,
)
from oracles import invariant_factor_degrees
from strategies import presentations, seeds, univariate_modules

R = PolyRing(QQ, ["x"])
x = R.gen(0)


def matrix(rows, cols, entries):
    return GradedMatrix(TwistedFreeModule(R, cols), TwistedFreeModule(R, rows),
                        [[R.parse(e) if isinstance(e, str) else e for e in row]
                         for row in entries])


def test_rank_one_relation_matrix():
    P = matrix([0, 1], [3, 2], [["x^3", "x^2"], ["x^2", "x"]])
    snf = graded_diagonalize(P)
    assert [c - r for r, c in snf.pairs] == invariant_factor_degrees(P) == [1]
    assert len(snf.free_twists) == 1 and len(snf.zero_col_twists) == 1


def test_unit_entries_cancel():
    P = matrix([0, 2], [2, 3], [["x^2", "x^3"], ["1", "0"]])
    snf = graded_diagonalize(P)
    assert snf.unit_pairs and snf.betti() == {0: {0: 1}, 1: {3: 1}}


def test_diagonal_form_identity():
    P = matrix([0, 1, 3], [2, 4, 5], [["x^2", "0", "x^5"], ["x", "x^3", "0"], ["0", "x", "x^2"]])
    snf = graded_diagonalize(P)
    U, V = snf.U, snf.V
    n, m = len(U), len(V)
    prod = [[sum((U[i][k] * P.entries[k][j] for k in range(n)), R.zero) for j in range(m)]
            for i in range(n)]
    prod = [[sum((prod[i][k] * V[k][j] for k in range(m)), R.zero) for j in range(m)]
            for i in range(n)]
    assert prod == snf.diagonal
    assert sorted(c - r for r, c in snf.pairs) == sorted(invariant_factor_degrees(P))


def _unitriangular(twists, rng):
    n = len(twists)
    T = [[R.one if i == j else R.zero for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < 0.5:
                T[i][j] = x ** (twists[j] - twists[i]) * rng.choice(COEFFS)
    return T


def _mul(A, B):
    return [[sum((A[i][k] * B[k][j] for k in range(len(B))), R.zero) for j in range(len(B[0]))]
            for i in range(len(A))]


@given(presentations())
def test_invariant_factors_match_determinantal_divisors(P):
    snf = graded_diagonalize(P)
    expected = [d for d in invariant_factor_degrees(P) if d > 0]
    assert sorted(c - r for r, c in snf.pairs) == sorted(expected)


@given(presentations(), seeds)
def test_betti_numbers_invariant_under_change_of_basis(P, seed):
    if not P.source.rank:
        return
    rng = random.Random(seed)
    U = _unitriangular(list(P.target.twists), rng)
    V = _unitriangular(list(P.source.twists), rng)
    Q = GradedMatrix(P.source, P.target, _mul(_mul(U, P.entries), V))
    assert graded_diagonalize(Q).betti() == graded_diagonalize(P).betti()


def test_e3_decomposition(e3):
    dec = homology_decompose(e3)
    fmt = e3.format_element
    assert [(r, c, fmt(z)) for r, c, z in dec.torsion] == [(2, 7, "x^2*e1 + e2"), (4, 8, "e3")]
    assert [(r, fmt(z)) for r, z in dec.free] == [(0, "e1")]


def test_decomposition_requires_certified_window(e3):
    with pytest.raises(CertificationError) as err:
        homology_decompose(e3, (0, 5))
    assert err.value.suggested_window == (0, 13)


def test_boundary_preimages(e3):
    assert boundary_preimage(e3, [x ** 7, x ** 5, R.zero, R.zero, R.zero]) == \
        [R.zero, R.zero, R.zero, R.one, R.zero]
    assert boundary_preimage(e3, [R.zero, R.zero, x ** 4, R.zero, R.zero]) == \
        [R.zero] * 4 + [R.one]
    assert boundary_preimage(e3, [R.zero] * 5) == [R.zero] * 5
    with pytest.raises(ValueError):
        boundary_preimage(e3, [R.one] + [R.zero] * 4)


def test_resolution_complex_of_e3(e3):
    res = build_resolution_complex(homology_decompose(e3))
    assert [(s["kind"], s["r"], s["c"]) for s in res.summands] == \
        [("torsion", 2, 7), ("torsion", 4, 8), ("free", 0, None)]
    assert validate_complex(res.complex) is None
    assert str(res.complex.diff(1).entries[0][0]) == "x^5"
    sub = res.subcomplex(1)
    assert str(sub.diff(1).entries[0][0]) == "x^4"


def test_embed_e3(e3):
    w = embed(e3)
    assert w.ok
    maps = {m["summand"]: m["images"] for m in w.summand_maps()}
    assert maps[1] == {"sigma^{2}1": "x^2*e1 + e2", "sigma^{8}1": "e4"}
    assert maps[2] == {"sigma^{4}1": "e3", "sigma^{9}1": "e5"}
    assert maps[3] == {"sigma^{0}1": "e1"}


def test_embed_rejects_multivariate_rings(e1):
    with pytest.raises(ValueError):
        embed(e1)


def test_embed_contractible_module():
    M = SemifreeDG(R, ["a", "b"], [0, 1], [[R.zero, R.one], [R.zero, R.zero]])
    w = embed(M)
    assert w.ok and not w.resolution.summands


@given(univariate_modules())
def test_embed_random(M):
    assert embed(M).ok


@given(univariate_modules("koszul"))
def test_embed_random_koszul(M):
    assert embed(M).ok


def test_already_diagonal_presentation():
    P = matrix([2, 4, 0], [7, 8], [["x^5", "0"], ["0", "x^4"], ["0", "0"]])
    snf = graded_diagonalize(P)
    assert sorted(snf.pairs) == [(2, 7), (4, 8)] and snf.free_twists == [0]
    assert snf.betti() == {0: {2: 1, 4: 1, 0: 1}, 1: {7: 1, 8: 1}}

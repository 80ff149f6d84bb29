import itertools
from math import comb

import pytest
from hypothesis import given

from dgtot.algebra import QQ, PolyRing
from dgtot.dg import SemifreeDG, dg_homology
from dgtot.obstruction import (
    ObstructionError,
    end0,
    is_indecomposable,
    minimal_free_resolution,
    tot_image_obstruction,
)
from dgtot.suites import oracle_betti
from dgtot.totaling import tot
from conftest import load_complex
from oracles import end0_dimension
from strategies import bivariate_modules, presentations

R2 = PolyRing(QQ, ["x", "y"])


def direct_sum(M, N):
    n, m = M.rank, N.rank
    z = M.ring.zero
    D = [row + [z] * m for row in M.D] + [[z] * n + row for row in N.D]
    return SemifreeDG(M.ring, M.labels + N.labels, M.degrees + N.degrees, D, M.convention)


def free_module(ring, degrees, labels=None):
    labels = labels or [f"f{k + 1}" for k in range(len(degrees))]
    return SemifreeDG(ring, labels, degrees)


def hilbert_from_betti(res, ring, d):
    n = ring.nvars
    return sum((-1) ** i * sum(c * comb(d - j + n - 1, n - 1) for j, c in row.items() if d >= j)
               for i, row in res.betti().items())


def test_e1_resolution(e1):
    res = minimal_free_resolution(dg_homology(e1, (0, 20)))
    assert res.certified
    assert res.betti_numbers() == [2, 3, 1]
    assert [sorted(t) for t in res.twists] == [[0, 5], [2, 3, 7], [4]]
    assert res.betti_sum == 6


def test_e3_resolution_both_methods(e3):
    H = dg_homology(e3)
    a = minimal_free_resolution(H, method="degreewise")
    b = minimal_free_resolution(H, method="diagonalize")
    assert a.certified and b.certified
    assert [sorted(t) for t in a.twists] == [sorted(t) for t in b.twists] == [[0, 2, 4], [7, 8]]


def test_free_rank_one():
    M = free_module(R2, [3])
    res = minimal_free_resolution(dg_homology(M))
    assert res.betti() == {0: {3: 1}}


@pytest.mark.parametrize("name", ["e1", "e3", "crossing"])
def test_resolution_recovers_hilbert_function(name, request):
    M = request.getfixturevalue({"e1": "e1", "e3": "e3", "crossing": "ex22"}[name])
    H = dg_homology(M)
    res = minimal_free_resolution(H)
    lo, hi = H.window
    for d in range(lo, hi + 1):
        assert H.dims[d] == hilbert_from_betti(res, M.ring, d)


@pytest.mark.parametrize("name,dim", [("e1", 2), ("e3", 4), ("crossing", 1)])
def test_end0_dimensions(name, dim, request):
    M = request.getfixturevalue({"e1": "e1", "e3": "e3", "crossing": "ex22"}[name])
    H = dg_homology(M)
    alg = end0(H)
    assert alg.dim == dim == end0_dimension(H.presentation, H.window)
    unit = alg.unit()
    assert unit == [alg.field.one] + [alg.field.zero] * (dim - 1)
    assert all(alg.product(unit, v) == v for v in (unit, [alg.field.zero] * dim))


def test_e1_endomorphisms_form_a_local_ring(e1):
    H = dg_homology(e1, (0, 20))
    alg = end0(H)
    psi = [alg.field.zero, alg.field.one]
    assert alg.product(psi, psi) == [alg.field.zero] * 2
    ind = is_indecomposable(H, alg=alg)
    assert (ind.verdict, ind.criterion) == ("YES", "local_ring")


def test_split_free_module_is_decomposable():
    H = dg_homology(free_module(R2, [0, 1]))
    ind = is_indecomposable(H)
    assert ind.end0_dim == 4
    assert ind.verdict == "NO" and ind.witness is not None


def test_residue_field_is_indecomposable():
    H = dg_homology(tot(load_complex("koszul")))
    ind = is_indecomposable(H)
    assert (ind.verdict, ind.end0_dim) == ("YES", 1)


def test_e1_verdict(e1):
    v = tot_image_obstruction(e1, (0, 20))
    assert v.verdict == "NOT_IN_TOT_IMAGE"
    assert (v.rank, v.betti_sum, v.minimal) == (4, 6, True)


def test_e3_verdict(e3):
    v = tot_image_obstruction(e3)
    assert v.verdict == "NO_OBSTRUCTION" and v.rank == v.betti_sum == 5
    assert v.indecomposable.verdict == "NO"


def test_zero_differential_has_no_obstruction():
    assert tot_image_obstruction(free_module(R2, [2])).verdict == "NO_OBSTRUCTION"


def test_non_minimal_module_is_inconclusive():
    z, one = R2.zero, R2.one
    M = SemifreeDG(R2, ["a", "b", "c"], [0, 1, 1], [[z, one, z], [z, z, z], [z, z, z]])
    v = tot_image_obstruction(M)
    assert (v.verdict, v.failing_hypothesis) == ("INCONCLUSIVE", "minimality")


def test_decomposable_homology_is_inconclusive(e1):
    M = direct_sum(e1, free_module(e1.ring, [1], ["g"]))
    v = tot_image_obstruction(M, (0, 20))
    assert (v.verdict, v.failing_hypothesis) == ("INCONCLUSIVE", "indecomposability")


def test_short_window_raises_with_suggestion(e1):
    with pytest.raises(ObstructionError) as err:
        tot_image_obstruction(e1, (0, 6))
    assert err.value.suggested_window == (0, 14)


def test_invalid_module_is_rejected():
    z, x = R2.zero, R2.parse("x")
    M = SemifreeDG(R2, ["a", "b", "c"], [0, 2, 4], [[z, x, z], [z, z, x], [z, z, z]])
    with pytest.raises(ValueError):
        tot_image_obstruction(M)


@given(presentations())
def test_degreewise_resolution_matches_diagonalization(P):
    via_res, via_snf, certified = oracle_betti(P)
    assert certified and via_res == via_snf


@given(bivariate_modules(max_rank=4))
def test_random_resolutions_recover_hilbert_function(M):
    H = dg_homology(M)
    res = minimal_free_resolution(H)
    assert res.certified
    lo, hi = H.window
    for d in range(lo, hi + 1):
        assert H.dims[d] == hilbert_from_betti(res, M.ring, d)


@given(bivariate_modules(max_rank=3))
def test_end0_matches_oracle(M):
    H = dg_homology(M)
    assert end0(H).dim == end0_dimension(H.presentation, H.window)


def test_e1_nilpotent_endomorphism_shape(e1):
    alg = end0(dg_homology(e1, (0, 20)))
    f = alg.field
    assert alg.format([f.zero, f.one]) == [["0", "x1^5"], ["0", "0"]]


def test_free_module_of_rank_two_has_both_projections():
    alg = end0(dg_homology(free_module(R2, [0, 0])))
    f = alg.field
    assert alg.dim == 4
    idempotents = set()
    for c in itertools.product((-1, 0, 1), repeat=alg.dim):
        u = [f(v) for v in c]
        if alg.product(u, u) == u:
            idempotents.add(tuple(map(tuple, alg.format(u))))
    assert (("1", "0"), ("0", "0")) in idempotents
    assert (("0", "0"), ("0", "1")) in idempotents

import random

import pytest
from hypothesis import given

from dgtot.algebra import QQ, PolyRing
from dgtot.crossing import (
    conjugation_holds,
    detot,
    eliminate_crossing,
    has_crossing,
    partition,
    rank3_classify,
)
from dgtot.dg import SemifreeDG, validate_dg
from dgtot.randomgen import random_semifree
from dgtot.totaling import tot
from strategies import bivariate_modules, complexes, conventions, seeds

R = PolyRing(QQ, ["x", "y"])


def as_map(M):
    return {lab: (M.degrees[k], M.differential_of(lab)) for k, lab in enumerate(M.labels)}


def test_crossing_fixture_partition(ex22):
    part = partition(ex22)
    assert part.level_sets() == [["e1"], ["e2", "e3"]]
    assert part.unassigned == ["e4"]


def test_crossing_fixture_is_eliminated(ex22):
    res = eliminate_crossing(ex22)
    assert res.success and not has_crossing(res.module)
    assert res.change.substitutions() == ["e4' = e4 - z^3*e2"]
    assert res.partition.level_sets() == [["e1"], ["e2", "e3"], ["e4"]]
    z = ex22.ring
    assert res.module.differential_of("e4") == {"e2": z.parse("y*z"), "e3": z.parse("-x")}
    assert conjugation_holds(ex22, res.module, res.change)


def test_crossing_fixture_is_not_koszul(ex22):
    v = validate_dg(ex22.with_convention("koszul"))
    assert not v.ok and v.violation.element == "e4"


@given(seeds)
def test_elimination_under_koszul_signs(seed):
    M = random_semifree(R, random.Random(seed), max_rank=5, max_degree=6, max_entry=3,
                        convention="koszul")
    res = eliminate_crossing(M)
    assert validate_dg(res.module).ok
    assert conjugation_holds(M, res.module, res.change)


def test_no_crossing_gives_identity_change(e3):
    res = eliminate_crossing(e3)
    assert res.success and res.change.is_identity() and res.passes == 0


def test_e1_crossing_cannot_be_removed(e1):
    res = eliminate_crossing(e1)
    assert not res.success
    assert [u["element"] for u in res.unsolved] == ["e4"]
    assert res.unsolved[0]["levels_tried"] == [2, 1]


def test_detot_of_eliminated_fixture(ex22):
    X = detot(eliminate_crossing(ex22).module)
    assert X.support == [0, 1, 2]
    assert [str(p) for p in X.diff(1).entries[0]] == ["x", "y*z"]
    assert [[str(p) for p in row] for row in X.diff(2).entries] == [["y*z"], ["-x"]]
    assert as_map(tot(X)) == as_map(eliminate_crossing(ex22).module)


def test_detot_refuses_crossing(e1):
    with pytest.raises(ValueError, match="crossing"):
        detot(e1)


def test_rank3_shapes():
    x, y = R.parse("x"), R.parse("y")
    z = R.zero
    joined = SemifreeDG(R, ["a", "b", "c"], [0, 1, 3], [[z, z, x * y], [z, z, y], [z, z, z]])
    assert rank3_classify(joined).shape == "rank3_joined"
    parallel = SemifreeDG(R, ["a", "b", "c"], [0, 2, 3], [[z, x, x * y], [z, z, z], [z, z, z]])
    assert rank3_classify(parallel).shape == "rank3_parallel"
    two = SemifreeDG(R, ["a", "b"], [0, 2], [[z, x], [z, z]])
    assert rank3_classify(two).shape == "rank2"
    assert rank3_classify(SemifreeDG(R, ["a"], [4])).shape == "rank1"


def test_rank3_rejects_larger_modules(e3):
    with pytest.raises(ValueError):
        rank3_classify(e3)


@given(bivariate_modules(max_rank=3))
def test_rank_three_never_has_crossing(M):
    assert not has_crossing(M)
    assert rank3_classify(M).elimination.change.is_identity()


@given(bivariate_modules(max_rank=5), seeds)
def test_partition_ignores_declaration_order(M, seed):
    perm = list(range(M.rank))
    random.Random(seed).shuffle(perm)
    N = SemifreeDG(M.ring, [M.labels[k] for k in perm], [M.degrees[k] for k in perm],
                   [[M.D[i][j] for j in perm] for i in perm])
    assert partition(N).levels == partition(M).levels


@given(bivariate_modules(max_rank=5))
def test_elimination_output_is_conjugate(M):
    res = eliminate_crossing(M)
    assert validate_dg(res.module).ok
    assert conjugation_holds(M, res.module, res.change)
    if res.success:
        assert as_map(tot(detot(res.module))) == as_map(res.module)


@given(complexes(), conventions)
def test_detot_inverts_tot_without_crossing(X, conv):
    M = tot(X, conv)
    if has_crossing(M):
        return
    assert as_map(tot(detot(M), conv)) == as_map(M)


@given(bivariate_modules(max_rank=5))
def test_tot_of_detot_is_identity(M):
    if not has_crossing(M):
        assert as_map(tot(detot(M))) == as_map(M)

"""Acceptance criteria 1-9, each printing one PASS/FAIL line.

Run under pytest (``pytest tests/test_acceptance.py -s`` shows the lines
inline; they are printed even without ``-s``) or directly as a script.
"""

import contextlib
import io
import json
import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from dgtot.cli import main  # noqa: E402
from dgtot.complex import GradedComplex  # noqa: E402
from dgtot.crossing import conjugation_holds, detot, eliminate_crossing, has_crossing  # noqa: E402
from dgtot.dg import SemifreeDG  # noqa: E402
from dgtot.obstruction import tot_image_obstruction  # noqa: E402
from dgtot.parsing import parse, serialize  # noqa: E402
from dgtot.suites import (  # noqa: E402
    corollary_suite,
    embed_suite,
    functorial_suite,
    oracle_suite,
    soundness_suite,
)
from dgtot.totaling import tot  # noqa: E402
from dgtot.univariate import embed  # noqa: E402

FIXTURES = Path(__file__).parent / "fixtures"
_capsys = None


@pytest.fixture(autouse=True)
def _grab_capsys(capsys):
    global _capsys
    _capsys = capsys
    yield
    _capsys = None


def _say(line: str) -> None:
    if _capsys is not None:
        with _capsys.disabled():
            print(line)
    else:
        print(line)


@contextlib.contextmanager
def criterion(number: int, title: str, limit: float):
    t0 = time.perf_counter()
    try:
        yield
        elapsed = time.perf_counter() - t0
        assert elapsed < limit, f"took {elapsed:.1f} s, limit {limit} s"
    except BaseException as e:
        _say(f"criterion {number} FAIL  {title} ({time.perf_counter() - t0:.2f} s): {e}")
        raise
    _say(f"criterion {number} PASS  {title} ({elapsed:.2f} s)")


def cli(*argv):
    out = io.StringIO()
    code = main([str(a) for a in argv], stdout=out, stderr=io.StringIO())
    return code, json.loads(out.getvalue())


def module(name: str) -> SemifreeDG:
    return parse((FIXTURES / f"{name}.dg").read_text()).first(SemifreeDG)


def complex_(name: str) -> GradedComplex:
    return parse((FIXTURES / f"{name}.dg").read_text()).first(GradedComplex)


def test_criterion_1_rank_betti_obstruction():
    with criterion(1, "E1 is not in the image of Tot", 10):
        code, rep = cli("obstruct", FIXTURES / "e1.dg", "--window", "0..20", "--field", "F101")
        assert code == 0
        assert rep["rank"] == 4
        assert rep["betti_numbers"] == [2, 3, 1]
        assert rep["twists"] == [[0, 5], [2, 3, 7], [4]]
        assert rep["betti_sum"] == 6
        assert rep["indecomposable"] == "YES"
        assert rep["verdict"] == "NOT_IN_TOT_IMAGE"


def test_criterion_2_crossing_example(tmp_path):
    with criterion(2, "crossing detected and eliminated", 1):
        code, rep = cli("crossing", FIXTURES / "crossing.dg")
        assert code == 0
        assert rep["partition"]["levels"] == [["e1"], ["e2", "e3"]]
        assert rep["partition"]["unassigned"] == ["e4"]
        assert rep["partition"]["has_crossing"] is True
        out = tmp_path / "rebased.dg"
        code, rep = cli("crossing", FIXTURES / "crossing.dg", "--eliminate", "-o", out)
        assert code == 0 and rep["elimination"]["success"] is True
        levels = rep["elimination"]["partition"]["levels"]
        assert len(levels) == 3 and levels[2] and sorted(sum(levels, [])) == ["e1", "e2", "e3", "e4"]
        M, N = module("crossing"), parse(out.read_text()).first(SemifreeDG)
        assert not has_crossing(N)
        assert conjugation_holds(M, N, eliminate_crossing(M).change)


def test_criterion_3_detot_round_trip(tmp_path):
    with criterion(3, "detot then tot returns the rebased module", 1):
        rebased = tmp_path / "rebased.dg"
        rebased.write_text(serialize(eliminate_crossing(module("crossing")).module))
        cx, back = tmp_path / "x.dg", tmp_path / "back.dg"
        code, rep = cli("detot", rebased, "-o", cx)
        assert code == 0
        X = detot(parse(rebased.read_text()).first(SemifreeDG))
        assert X.support == [0, 1, 2]
        assert [[str(p) for p in row] for row in X.diff(1).entries] == [["x", "y*z"]]
        assert [[str(p) for p in row] for row in X.diff(2).entries] == [["y*z"], ["-x"]]
        code, _ = cli("tot", cx, "-o", back)
        assert code == 0
        assert back.read_text() == rebased.read_text()


def test_criterion_4_one_variable_fixture():
    with criterion(4, "E3 resolution and explicit quasi-isomorphism", 5):
        code, rep = cli("resolve", FIXTURES / "e3.dg")
        assert code == 0
        dec = rep["decomposition"]
        assert {(t["r"], t["c"]) for t in dec["torsion"]} == {(2, 7), (4, 8)}
        assert [f["r"] for f in dec["free"]] == [0]
        w = embed(module("e3"), window=(0, 20))
        assert w.ok and w.window == (0, 20)
        images = w.summand_maps()[0]["images"]
        assert images == {"sigma^{2}1": "x^2*e1 + e2", "sigma^{8}1": "e4"}


def test_criterion_5_one_variable_random():
    with criterion(5, "embed certifies 100 random modules over Q[x]", 60):
        rep = embed_suite(seed=0, count=100)
        assert rep.passed, rep.failures[:3]


def test_criterion_6_functorial_suites():
    with criterion(6, "Tot is semifree, tensor and Tor compatible, preserves quasi-isos", 120):
        rep = functorial_suite(seed=0, count=50)
        assert rep.passed, rep.failures[:3]


def test_criterion_7_rank_three_corollary():
    with criterion(7, "crossing elimination on 100 rank <= 3 modules", 60):
        rep = corollary_suite(seed=0, count=100)
        assert rep.passed, rep.failures[:3]


def test_criterion_8_soundness():
    with criterion(8, "nothing in the image of Tot is flagged", 120):
        rebased = eliminate_crossing(module("crossing")).module
        in_image = [rebased, tot(complex_("koszul")), tot(complex_("shifted"))]
        for M in in_image:
            detot(M)
        assert embed(module("e3")).ok
        for M in in_image + [module("e3")]:
            assert tot_image_obstruction(M).verdict != "NOT_IN_TOT_IMAGE"
        rep = soundness_suite(seed=0, count=100)
        assert rep.passed, rep.failures[:3]


def test_criterion_9_oracle_equivalence():
    with criterion(9, "degreewise Betti numbers match diagonalization", 60):
        rep = oracle_suite(seed=0, count=50)
        assert rep.passed, rep.failures[:3]


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))

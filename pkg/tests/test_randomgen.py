import random

from hypothesis import given

from dgtot.complex import validate_complex
from dgtot.crossing import has_crossing
from dgtot.dg import validate_dg
from dgtot.parsing import parse, serialize
from dgtot.randomgen import random_complex, random_presentation, random_semifree
from dgtot.suites import DEFAULT_COUNTS, run_suite
from strategies import RINGS, seeds


@given(seeds)
def test_generators_are_reproducible(seed):
    R = RINGS["Q[x,y]"]
    a = random_semifree(R, random.Random(seed))
    b = random_semifree(R, random.Random(seed))
    assert serialize(a) == serialize(b)
    assert serialize(random_complex(R, random.Random(seed))) == \
        serialize(random_complex(R, random.Random(seed)))


@given(seeds)
def test_generated_objects_respect_bounds(seed):
    rng = random.Random(seed)
    M = random_semifree(RINGS["Q[x]"], rng, max_rank=5, max_degree=10, max_entry=8)
    assert 1 <= M.rank <= 5 and max(M.degrees) <= 10
    assert M.max_entry_degree() <= 8
    X = random_complex(RINGS["Q[x,y]"], rng)
    assert len(X.support) <= 3 and all(X.modules[i].rank <= 3 for i in X.support)
    P = random_presentation(RINGS["Q[x]"], rng)
    assert P.homogeneity_violation() is None


@given(seeds)
def test_generated_objects_are_valid_over_a_prime_field(seed):
    R = RINGS["F7[x,y,z]"]
    rng = random.Random(seed)
    M = random_semifree(R, rng, max_rank=4, max_degree=5, max_entry=3)
    assert validate_dg(M).ok
    assert validate_complex(random_complex(R, rng)) is None
    assert serialize(parse(serialize(M)).objects[0]) == serialize(M)


def test_crossing_occurs_in_random_modules():
    R = RINGS["Q[x,y]"]
    hits = sum(has_crossing(random_semifree(R, random.Random(k), max_degree=6, max_entry=3))
               for k in range(200))
    assert hits > 0


def test_suites_are_deterministic_and_pass():
    for name in DEFAULT_COUNTS:
        a = run_suite(name, seed=7, count=4)
        b = run_suite(name, seed=7, count=4)
        assert a.passed and a.stats == b.stats and a.failures == b.failures

from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from dgtot.complex import GradedComplex
from dgtot.dg import SemifreeDG
from dgtot.parsing import parse

FIXTURES = Path(__file__).parent / "fixtures"

settings.register_profile(
    "default", max_examples=25, deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


def load_text(name: str) -> str:
    return (FIXTURES / f"{name}.dg").read_text()


def load_module(name: str, convention: str = "even", field=None) -> SemifreeDG:
    return parse(load_text(name), convention, field).first(SemifreeDG)


def load_complex(name: str) -> GradedComplex:
    return parse(load_text(name)).first(GradedComplex)


@pytest.fixture
def e1():
    return load_module("e1")


@pytest.fixture
def e3():
    return load_module("e3")


@pytest.fixture
def ex22():
    return load_module("crossing")

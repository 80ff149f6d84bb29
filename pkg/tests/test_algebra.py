from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from dgtot.algebra import QQ, Field, PolyRing, koszul_twist, sign
from strategies import RINGS, polys

R = PolyRing(QQ, ["x", "y"])


def test_prime_field_arithmetic():
    F = Field(101)
    assert F.inv(2) == 51
    assert F.mul(F.inv(37), 37) == 1
    assert F(Fraction(1, 2)) == 51
    assert F.name == "F101"
    with pytest.raises(ValueError):
        Field(100)
    with pytest.raises(ZeroDivisionError):
        F.inv(0)


def test_rational_inverse_stays_exact():
    assert QQ.inv(3) == Fraction(1, 3)
    assert isinstance(QQ.inv(3), Fraction)


def test_monomials_are_lex_descending():
    assert R.monomials(2) == ((2, 0), (1, 1), (0, 2))
    assert R.monomials(-1) == ()
    assert R.piece_dim(3) == 4


def test_parse_and_format_round_trip():
    p = R.parse("3/2*x*y - x^2 + y^2")
    assert str(p) == "-x^2 + 3/2*x*y + y^2"
    assert R.parse(str(p)) == p
    assert p.is_homogeneous(2)
    assert not (p + R.one).is_homogeneous()


def test_koszul_twist_signs_odd_components():
    p = R.parse("x + y^2")
    assert koszul_twist(p) == R.parse("-x + y^2")
    assert sign(3) == -1 and sign(4) == 1


@given(st.sampled_from(list(RINGS)), st.data())
def test_ring_axioms(name, data):
    ring = RINGS[name]
    a, b, c = (data.draw(polys(ring)) for _ in range(3))
    assert a + b == b + a
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == ring.zero
    assert a * ring.one == a


@given(polys())
def test_homogeneous_components_sum_back(p):
    comps = p.homogeneous_components()
    total = p.ring.zero
    for d, q in comps.items():
        assert q.is_homogeneous(d)
        total = total + q
    assert total == p


@given(polys())
def test_koszul_twist_is_an_involution(p):
    assert koszul_twist(koszul_twist(p)) == p


@given(polys(), polys())
def test_koszul_twist_is_multiplicative(p, q):
    if p.ring == q.ring:
        assert koszul_twist(p * q) == koszul_twist(p) * koszul_twist(q)

from fractions import Fraction

from hypothesis import given, strategies as st

from dgtot.algebra import QQ, Field
from dgtot.linalg import Echelon, Mat
from oracles import mat_rank

FIELDS = [QQ, Field(5), Field(101)]


@st.composite
def matrices(draw):
    field = draw(st.sampled_from(FIELDS))
    nr = draw(st.integers(0, 6))
    nc = draw(st.integers(0, 6))
    rows = [[draw(st.integers(-2, 2)) for _ in range(nc)] for _ in range(nr)]
    return Mat.from_dense(field, rows) if nr else Mat(field, 0, nc)


def test_small_rank_and_kernel():
    m = Mat.from_dense(QQ, [[1, 2, 3], [2, 4, 6]])
    assert m.rank() == 1
    ker = m.kernel()
    assert len(ker) == 2
    assert all(not m.apply(v) for v in ker)


def test_solve_consistent_and_inconsistent():
    m = Mat.from_dense(QQ, [[1, 1], [1, -1]])
    x = m.solve({0: Fraction(3), 1: Fraction(1)})
    assert x == {0: 2, 1: 1}
    singular = Mat.from_dense(QQ, [[1, 1], [1, 1]])
    assert singular.solve({0: Fraction(1)}) is None


@given(matrices())
def test_rank_matches_sympy(m):
    assert m.rank() == mat_rank(m)


@given(matrices())
def test_rank_nullity(m):
    ker = m.kernel()
    assert m.rank() + len(ker) == m.ncols
    assert all(not m.apply(v) for v in ker)
    assert Echelon(m.field, ker).dim == len(ker)


@given(matrices())
def test_image_spans_columns(m):
    img = Echelon(m.field, m.image())
    assert img.dim == m.rank()
    assert all(img.contains(c) for c in m.cols)


@given(matrices(), st.data())
def test_solve_recovers_a_preimage(m, data):
    x = {j: m.field(data.draw(st.integers(-3, 3))) for j in range(m.ncols)}
    x = {j: v for j, v in x.items() if v}
    b = m.apply(x)
    sol = m.solve(b)
    assert sol is not None
    assert m.apply(sol) == b


@given(matrices())
def test_transpose_preserves_rank(m):
    assert m.transpose().rank() == m.rank()

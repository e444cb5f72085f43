from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pardyn.exact import (
    GaussianRational as G,
    SparseMatrix,
    SparseSpan,
    format_fraction,
    is_positive_semidefinite,
    parse_fraction,
    rank,
)

fracs = st.builds(F, st.integers(-20, 20), st.integers(1, 12))
gauss = st.builds(G, fracs, fracs)


def as_pair(z):
    return (z.real, z.imag)


@given(gauss, gauss)
def test_field_operations_match_pairs(a, b):
    (ar, ai), (br, bi) = as_pair(a), as_pair(b)
    assert as_pair(a + b) == (ar + br, ai + bi)
    assert as_pair(a * b) == (ar * br - ai * bi, ar * bi + ai * br)
    assert as_pair(a.conjugate()) == (ar, -ai)
    assert a.abs2() == ar * ar + ai * ai
    if b:
        assert (a / b) * b == a


def test_fraction_strings():
    assert format_fraction(3) == "3/1"
    assert parse_fraction("2/6") == F(1, 3)
    assert G(F(1, 2), F(-1, 3)).to_json() == ["1/2", "-1/3"]
    with pytest.raises(TypeError):
        G.coerce(1j)


def dense(draw_vals, n):
    return SparseMatrix.from_dense([[draw_vals[i * n + j] for j in range(n)] for i in range(n)])


@given(st.integers(1, 4), st.data())
def test_matrix_algebra(n, data):
    vals = data.draw(st.lists(gauss, min_size=3 * n * n, max_size=3 * n * n))
    a, b, c = (dense(vals[k * n * n:], n) for k in range(3))
    assert (a @ b) @ c == a @ (b @ c)
    assert (a @ b).H == b.H @ a.H
    assert (a @ b).trace() == (b @ a).trace()
    assert a @ SparseMatrix.identity(n) == a
    assert is_positive_semidefinite(a.H @ a)


def test_psd_rejects_indefinite():
    assert not is_positive_semidefinite(SparseMatrix.from_dense([[1, 0], [0, -1]]))
    assert not is_positive_semidefinite(SparseMatrix.from_dense([[0, 1], [1, 0]]))
    assert is_positive_semidefinite(SparseMatrix.from_dense([[1, 1], [1, 1]]))


def test_rank_and_span():
    assert rank([[1, 2], [2, 4]]) == 1
    span = SparseSpan()
    assert span.add({(0, 0): G(1)})
    assert span.add({(0, 1): G(0, 1)})
    assert not span.add({(0, 0): G(2), (0, 1): G(0, 3)})
    assert len(span) == 2

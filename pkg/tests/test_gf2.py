import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from topodec import gf2

binary = st.integers(1, 12).flatmap(
    lambda r: st.integers(1, 12).flatmap(
        lambda c: arrays(np.uint8, (r, c), elements=st.integers(0, 1))))


def test_matmul_small():
    a = np.array([[1, 1, 0], [0, 1, 1]], dtype=np.uint8)
    b = np.array([[1], [1], [1]], dtype=np.uint8)
    assert gf2.matmul(a, b).tolist() == [[0], [0]]


@given(binary)
@settings(max_examples=60, deadline=None)
def test_nullspace_is_annihilated(mat):
    basis = gf2.nullspace(mat)
    assert basis.shape[0] == mat.shape[1] - gf2.rank(mat)
    if basis.size:
        assert not gf2.matmul(mat, basis.T).any()
        assert gf2.rank(basis) == basis.shape[0]


@given(binary)
@settings(max_examples=60, deadline=None)
def test_row_sums_are_in_rowspace(mat):
    v = np.bitwise_xor.reduce(mat, axis=0)
    assert gf2.in_rowspace(mat, v)


def test_rank_identity():
    assert gf2.rank(np.eye(5, dtype=np.uint8)) == 5
    assert gf2.rank(np.zeros((3, 4), dtype=np.uint8)) == 0

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from affectfuse.fusion import ContractError, fuse


def one_hot(e):
    row = np.zeros(8)
    row[e - 1] = 1.0
    return row


def test_unanimous():
    d = fuse([one_hot(7)] * 3)
    assert d.predicted == 7
    assert d.mean_weights[6] == 1.0


def test_majority():
    d = fuse([one_hot(2), one_hot(2), one_hot(5)])
    assert d.mean_weights[1] == pytest.approx(2 / 3, abs=1e-15)
    assert d.mean_weights[4] == pytest.approx(1 / 3, abs=1e-15)
    assert d.predicted == 2


def test_tie_goes_to_lowest_id():
    d = fuse([one_hot(3), one_hot(4), np.full(8, 1 / 8)])
    assert d.mean_weights[2] == d.mean_weights[3] == 0.375
    assert d.predicted == 3
    # same tie with the rows swapped
    assert fuse([one_hot(4), np.full(8, 1 / 8), one_hot(3)]).predicted == 3


def test_contract_errors():
    with pytest.raises(ContractError, match="row 1"):
        fuse([one_hot(1), one_hot(1) * 0.9, one_hot(2)])
    with pytest.raises(ContractError):
        fuse(np.ones((3, 7)) / 7)
    bad = np.full((3, 8), 1 / 8)
    bad[0, 0] = -0.1
    with pytest.raises(ContractError):
        fuse(bad)


def simplex_rows(draw_floats):
    raw = np.abs(np.array(draw_floats, dtype=float)).reshape(3, 8) + 1e-12
    return raw / raw.sum(axis=1, keepdims=True)


rows_strategy = st.lists(st.floats(0, 1e3, allow_nan=False), min_size=24, max_size=24).map(simplex_rows)


@settings(max_examples=200, deadline=None)
@given(rows_strategy, st.permutations(range(3)))
def test_row_order_invariance(m, order):
    a = fuse(m)
    b = fuse(m[list(order)])
    assert np.array_equal(a.mean_weights, b.mean_weights)
    assert a.predicted == b.predicted


@settings(max_examples=200, deadline=None)
@given(rows_strategy)
def test_simplex_preserved(m):
    d = fuse(m)
    assert abs(d.mean_weights.sum() - 1.0) <= 1e-9
    assert np.all((d.mean_weights >= 0) & (d.mean_weights <= 1))
    assert d.predicted == int(np.flatnonzero(d.mean_weights == d.mean_weights.max())[0]) + 1


@settings(max_examples=200, deadline=None)
@given(rows_strategy, st.permutations(range(8)))
def test_permutation_equivariance(m, perm):
    perm = np.array(perm)
    a = fuse(m)
    b = fuse(m[:, perm])
    np.testing.assert_array_equal(b.mean_weights, a.mean_weights[perm])
    # the winner in permuted order is the first permuted column attaining the max
    best = np.flatnonzero(a.mean_weights[perm] == a.mean_weights.max())[0]
    assert b.predicted == best + 1
    if np.sum(a.mean_weights == a.mean_weights.max()) == 1:
        assert perm[b.predicted - 1] + 1 == a.predicted

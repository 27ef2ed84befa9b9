import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import variation_enum
from pvlab.errors import DomainError
from pvlab.variation import (
    BlockPartition,
    RealSequence,
    long_short_split,
    sup_domination_check,
    turning_points,
    variation_approx,
    variation_exact,
    variation_fast,
    variation_norm,
)

seqs = st.lists(st.floats(-100, 100, allow_nan=False), min_size=0, max_size=10)
rs = st.sampled_from([1.0, 1.5, 2.0, 2.1, 3.0, 5.0])


def _path_value(a, path, r):
    return sum(abs(a[j] - a[i]) ** r for i, j in zip(path, path[1:])) ** (1 / r)


def test_small_example():
    res = variation_exact([0, 2, 1, 3], 2)
    assert res.value == pytest.approx(3.0, abs=1e-15)
    assert _path_value([0, 2, 1, 3], res.path, 2) == pytest.approx(3.0)


def test_trivial_cases():
    assert variation_exact([], 2).value == 0.0
    assert variation_exact([5.0], 2).value == 0.0
    assert variation_exact([1.0] * 7, 3).value == 0.0
    assert variation_exact([0, 1, 0, 1], 1).value == pytest.approx(3.0)


def test_r1_is_total_variation():
    a = np.random.default_rng(0).normal(size=50)
    assert variation_exact(a, 1).value == pytest.approx(np.abs(np.diff(a)).sum(), rel=1e-13)


@settings(max_examples=300, deadline=None)
@given(seqs, rs)
def test_dp_equals_enumeration(a, r):
    expect = variation_enum(a, [r])[0]
    got = variation_exact(a, r)
    assert got.value == pytest.approx(expect, rel=1e-12, abs=1e-12)
    if got.path:
        assert _path_value(a, got.path, r) == pytest.approx(got.value, rel=1e-12)
        assert got.path == sorted(set(got.path))


@settings(max_examples=300, deadline=None)
@given(st.lists(st.integers(-3, 3), min_size=0, max_size=40), rs)
def test_fast_equals_exact(a, r):
    a = np.array(a, dtype=float)
    e, f = variation_exact(a, r), variation_fast(a, r)
    assert f.value == pytest.approx(e.value, rel=1e-12, abs=1e-12)
    if f.path:
        assert _path_value(a, f.path, r) == pytest.approx(f.value, rel=1e-12)


@settings(max_examples=100, deadline=None)
@given(seqs)
def test_nonincreasing_in_r(a):
    vals = [variation_exact(a, r).value for r in (1, 1.5, 2, 2.1, 3, 5)]
    assert all(y <= x * (1 + 1e-12) + 1e-12 for x, y in zip(vals, vals[1:]))


@settings(max_examples=100, deadline=None)
@given(seqs, rs, st.floats(-10, 10), st.floats(0.1, 10))
def test_shift_and_scale(a, r, c, s):
    a = np.array(a)
    v = variation_exact(a, r).value
    assert variation_exact(a + c, r).value == pytest.approx(v, rel=1e-9, abs=1e-9)
    assert variation_exact(s * a, r).value == pytest.approx(s * v, rel=1e-9, abs=1e-9)


def test_index_offset_in_path():
    res = variation_exact(RealSequence([0.0, 2.0, 1.0, 3.0], index_offset=10), 1)
    assert res.path[0] >= 10 and res.path[-1] <= 13


def test_turning_points():
    assert turning_points(np.array([0, 1, 2, 1, 1, 0, 3.0])).tolist() == [0, 2, 5, 6]
    assert turning_points(np.array([2.0, 2.0, 2.0])).tolist() == [0]


def test_approx_is_lower_bound_and_flagged():
    rng = np.random.default_rng(1)
    a = np.cumsum(rng.normal(size=3000))
    exact = variation_fast(a, 2.5).value
    ap = variation_approx(a, 2.5, max_points=200)
    assert ap.approximate
    assert ap.value <= exact * (1 + 1e-12)
    assert ap.value >= 0.5 * exact
    full = variation_approx(a, 2.5)
    assert not full.approximate and full.value == pytest.approx(exact, rel=1e-12)


def test_norm_and_sup_domination():
    a = [3.0, -1.0, 4.0, 1.0, -5.0]
    assert variation_norm(a, 2) == pytest.approx(5.0 + variation_exact(a, 2).value)
    for n0 in range(5):
        lhs, rhs = sup_domination_check(a, 2, n0)
        assert lhs <= rhs + 1e-12
    with pytest.raises(DomainError):
        sup_domination_check(a, 2, 9)


def test_validation():
    with pytest.raises(DomainError):
        variation_exact([0, 1], 0.5)
    with pytest.raises(DomainError):
        variation_exact([0, 1], math.inf)
    with pytest.raises(DomainError):
        RealSequence([0.0, math.nan])
    with pytest.raises(DomainError):
        RealSequence(np.zeros((2, 2)))


def test_block_partition():
    expect = sorted({math.floor(2 ** math.sqrt(k)) for k in range(200)} & set(range(1, 65)))
    assert BlockPartition(0.5).upto(64) == expect
    assert expect[:8] == [1, 2, 3, 4, 5, 6, 7, 8]
    assert BlockPartition(0.5, boundaries=[10, 3, 3]).upto(8) == [3]
    with pytest.raises(DomainError):
        BlockPartition(1.0)


def test_split_with_no_boundaries_is_all_short():
    a = np.random.default_rng(2).normal(size=30)
    vl, vs = long_short_split(a, 2, BlockPartition(boundaries=[]))
    assert vl == 0.0 and vs == pytest.approx(variation_exact(a, 2).value)


@settings(max_examples=150, deadline=None)
@given(st.lists(st.floats(-10, 10, allow_nan=False), min_size=1, max_size=70), st.sampled_from([1.0, 2.1, 3.0]))
def test_split_inequality(a, r):
    # V_r <= 2^{1/r} V_r^S + V_r^L <= 3 (V_r^S + V_r^L)
    v = variation_fast(a, r).value
    vl, vs = long_short_split(a, r, BlockPartition(0.5))
    assert v <= 2 ** (1 / r) * vs + vl + 1e-9 * (1 + v)

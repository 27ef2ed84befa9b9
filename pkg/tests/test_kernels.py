import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pvlab.circle import prime_exponential_sum
from pvlab.errors import DomainError, RangeError, SizeError
from pvlab.kernels import (
    FiniteSignal,
    build_kernel,
    convolve,
    kernel_l1_difference,
    kernel_l1_difference_direct,
    trajectory,
    trajectory_batch,
)


def test_avg_kernel(small_table):
    k = build_kernel(small_table, "avg", 10)
    assert k.sites.tolist() == [2, 3, 5, 7]
    assert np.allclose(k.weights, np.log([2, 3, 5, 7]) / 10)
    assert k.mass() == pytest.approx(small_table.theta(10) / 10, rel=1e-15)
    assert (k.weights > 0).all()


def test_hilbert_kernel_is_odd(small_table):
    k = build_kernel(small_table, "hilbert", 1000)
    w = dict(k.entries)
    assert all(w[-s] == -v for s, v in w.items())
    assert k.mass() == 0.0
    assert w[7] == pytest.approx(math.log(7) / 7)


def test_unweighted_mass(small_table):
    for N in (2, 10, 1000, 20_000):
        k = build_kernel(small_table, "avg_unweighted", N)
        assert abs(k.mass() - 1.0) <= small_table.pi(N) * 2**-53


def test_kernel_errors(small_table):
    with pytest.raises(DomainError):
        build_kernel(small_table, "nope", 10)
    with pytest.raises(DomainError):
        build_kernel(small_table, "avg", 1)
    with pytest.raises(RangeError):
        build_kernel(small_table, "avg", 10**7)


def test_kernel_csv(small_table):
    text = build_kernel(small_table, "avg", 10).to_csv()
    lines = text.splitlines()
    assert lines[0] == "# label=avg,N=10" and lines[1] == "site,weight"
    assert len(lines) == 6


def test_delta_convolution_reproduces_kernel(small_table):
    for label in ("avg", "hilbert", "avg_unweighted"):
        k = build_kernel(small_table, label, 50)
        g = convolve(k, FiniteSignal.delta(0))
        assert np.allclose(g(k.sites), k.weights, rtol=0, atol=0)
        assert g.lo == k.sites.min() and g.hi == k.sites.max()


@settings(max_examples=60, deadline=None)
@given(st.integers(-20, 20), st.lists(st.floats(-5, 5, allow_nan=False), min_size=1, max_size=15), st.sampled_from(["avg", "hilbert"]))
def test_convolution_brute_force(lo, vals, label):
    from pvlab.numtheory import sieve

    k = build_kernel(sieve(60), label, 60)
    f = FiniteSignal(lo, np.array(vals))
    g = convolve(k, f)
    for x in range(g.lo - 3, g.hi + 4):
        expect = math.fsum(w * float(f(np.array([x - s]))[0]) for s, w in k.entries)
        assert float(g(np.array([x]))[0]) == pytest.approx(expect, abs=1e-12)


def test_convolution_size_guard(small_table):
    k = build_kernel(small_table, "avg", 10)
    with pytest.raises(SizeError):
        convolve(k, FiniteSignal(2**62, np.zeros(3)))


def test_trajectory_matches_batch(small_table):
    rng = np.random.default_rng(0)
    f = FiniteSignal(-300, rng.normal(size=601))
    Ns = list(range(2, 400, 7))
    for label in ("avg", "hilbert", "avg_unweighted"):
        for x in (0, 5, -17):
            inc = trajectory(small_table, label, f, Ns, x)
            ref = trajectory_batch(small_table, label, f, Ns, x)
            assert np.allclose(inc.values, ref, rtol=1e-12, atol=1e-14)
            assert inc.index_offset == 2


def test_delta_trajectory_at_origin_is_zero(small_table):
    t = trajectory(small_table, "avg", FiniteSignal.delta(0), range(2, 2000), 0)
    assert not t.values.any()


def test_delta_trajectory_off_origin(small_table):
    # (K_N * δ_0)(x) = K_N(x): zero until N reaches the prime x, then log x / N
    t = trajectory(small_table, "avg", FiniteSignal.delta(0), range(2, 50), 7)
    vals = dict(zip(range(2, 50), t.values))
    assert vals[6] == 0.0 and vals[7] == pytest.approx(math.log(7) / 7) and vals[49] == pytest.approx(math.log(7) / 49)


def test_trajectory_validation(small_table):
    with pytest.raises(DomainError):
        trajectory(small_table, "avg", FiniteSignal.delta(0), [5, 3], 0)
    with pytest.raises(RangeError):
        trajectory(small_table, "avg", FiniteSignal.delta(0), [2, 10**7], 0)


def test_l1_difference_closed_form(small_table):
    for label in ("avg", "hilbert", "avg_unweighted"):
        for N in list(range(3, 200)) + [997, 1000, 7919]:
            assert kernel_l1_difference(small_table, label, N) == pytest.approx(
                kernel_l1_difference_direct(small_table, label, N), rel=1e-12, abs=1e-15
            )


def test_l1_difference_examples(small_table):
    # composite N: weights only rescale from 1/(N-1) to 1/N
    assert kernel_l1_difference(small_table, "avg", 100) == pytest.approx(small_table.theta(99) * (1 / 99 - 1 / 100))
    assert kernel_l1_difference(small_table, "hilbert", 100) == 0.0
    assert kernel_l1_difference(small_table, "hilbert", 101) == pytest.approx(2 * math.log(101) / 101)


def test_kernel_multiplier_matches_prime_sum(small_table):
    k = build_kernel(small_table, "avg", 500)
    for xi in (0.0, 0.1, 0.37, 0.5):
        assert complex(k.multiplier(xi)[0]) == pytest.approx(prime_exponential_sum(small_table, xi, 0, 500, "avg"), abs=1e-12)
    h = build_kernel(small_table, "hilbert", 500)
    assert complex(h.multiplier(0.21)[0]) == pytest.approx(prime_exponential_sum(small_table, 0.21, 0, 500, "hilbert"), abs=1e-12)

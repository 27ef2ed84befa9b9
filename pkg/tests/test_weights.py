import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import random_lambda, variation_enum
from pvlab.errors import DomainError, PreconditionError
from pvlab.variation import variation_exact
from pvlab.weights import (
    LambdaMatrix,
    WeightScheme,
    build_lambda,
    compensated_cumsum,
    lemma51_check,
    mixture_quadrature,
    pnt_deviation,
    pnt_normalization_check,
    prime_scheme,
    prop52_check,
    sum1_identity,
)


def _direct_averages(w, wp, a):
    """A_N and A′_N straight from the definition, one N at a time."""
    A = [math.fsum(w[i] * a[i] for i in range(N)) / math.fsum(w[:N]) for N in range(1, len(w) + 1)]
    Ap = [math.fsum(wp[i] * a[i] for i in range(N)) / math.fsum(wp[:N]) for N in range(1, len(w) + 1)]
    return np.array(A), np.array(Ap)


def _scheme(rng, n, case):
    w = rng.uniform(0.1, 2.0, n)
    ratio = np.sort(rng.uniform(0.1, 3.0, n))
    if case == "decreasing":
        ratio = ratio[::-1]
    return WeightScheme.from_weights(w, ratio * w)


def test_compensated_cumsum():
    x = [1e16, 1.0, -1e16, 1.0]
    assert compensated_cumsum(x)[-1] == 2.0


def test_equal_weights_give_identity():
    w = np.arange(1, 9, dtype=float)
    s = WeightScheme.from_weights(w, w)
    assert s.case() == "decreasing"
    b = build_lambda(s, "decreasing")
    assert np.allclose(b.lam.lam, np.eye(8), atol=1e-15)
    a = np.random.default_rng(0).normal(size=8)
    chk = prop52_check(s, a, 2)
    assert chk.lhs == pytest.approx(chk.rhs, rel=1e-14) and chk.Cprime == 1.0


def test_identity_mixture_and_constant_sequence():
    lam = LambdaMatrix(np.eye(6), 1.0)
    a = np.array([0.0, 3, -1, 2, 2, 5])
    lhs, rhs = lemma51_check(lam, a, 2)
    assert lhs == pytest.approx(rhs, rel=1e-14)
    assert lemma51_check(lam, np.full(6, 4.0), 3)[0] == 0.0


def test_reconstruction_matches_direct_partial_sums():
    rng = np.random.default_rng(5)
    for case in ("decreasing", "increasing"):
        for _ in range(50):
            n = int(rng.integers(1, 20))
            s = _scheme(rng, n, case)
            a = rng.normal(size=n)
            A, Ap = _direct_averages(s.w, s.w_prime, a)
            b = build_lambda(s, case)
            assert np.allclose(b.lam.apply(A), Ap, rtol=1e-12, atol=1e-12)
            if case == "increasing":
                assert (b.tilde.lam >= -1e-15).all()
                assert np.allclose(2 * b.C * A - b.tilde.apply(A), Ap, rtol=1e-12, atol=1e-12)


def test_harmonic_example():
    # w′ ≡ 1, w_n = 1/n: ratio n increases, C = max_N H_N·N / N = H_N at the largest N... checked directly
    n = 20
    w = 1.0 / np.arange(1, n + 1)
    s = WeightScheme.from_weights(w, np.ones(n))
    assert s.case() == "increasing"
    H = np.cumsum(w)
    C = max(H[N - 1] * 1.0 / (N * w[N - 1]) for N in range(1, n + 1))
    assert s.C() == pytest.approx(C, rel=1e-14)
    b = build_lambda(s, "increasing")
    assert b.tilde.Lambda == pytest.approx(2 * C - 1)


def test_log_example_sum1():
    n = 15
    w = np.log(np.arange(2, n + 2, dtype=float))
    s = WeightScheme.from_weights(w, np.ones(n))
    assert s.case() == "decreasing"
    P = build_lambda(s, "decreasing").lam.prefix()
    for k in range(1, n + 1):
        for N in range(1, n + 1):
            assert abs(P[N - 1, k - 1] - sum1_identity(s, N, k)) < 1e-12


def test_invariants_hold_up_to_64():
    rng = np.random.default_rng(11)
    for case in ("decreasing", "increasing"):
        for n in (1, 2, 17, 64):
            b = build_lambda(_scheme(rng, n, case), case)
            # in the increasing case λ has negative entries; λ̃ carries the invariants
            (b.lam if case == "decreasing" else b.tilde).validate()


def test_validate_names_failing_pair():
    lam = np.eye(3)
    lam[0, 2] = -0.5
    with pytest.raises(PreconditionError, match=r"N=1, k=3"):
        LambdaMatrix(lam, 1.0).validate()
    bad = np.array([[0.2, 0.9], [0.8, 0.1]])  # prefix 0.2 -> 0.9 increases in k
    with pytest.raises(PreconditionError, match=r"N=1, k=2"):
        LambdaMatrix(bad, 1.0).validate()
    with pytest.raises(PreconditionError, match=r"k=2"):
        LambdaMatrix(np.array([[1.0, 0.5], [0.0, 0.2]]), 1.0).validate()


def test_case_checks():
    s = WeightScheme.from_weights([1.0, 1.0, 1.0], [1.0, 2.0, 1.0])
    assert s.case() is None
    with pytest.raises(PreconditionError):
        build_lambda(s, "decreasing")
    with pytest.raises(PreconditionError):
        prop52_check(s, [1.0, 2.0, 3.0], 2)
    with pytest.raises(DomainError):
        build_lambda(s, "sideways")


def test_zero_weights_restrict_to_support():
    w = np.array([0.0, 2.0, 0.0, 1.0, 3.0])
    wp = np.array([0.0, 1.0, 0.0, 1.0, 1.0])
    s = WeightScheme.from_weights(w, wp)
    assert s.index_map.tolist() == [2, 4, 5]
    with pytest.raises(DomainError):
        WeightScheme.from_weights([1.0, 0.0], [1.0, 1.0])
    with pytest.raises(DomainError):
        WeightScheme.from_weights([1.0, 1.0], [0.0, 1.0])
    with pytest.raises(DomainError):
        WeightScheme.from_weights([1.0, -1.0], [1.0, 1.0])
    with pytest.raises(DomainError):
        WeightScheme.from_weights([0.0, 0.0], [0.0, 0.0])


def test_support_restriction_keeps_the_variation():
    # averages are constant across indices outside the support, so V_r is unchanged
    rng = np.random.default_rng(2)
    w = rng.uniform(0.5, 1.5, 30) * (rng.uniform(size=30) < 0.6)
    w[0] = 1.0
    wp = (w > 0) * 1.0
    a = rng.normal(size=30)
    s = WeightScheme.from_weights(w, wp)
    A, _ = s.averages(a)
    full = [math.fsum(w[:N] * a[:N]) / math.fsum(w[:N]) for N in range(1, 31)]
    assert np.allclose(A, np.array(full)[s.index_map - 1], rtol=1e-13)
    assert variation_exact(A, 2).value == pytest.approx(variation_exact(np.array(full), 2).value, rel=1e-12)


def test_quadrature_representation():
    rng = np.random.default_rng(4)
    for _ in range(20):
        n, k = 8, 6
        Lam = float(rng.uniform(0.5, 2))
        lam = LambdaMatrix(random_lambda(rng, n, k, Lam), Lam)
        lam.validate()
        a = rng.normal(size=n)
        for kk in range(1, k + 1):
            samples = 1 << 16
            direct, quadv = mixture_quadrature(lam, a, kk, samples)
            # each of the n breakpoints can misplace at most one cell
            assert abs(direct - quadv) <= n * np.abs(a).max() * Lam / samples + 1e-12


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([1.0, 2.0, 3.0]))
def test_mixture_bound_against_enumeration(seed, r):
    rng = np.random.default_rng(seed)
    n, k = int(rng.integers(1, 11)), int(rng.integers(1, 11))
    Lam = float(rng.uniform(0.1, 3))
    lam = LambdaMatrix(random_lambda(rng, n, k, Lam), Lam)
    a = rng.integers(-3, 4, size=n).astype(float)
    lhs, rhs = lemma51_check(lam, a, r)
    b = lam.apply(a)
    assert lhs == pytest.approx(variation_enum(b, [r])[0], rel=1e-12, abs=1e-12)
    assert lhs <= rhs * (1 + 1e-10) + 1e-12


def test_prime_scheme_transfer(small_table):
    s = prime_scheme(small_table, 1000)
    assert s.index_map.tolist() == small_table.primes_upto(1000).tolist()
    assert s.case() == "decreasing"
    a = np.zeros(1000)
    a[996] = 1.0  # f = δ_0 seen from x = 997
    chk = prop52_check(s, a, 2)
    assert chk.holds and chk.Cprime == 1.0
    rng = np.random.default_rng(0)
    for r in (2.1, 3.0):
        chk = prop52_check(s, rng.normal(size=1000), r, exact=True)
        assert chk.holds


def test_lambda_csv():
    text = LambdaMatrix(np.array([[1.0, 0.25], [0.0, 0.75]]), 1.0).to_csv()
    assert text.splitlines() == ["n,k,value", "1,1,1", "1,2,0.25", "2,2,0.75"]


def test_pnt(table):
    assert pnt_deviation(table, 10**6) < 0.01
    assert pnt_deviation(table, 10**6) < pnt_deviation(table, 10**2)
    assert pnt_normalization_check(table, 10**6, 0.0) == pytest.approx(pnt_deviation(table, 10**6))
    assert table.theta(2) / 2 == pytest.approx(0.3466, abs=1e-4)
    with pytest.raises(DomainError):
        pnt_normalization_check(table, 1, 1.0)

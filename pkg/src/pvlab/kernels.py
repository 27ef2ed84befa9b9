"""Prime kernels on ℤ and their convolution operators.

Three families, truncated at N:

* ``avg``:            weight log(p)/N at each prime p <= N
* ``hilbert``:        weight log|p|/p at ±p for primes p <= N (odd)
* ``avg_unweighted``: weight 1/π(N) at each prime p <= N
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from pvlab.errors import DomainError, RangeError, SizeError
from pvlab.numtheory import PrimeTable
from pvlab.variation import RealSequence

LABELS = ("avg", "hilbert", "avg_unweighted")

# output windows longer than this are refused rather than allocated
MAX_WINDOW = 1 << 28


def _check_label(label: str) -> None:
    if label not in LABELS:
        raise DomainError(f"unknown kernel family {label!r}; expected one of {LABELS}")


@dataclass(frozen=True)
class SparseKernel:
    sites: np.ndarray
    weights: np.ndarray
    label: str
    N: int

    @property
    def entries(self) -> list[tuple[int, float]]:
        return list(zip(self.sites.tolist(), self.weights.tolist()))

    def mass(self) -> float:
        return math.fsum(self.weights.tolist())

    def l1(self) -> float:
        return math.fsum(np.abs(self.weights).tolist())

    def multiplier(self, xi) -> np.ndarray:
        """m(ξ) = Σ w e(ξ·site) at float frequencies."""
        xi = np.atleast_1d(np.asarray(xi, dtype=np.float64))
        phase = np.exp(2j * np.pi * np.outer(xi, self.sites))
        return phase @ self.weights

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# label={self.label},N={self.N}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["site", "weight"])
        for s, x in self.entries:
            w.writerow([s, repr(float(x))])
        return buf.getvalue()


def build_kernel(table: PrimeTable, label: str, N: int) -> SparseKernel:
    _check_label(label)
    if N < 2:
        raise DomainError(f"N must be >= 2, got {N}")
    if N > table.n_max:
        raise RangeError(f"N={N} exceeds sieve limit {table.n_max}")
    k = table.pi(N)
    p = table.primes[:k]
    logs = table.log_primes[:k]
    if label == "avg":
        return SparseKernel(p.copy(), logs / N, label, N)
    if label == "avg_unweighted":
        return SparseKernel(p.copy(), np.full(k, 1.0 / k), label, N)
    w = logs / p
    sites = np.concatenate((-p[::-1], p))
    weights = np.concatenate((-w[::-1], w))
    return SparseKernel(sites, weights, label, N)


@dataclass
class FiniteSignal:
    """Function on ℤ equal to ``values`` on [lo, lo + len - 1] and zero elsewhere."""

    lo: int
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 1:
            raise DomainError("signal values must be one-dimensional")
        if not np.all(np.isfinite(self.values)):
            raise DomainError("signal contains NaN or infinite entries")

    @property
    def hi(self) -> int:
        return self.lo + len(self.values) - 1

    @classmethod
    def delta(cls, at: int = 0) -> "FiniteSignal":
        return cls(at, np.ones(1))

    def __call__(self, x):
        x = np.asarray(x)
        pos = x - self.lo
        ok = (pos >= 0) & (pos < len(self.values))
        out = np.zeros(x.shape)
        out[ok] = self.values[pos[ok]]
        return out

    def l1(self) -> float:
        return math.fsum(np.abs(self.values).tolist())


def convolve(k: SparseKernel, f: FiniteSignal) -> FiniteSignal:
    """(k * f)(x) = Σ w f(x - site), on the window [lo + min site, hi + max site]."""
    if len(k.sites) == 0 or len(f.values) == 0:
        return FiniteSignal(f.lo, np.zeros(0))
    smin, smax = int(k.sites.min()), int(k.sites.max())
    lo = f.lo + smin
    length = (f.hi + smax) - lo + 1
    if length > MAX_WINDOW or abs(lo) > 2**62 or abs(f.hi + smax) > 2**62:
        raise SizeError(f"convolution window of length {length} is too large")
    out = np.zeros(length)
    n = len(f.values)
    # loop over the shorter axis, vectorize the longer one
    if len(k.sites) <= n:
        for s, w in zip(k.sites.tolist(), k.weights.tolist()):
            off = s - smin
            out[off : off + n] += w * f.values
    else:
        for i, v in enumerate(f.values.tolist()):
            if v:
                out[k.sites - smin + i] += k.weights * v
    return FiniteSignal(lo, out)


class _Neumaier:
    __slots__ = ("s", "c")

    def __init__(self):
        self.s = 0.0
        self.c = 0.0

    def add(self, x: float) -> None:
        t = self.s + x
        if abs(self.s) >= abs(x):
            self.c += (self.s - t) + x
        else:
            self.c += (x - t) + self.s
        self.s = t

    @property
    def value(self) -> float:
        return self.s + self.c


def trajectory(table: PrimeTable, label: str, f: FiniteSignal, Ns, x: int) -> RealSequence:
    """The sequence N ↦ (K_N * f)(x), updated incrementally as primes enter."""
    _check_label(label)
    Ns = [int(n) for n in Ns]
    if any(b <= a for a, b in zip(Ns, Ns[1:])):
        raise DomainError("Ns must be strictly ascending")
    if Ns and (Ns[0] < 2 or Ns[-1] > table.n_max):
        raise RangeError(f"Ns must lie in [2, {table.n_max}]")
    acc = _Neumaier()
    k = 0
    out = np.empty(len(Ns))
    primes = table.primes
    logs = table.log_primes
    for idx, N in enumerate(Ns):
        k_new = table.pi(N)
        if k_new > k:
            p = primes[k:k_new]
            if label == "avg":
                terms = logs[k:k_new] * f(x - p)
            elif label == "avg_unweighted":
                terms = f(x - p)
            else:
                terms = logs[k:k_new] / p * (f(x - p) - f(x + p))
            for t in terms[terms != 0].tolist():
                acc.add(t)
            k = k_new
        if label == "avg":
            out[idx] = acc.value / N
        elif label == "avg_unweighted":
            out[idx] = acc.value / k if k else 0.0
        else:
            out[idx] = acc.value
    return RealSequence(out, index_offset=Ns[0] if Ns else 0)


def trajectory_batch(table: PrimeTable, label: str, f: FiniteSignal, Ns, x: int) -> np.ndarray:
    """Reference path: rebuild K_N and convolve for every N."""
    out = []
    for N in Ns:
        g = convolve(build_kernel(table, label, N), f)
        out.append(float(g(np.array([x]))[0]))
    return np.array(out)


def kernel_l1_difference(table: PrimeTable, label: str, N: int) -> float:
    """‖K_N - K_{N-1}‖_ℓ¹ in closed form."""
    _check_label(label)
    if N < 3:
        raise DomainError(f"N must be >= 3, got {N}")
    if N > table.n_max:
        raise RangeError(f"N={N} exceeds sieve limit {table.n_max}")
    new_prime = bool(table.is_prime[N])
    if label == "avg":
        # old sites only rescale from 1/(N-1) to 1/N
        diff = table.theta(N - 1) / (N * (N - 1))
        return diff + (math.log(N) / N if new_prime else 0.0)
    if label == "hilbert":
        return 2.0 * math.log(N) / N if new_prime else 0.0
    if not new_prime:
        return 0.0
    return 2.0 / table.pi(N)


def kernel_l1_difference_direct(table: PrimeTable, label: str, N: int) -> float:
    """Brute-force ‖K_N - K_{N-1}‖_ℓ¹ by subtracting the two kernels site by site."""
    a = dict(build_kernel(table, label, N).entries)
    b = dict(build_kernel(table, label, N - 1).entries)
    return math.fsum(abs(a.get(s, 0.0) - b.get(s, 0.0)) for s in set(a) | set(b))

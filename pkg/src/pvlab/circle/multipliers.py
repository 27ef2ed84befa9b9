"""Model multipliers Φ and exponential sums over primes.

Two kernel families run through the whole module:

``avg``
    K(t) = 1/N on (M, N].  Φ_{M,N}(ξ) = ∫_M^N e(ξt) dt / N.
``hilbert``
    K(t) = 1/t on M < |t| <= N (odd).  Φ_{M,N}(ξ) = 2i (Si(2πNξ) - Si(2πMξ)).

M = 0 gives the full model Φ_N.  Here e(x) = exp(2πix).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from pvlab.errors import DomainError, RangeError
from pvlab.numtheory import PrimeTable
from pvlab.special import si

FAMILIES = ("avg", "hilbert")


def check_family(family: str) -> None:
    if family not in FAMILIES:
        raise DomainError(f"unknown family {family!r}; expected one of {FAMILIES}")


@dataclass(frozen=True)
class ModelMultiplier:
    family: str
    N: int
    M: int = 0

    def __post_init__(self):
        check_family(self.family)
        if not 0 <= self.M <= self.N:
            raise DomainError(f"need 0 <= M <= N, got M={self.M}, N={self.N}")

    @property
    def kind(self) -> str:
        return "window" if self.M else self.family

    def __call__(self, xi):
        return model_phi(self, xi)


def model_phi(mult: ModelMultiplier, xi):
    """Evaluate Φ_{M,N} at real ξ (array or scalar)."""
    x = np.asarray(xi, dtype=np.float64)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    N, M = mult.N, mult.M
    if mult.family == "avg":
        # (e(ξN) - e(ξM)) / (2πiξN) = e(ξ(N+M)/2) (N-M)/N sinc(ξ(N-M))
        out = np.exp(1j * np.pi * x * (N + M)) * ((N - M) / N) * np.sinc(x * (N - M))
    else:
        out = 2j * (si(2 * np.pi * N * x) - (si(2 * np.pi * M * x) if M else 0.0))
        out = np.asarray(out, dtype=np.complex128)
    return complex(out[0]) if scalar else out


def _check_range(table: PrimeTable, M: int, N: int) -> None:
    if not 0 <= M <= N:
        raise DomainError(f"need 0 <= M <= N, got M={M}, N={N}")
    if N > table.n_max:
        raise RangeError(f"N={N} exceeds sieve limit {table.n_max}")


def _phases(p: np.ndarray, center: Fraction | None, theta: float) -> np.ndarray:
    """2π (c p + θ p) mod 2π with the rational part reduced exactly."""
    frac = np.zeros(len(p))
    if center is not None and center.numerator:
        a, b = center.numerator, center.denominator
        frac = ((a % b) * (p % b) % b) / b
    return 2.0 * np.pi * ((frac + theta * p) % 1.0)


def prime_sum_at(
    table: PrimeTable, center: Fraction | None, theta: float, M: int, N: int, K: str
) -> complex:
    """Σ_{p∈(M,N]} e(ξp) K(p) log p at ξ = center + θ, accumulated with fsum."""
    check_family(K)
    _check_range(table, M, N)
    sl = table.primes_between(M, N)
    p = table.primes[sl]
    logs = table.log_primes[sl]
    ang = _phases(p, center, theta)
    if K == "avg":
        w = logs / N
        return complex(math.fsum((w * np.cos(ang)).tolist()), math.fsum((w * np.sin(ang)).tolist()))
    w = logs / p
    # the ±p pair contributes e(ξp) - e(-ξp) = 2i sin(2πξp)
    return complex(0.0, 2.0 * math.fsum((w * np.sin(ang)).tolist()))


def _split_xi(xi) -> tuple[Fraction | None, float]:
    if isinstance(xi, Fraction):
        return xi, 0.0
    if isinstance(xi, str):
        return _split_xi(parse_xi(xi))
    return None, float(xi)


def parse_xi(text: str):
    """'a/b' becomes an exact Fraction; anything else a float."""
    text = text.strip()
    if "/" in text:
        num, den = text.split("/", 1)
        return Fraction(int(num), int(den))
    return float(text)


def prime_exponential_sum(table: PrimeTable, xi, M: int, N: int, K: str = "avg") -> complex:
    """Σ_{p∈(M,N]} e(ξp) K(p) log p.

    Rational ξ (``Fraction`` or ``"a/b"``) keeps the phases exact.  With
    M = 0 and K = ``avg`` this is the multiplier m_N of the averaging kernel;
    with K = ``hilbert`` it is the multiplier of the odd prime kernel.
    """
    center, theta = _split_xi(xi)
    return prime_sum_at(table, center, theta, M, N, K)


def prime_sum_grid(table: PrimeTable, Q: int, M: int, N: int, K: str = "avg") -> np.ndarray:
    """The same sum at every ξ_j = j/Q, j = 0..Q-1, by binning p mod Q and one FFT."""
    check_family(K)
    _check_range(table, M, N)
    sl = table.primes_between(M, N)
    p = table.primes[sl]
    logs = table.log_primes[sl]
    w = logs / N if K == "avg" else logs / p
    bins = np.bincount(p % Q, weights=w, minlength=Q)
    forward = Q * np.fft.ifft(bins)  # Σ_r B[r] e(jr/Q)
    if K == "avg":
        return forward
    return forward - np.fft.fft(bins)


def integer_exponential_sum(theta: float, M: int, N: int, K: str = "avg") -> complex:
    """Σ_{n∈(M,N]} e(θn) K(n), the lattice analogue of Φ_{M,N}(θ)."""
    check_family(K)
    n = np.arange(M + 1, N + 1, dtype=np.float64)
    ang = 2.0 * np.pi * ((theta * n) % 1.0)
    if K == "avg":
        return complex(math.fsum(np.cos(ang).tolist()) / N, math.fsum(np.sin(ang).tolist()) / N)
    return complex(0.0, 2.0 * math.fsum((np.sin(ang) / n).tolist()))


def minor_arc_ratio(table: PrimeTable, gamma: float, N: int) -> float:
    """|F_N(γ)| N / θ(N)^2 with F_N(γ) = Σ_{p<=N} e(γp) log p."""
    F = N * prime_exponential_sum(table, gamma, 0, N, "avg")
    th = table.theta(N)
    return abs(F) * N / th**2

"""Prime sieve, arithmetic functions and Farey fractions.

Every log-weight ``log p`` is a double, and every double in ``[1/2, 32)`` is an
integer multiple of ``2**-53``.  Chebyshev sums are therefore accumulated
exactly as integers in units of ``2**-53`` and rounded once at the end; sums
over disjoint classes of primes add up to the full sum bit for bit.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Callable

import numpy as np

from pvlab.errors import DomainError, PreconditionError, RangeError

LOG_UNIT_BITS = 53
_SPLIT_BITS = 26
_LO_MASK = (1 << _SPLIT_BITS) - 1

CACHE_MAGIC = b"PVL1"
CACHE_VERSION = 1
_CACHE_HEADER = struct.Struct("<4sIQ")

DEFAULT_SEGMENT = 1 << 18


def _small_sieve(limit: int) -> np.ndarray:
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.flatnonzero(flags).astype(np.int64)


def _segmented_flags(n_max: int, segment: int) -> np.ndarray:
    base = _small_sieve(math.isqrt(n_max))
    flags = np.zeros(n_max + 1, dtype=bool)
    for lo in range(0, n_max + 1, segment):
        hi = min(lo + segment, n_max + 1)
        seg = np.ones(hi - lo, dtype=bool)
        for p in base.tolist():
            if p * p >= hi:
                break
            start = max(p * p, -(-lo // p) * p)
            seg[start - lo :: p] = False
        if lo == 0:
            seg[: min(2, hi)] = False
        flags[lo:hi] = seg
    return flags


def _split_units(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    units = np.ldexp(values, LOG_UNIT_BITS).astype(np.int64)
    return units >> _SPLIT_BITS, units & _LO_MASK


def _units_to_float(hi_sum: int, lo_sum: int) -> float:
    return math.ldexp(float((int(hi_sum) << _SPLIT_BITS) + int(lo_sum)), -LOG_UNIT_BITS)


@dataclass(frozen=True, eq=False)
class PrimeTable:
    """Primes up to ``n_max`` with exact Chebyshev prefix sums.

    ``theta_prefix[x]`` is the correctly rounded value of the sum of the stored
    doubles ``log p`` over primes ``p <= x``.
    """

    n_max: int
    is_prime: np.ndarray
    primes: np.ndarray
    log_primes: np.ndarray
    theta_prefix: np.ndarray
    pi_prefix: np.ndarray
    _hi: np.ndarray = field(repr=False)
    _lo: np.ndarray = field(repr=False)

    @classmethod
    def from_primes(cls, n_max: int, primes) -> "PrimeTable":
        primes = np.asarray(primes, dtype=np.int64)
        is_prime = np.zeros(n_max + 1, dtype=bool)
        is_prime[primes] = True
        log_primes = np.log(primes.astype(np.float64))
        hi, lo = _split_units(log_primes)
        # prefix sums indexed by prime count, then spread over integers
        hi_cum = np.concatenate(([0], np.cumsum(hi)))
        lo_cum = np.concatenate(([0], np.cumsum(lo)))
        theta_by_count = np.ldexp(hi_cum.astype(np.float64), _SPLIT_BITS - LOG_UNIT_BITS)
        theta_by_count = theta_by_count + np.ldexp(lo_cum.astype(np.float64), -LOG_UNIT_BITS)
        pi_prefix = np.cumsum(is_prime, dtype=np.int64)
        theta_prefix = theta_by_count[pi_prefix]
        for arr in (is_prime, primes, log_primes, theta_prefix, pi_prefix, hi, lo):
            arr.setflags(write=False)
        return cls(n_max, is_prime, primes, log_primes, theta_prefix, pi_prefix, hi, lo)

    def __len__(self):
        return len(self.primes)

    def _check(self, x: int) -> None:
        if x > self.n_max:
            raise RangeError(f"x={x} exceeds sieve limit n_max={self.n_max}")

    def pi(self, x: int) -> int:
        self._check(x)
        return 0 if x < 2 else int(self.pi_prefix[x])

    def theta(self, x: int) -> float:
        self._check(x)
        return 0.0 if x < 2 else float(self.theta_prefix[x])

    def theta_units(self, x: int) -> int:
        """θ(x) as an exact integer multiple of ``2**-53``."""
        self._check(x)
        k = self.pi(x)
        return (int(self._hi[:k].sum()) << _SPLIT_BITS) + int(self._lo[:k].sum())

    def log_units(self, p: int) -> int:
        return int(np.ldexp(np.log(np.float64(p)), LOG_UNIT_BITS))

    def primes_upto(self, x: int) -> np.ndarray:
        self._check(x)
        return self.primes[: self.pi(x)]

    def primes_between(self, m: int, n: int) -> slice:
        """Index slice of the primes in ``(m, n]``."""
        self._check(n)
        return slice(self.pi(max(m, 0)), self.pi(n))


def sieve(n_max: int, segment: int = DEFAULT_SEGMENT) -> PrimeTable:
    """Segmented sieve of Eratosthenes over ``[0, n_max]``."""
    n_max = int(n_max)
    if n_max < 2:
        raise DomainError(f"n_max must be >= 2, got {n_max}")
    flags = _segmented_flags(n_max, segment)
    return PrimeTable.from_primes(n_max, np.flatnonzero(flags))


def save_prime_cache(table: PrimeTable, path) -> None:
    """Write primes as little-endian u64 gaps behind a 16-byte header."""
    deltas = np.diff(table.primes, prepend=0).astype("<u8")
    with open(path, "wb") as fh:
        fh.write(_CACHE_HEADER.pack(CACHE_MAGIC, CACHE_VERSION, table.n_max))
        fh.write(deltas.tobytes())


def load_prime_cache(path) -> PrimeTable:
    raw = Path(path).read_bytes()
    if len(raw) < _CACHE_HEADER.size:
        raise DomainError(f"{path}: truncated prime cache header")
    magic, version, n_max = _CACHE_HEADER.unpack_from(raw)
    if magic != CACHE_MAGIC or version != CACHE_VERSION:
        raise DomainError(f"{path}: not a PVL1 v{CACHE_VERSION} prime cache")
    body = raw[_CACHE_HEADER.size :]
    if len(body) % 8:
        raise DomainError(f"{path}: body is not a whole number of u64 words")
    primes = np.cumsum(np.frombuffer(body, dtype="<u8")).astype(np.int64)
    return PrimeTable.from_primes(int(n_max), primes)


def chebyshev_psi_progression_units(table: PrimeTable, x: int, q: int, r: int) -> int:
    if x < 2:
        raise DomainError(f"x must be >= 2, got {x}")
    if q < 1 or not 1 <= r <= q:
        raise DomainError(f"need 1 <= r <= q, got q={q}, r={r}")
    table._check(x)
    k = table.pi(x)
    mask = table.primes[:k] % q == r % q
    return (int(table._hi[:k][mask].sum()) << _SPLIT_BITS) + int(table._lo[:k][mask].sum())


def chebyshev_psi_progression(table: PrimeTable, x: int, q: int, r: int) -> float:
    """ψ(x; q, r): sum of log p over primes p <= x with p ≡ r (mod q)."""
    return math.ldexp(float(chebyshev_psi_progression_units(table, x, q, r)), -LOG_UNIT_BITS)


# ---------------------------------------------------------------------------
# arithmetic functions

DEFAULT_Q_MAX = 1 << 16


def factorize(n: int) -> dict[int, int]:
    """Trial-division factorization ``{p: k}``."""
    if n < 1:
        raise DomainError(f"cannot factor {n}")
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


class ArithFn:
    """Euler φ, Möbius μ and divisor count d.

    Tables come from a linear sieve up to ``q_max``; larger arguments are
    factored on demand by trial division.
    """

    def __init__(self, q_max: int = DEFAULT_Q_MAX):
        if q_max < 1:
            raise DomainError("q_max must be positive")
        self.q_max = q_max
        phi = [0] * (q_max + 1)
        mu = [0] * (q_max + 1)
        d = [0] * (q_max + 1)
        # exponent of the smallest prime factor, needed to update d
        spf_exp = [0] * (q_max + 1)
        primes: list[int] = []
        if q_max >= 1:
            phi[1], mu[1], d[1] = 1, 1, 1
        for n in range(2, q_max + 1):
            if phi[n] == 0:
                primes.append(n)
                phi[n], mu[n], d[n], spf_exp[n] = n - 1, -1, 2, 1
            for p in primes:
                m = n * p
                if m > q_max:
                    break
                if n % p == 0:
                    phi[m] = phi[n] * p
                    mu[m] = 0
                    spf_exp[m] = spf_exp[n] + 1
                    d[m] = d[n] // (spf_exp[n] + 1) * (spf_exp[m] + 1)
                    break
                phi[m] = phi[n] * (p - 1)
                mu[m] = -mu[n]
                spf_exp[m] = 1
                d[m] = d[n] * 2
        self._phi = np.array(phi, dtype=np.int64)
        self._mu = np.array(mu, dtype=np.int64)
        self._d = np.array(d, dtype=np.int64)

    def phi(self, q: int) -> int:
        if q < 1:
            raise DomainError(f"φ undefined at {q}")
        if q <= self.q_max:
            return int(self._phi[q])
        out = 1
        for p, k in factorize(q).items():
            out *= p ** (k - 1) * (p - 1)
        return out

    def mu(self, q: int) -> int:
        if q < 1:
            raise DomainError(f"μ undefined at {q}")
        if q <= self.q_max:
            return int(self._mu[q])
        fac = factorize(q)
        if any(k > 1 for k in fac.values()):
            return 0
        return -1 if len(fac) % 2 else 1

    def d(self, q: int) -> int:
        if q < 1:
            raise DomainError(f"d undefined at {q}")
        if q <= self.q_max:
            return int(self._d[q])
        return math.prod(k + 1 for k in factorize(q).values())

    def totient_lower_ratio(self, eps: float) -> float:
        """max over q <= q_max of q**(1-eps) / φ(q); finite witness of φ(q) >= C q^(1-eps)."""
        q = np.arange(1, self.q_max + 1, dtype=np.float64)
        return float(np.max(q ** (1.0 - eps) / self._phi[1:]))

    def divisor_upper_ratio(self, eps: float) -> float:
        q = np.arange(1, self.q_max + 1, dtype=np.float64)
        return float(np.max(self._d[1:] / q**eps))


@lru_cache(maxsize=4)
def arith(q_max: int = DEFAULT_Q_MAX) -> ArithFn:
    """Shared, lazily built ArithFn."""
    return ArithFn(q_max)


def reduced_residues(q: int) -> list[int]:
    """A_q: the residues a in [1, q] coprime to q."""
    if q < 1:
        raise DomainError(f"q must be >= 1, got {q}")
    return [a for a in range(1, q + 1) if math.gcd(a, q) == 1]


@lru_cache(maxsize=1024)
def _residue_array(q: int) -> np.ndarray:
    arr = np.array(reduced_residues(q), dtype=np.int64)
    arr.setflags(write=False)
    return arr


def ramanujan_sum_check(q: int, a: int) -> complex:
    """Sum of e(r a / q) over r in A_q; equals μ(q) when gcd(a, q) = 1."""
    if q < 1:
        raise DomainError(f"q must be >= 1, got {q}")
    if math.gcd(a, q) != 1:
        raise PreconditionError(f"gcd({a}, {q}) != 1")
    # reduce r*a mod q exactly so every angle lies in [0, 2π)
    r = _residue_array(q)
    angles = 2.0 * np.pi * ((r * (a % q)) % q) / q
    return complex(math.fsum(np.cos(angles).tolist()), math.fsum(np.sin(angles).tolist()))


def divisors(n: int) -> list[int]:
    small = [k for k in range(1, math.isqrt(n) + 1) if n % k == 0]
    return sorted(set(small + [n // k for k in small]))


def moebius_inversion_check(F: Callable[[Fraction], complex], q: int) -> tuple[complex, complex]:
    """Both sides of  Σ_{a∈A_q} F(a/q) = Σ_{b|q} μ(q/b) Σ_{a=1}^{b} F(a/b).

    ``F`` receives exact ``Fraction`` arguments.
    """
    if q < 1:
        raise DomainError(f"q must be >= 1, got {q}")
    ar = arith()
    left = [complex(F(Fraction(a, q))) for a in reduced_residues(q)]
    right = []
    for b in divisors(q):
        m = ar.mu(q // b)
        if m:
            right.extend(m * complex(F(Fraction(a, b))) for a in range(1, b + 1))
    return _csum(left), _csum(right)


def _csum(values) -> complex:
    values = list(values)
    return complex(math.fsum(v.real for v in values), math.fsum(v.imag for v in values))


# ---------------------------------------------------------------------------
# Farey levels


def level_of(q: int) -> int:
    """The t with 2**t <= q < 2**(t+1)."""
    if q < 1:
        raise DomainError(f"q must be >= 1, got {q}")
    return q.bit_length() - 1


@dataclass(frozen=True, order=True)
class FareyPoint:
    """Reduced fraction a/q on the torus, tagged with its dyadic level t.

    The torus point 0 is always stored as 0/1.
    """

    a: int
    q: int
    t: int = -1

    def __post_init__(self):
        if self.q < 1:
            raise DomainError(f"denominator must be positive, got {self.q}")
        a = self.a % self.q
        if self.q == 1:
            a = 0
        elif a == 0 or math.gcd(a, self.q) != 1:
            raise PreconditionError(f"{self.a}/{self.q} is not a reduced nonzero fraction")
        object.__setattr__(self, "a", a)
        t = level_of(self.q)
        if self.t not in (-1, t):
            raise PreconditionError(f"{a}/{self.q} lives on level {t}, not {self.t}")
        object.__setattr__(self, "t", t)

    @property
    def value(self) -> Fraction:
        return Fraction(self.a, self.q)

    def __float__(self):
        return self.a / self.q

    def __str__(self):
        return f"{self.a}/{self.q}"


def farey_level(t: int, q_cap: int | None = None) -> list[FareyPoint]:
    """𝓡_t: reduced a/q with 2**t <= q < 2**(t+1), sorted by value; 𝓡_0 = {0}."""
    if t < 0:
        raise DomainError(f"level must be >= 0, got {t}")
    if t == 0:
        return [FareyPoint(0, 1)]
    q_hi = (1 << (t + 1)) - 1
    if q_cap is not None:
        q_hi = min(q_hi, q_cap)
    pts = [FareyPoint(a, q) for q in range(1 << t, q_hi + 1) for a in reduced_residues(q)]
    pts.sort(key=lambda p: p.value)
    return pts

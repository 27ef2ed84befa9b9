"""Weight transfer by partial summation.

Given nonnegative weights w, w′ with prefix sums W, W′, the normalized averages

    A_N = (1/W_N) Σ_{n<=N} w_n a_n,      A′_N = (1/W′_N) Σ_{n<=N} w′_n a_n

are related by A′_k = Σ_n λ_n^k A_n.  When the columns of λ have nonnegative
entries, a common sum Λ, and prefix sums Σ_{n<=N} λ_n^k nonincreasing in k,
the mixture cannot have more r-variation than Λ·V_r(a).  That gives
V_r(A′) <= V_r(A) when w′/w decreases, and V_r(A′) <= (4C - 1) V_r(A) when
w′/w increases with C = max_N W_N w′_N / (W′_N w_N).

Indices are 1-based in the mathematics and 0-based in arrays: row i of a
matrix is n = i + 1.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from pvlab.errors import DomainError, PreconditionError
from pvlab.numtheory import PrimeTable
from pvlab.variation import RealSequence, as_sequence, variation_exact, variation_fast

RTOL = 1e-12
CASES = ("decreasing", "increasing")


def compensated_cumsum(x) -> np.ndarray:
    """Prefix sums with Neumaier compensation carried along."""
    out = np.empty(len(x))
    s = c = 0.0
    for i, v in enumerate(np.asarray(x, dtype=np.float64).tolist()):
        t = s + v
        if abs(s) >= abs(v):
            c += (s - t) + v
        else:
            c += (v - t) + s
        s = t
        out[i] = s + c
    return out


@dataclass(frozen=True)
class WeightScheme:
    """Pair of nonnegative weight sequences, restricted to where w > 0.

    ``index_map[i]`` is the original (1-based) index of the i-th retained
    entry.  Indices with w = 0 and w′ = 0 are dropped; w′ > 0 where w = 0
    has no ratio and is refused.
    """

    w: np.ndarray
    w_prime: np.ndarray
    index_map: np.ndarray
    W: np.ndarray = field(repr=False)
    W_prime: np.ndarray = field(repr=False)

    @classmethod
    def from_weights(cls, w, w_prime) -> "WeightScheme":
        w = np.asarray(w, dtype=np.float64)
        wp = np.asarray(w_prime, dtype=np.float64)
        if w.shape != wp.shape or w.ndim != 1:
            raise DomainError("w and w_prime must be one-dimensional and of equal length")
        if not (np.all(np.isfinite(w)) and np.all(np.isfinite(wp))):
            raise DomainError("weights must be finite")
        if (w < 0).any() or (wp < 0).any():
            i = int(np.flatnonzero((w < 0) | (wp < 0))[0])
            raise DomainError(f"negative weight at n={i + 1}")
        orphan = (w == 0) & (wp > 0)
        if orphan.any():
            i = int(np.flatnonzero(orphan)[0])
            raise DomainError(f"w vanishes at n={i + 1} while w' does not; the ratio w'/w is undefined")
        keep = np.flatnonzero(w > 0)
        if len(keep) == 0:
            raise DomainError("w has empty support")
        ws, wps = w[keep].copy(), wp[keep].copy()
        if wps[0] == 0:
            raise DomainError(f"w' vanishes at the first support index n={keep[0] + 1}; W'_1 = 0")
        for a in (ws, wps):
            a.setflags(write=False)
        return cls(ws, wps, keep + 1, compensated_cumsum(ws), compensated_cumsum(wps))

    def __len__(self):
        return len(self.w)

    @property
    def ratio(self) -> np.ndarray:
        return self.w_prime / self.w

    def case(self) -> str | None:
        """'decreasing' or 'increasing' ratio (decreasing wins when constant), else None."""
        d = np.diff(self.ratio)
        if (d <= 0).all():
            return "decreasing"
        if (d >= 0).all():
            return "increasing"
        return None

    def C(self) -> float:
        """max_N W_N w′_N / (W′_N w_N); at least 1 since the N = 1 term is 1."""
        return float(np.max(self.W * self.ratio / self.W_prime))

    def averages(self, a) -> tuple[np.ndarray, np.ndarray]:
        """(A_N, A′_N) along the support, for a indexed by original 1-based n."""
        a = np.asarray(a, dtype=np.float64)
        if len(a) < self.index_map[-1]:
            raise DomainError(f"sequence has {len(a)} entries, support reaches n={self.index_map[-1]}")
        av = a[self.index_map - 1]
        A = compensated_cumsum(self.w * av) / self.W
        Ap = compensated_cumsum(self.w_prime * av) / self.W_prime
        return A, Ap


@dataclass(frozen=True)
class LambdaMatrix:
    """lam[n-1, k-1] = λ_n^k; ``Lambda`` is the common column sum."""

    lam: np.ndarray
    Lambda: float

    def __post_init__(self):
        lam = np.asarray(self.lam, dtype=np.float64)
        if lam.ndim != 2:
            raise DomainError("lambda must be a matrix")
        lam.setflags(write=False)
        object.__setattr__(self, "lam", lam)

    @property
    def shape(self) -> tuple[int, int]:
        return self.lam.shape

    def prefix(self) -> np.ndarray:
        """P[N-1, k-1] = Σ_{n<=N} λ_n^k."""
        return np.vstack([compensated_cumsum(col) for col in self.lam.T]).T

    def validate(self, rtol: float = RTOL) -> None:
        """Raise PreconditionError naming the first failing (N, k)."""
        lam = self.lam
        tol = rtol * max(1.0, abs(self.Lambda))
        neg = np.argwhere(lam < -tol)
        if len(neg):
            n, k = neg[0]
            raise PreconditionError(f"negative entry at (N={n + 1}, k={k + 1}): {lam[n, k]!r}")
        P = self.prefix()
        sums = P[-1]
        bad = np.flatnonzero(np.abs(sums - self.Lambda) > tol)
        if len(bad):
            k = int(bad[0])
            raise PreconditionError(
                f"column k={k + 1} sums to {sums[k]!r}, expected Lambda={self.Lambda!r} (N={lam.shape[0]}, k={k + 1})"
            )
        rise = np.argwhere(np.diff(P, axis=1) > tol)
        if len(rise):
            n, k = rise[0]
            raise PreconditionError(
                f"prefix sum increases in k at (N={n + 1}, k={k + 2}): {P[n, k]!r} -> {P[n, k + 1]!r}"
            )

    def apply(self, a) -> np.ndarray:
        """b_k = Σ_n λ_n^k a_n."""
        a = np.asarray(a, dtype=np.float64)
        if len(a) != self.lam.shape[0]:
            raise DomainError(f"sequence length {len(a)} does not match {self.lam.shape[0]} rows")
        return np.array([math.fsum((col * a).tolist()) for col in self.lam.T])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "k", "value"])
        for k in range(self.lam.shape[1]):
            for n in range(self.lam.shape[0]):
                v = self.lam[n, k]
                if v:
                    w.writerow([n + 1, k + 1, f"{v:.17g}"])
        return buf.getvalue()


@dataclass(frozen=True)
class LambdaBuild:
    case: str
    lam: LambdaMatrix
    tilde: LambdaMatrix | None = None
    C: float | None = None


def _check_case(scheme: WeightScheme, case: str) -> None:
    if case not in CASES:
        raise DomainError(f"unknown case {case!r}; expected one of {CASES}")
    d = np.diff(scheme.ratio)
    if case == "decreasing":
        bad = np.flatnonzero(d > 0)
    else:
        bad = np.flatnonzero(d < 0)
    if len(bad):
        i = int(bad[0])
        raise PreconditionError(
            f"w'/w is not {case} at support positions {i + 1}->{i + 2} "
            f"(n={scheme.index_map[i]}->{scheme.index_map[i + 1]})"
        )


def build_lambda(scheme: WeightScheme, case: str) -> LambdaBuild:
    """λ_n^k from partial summation; case 'increasing' also gives λ̃ with Λ = 2C - 1."""
    _check_case(scheme, case)
    K = len(scheme)
    ratio = scheme.ratio
    W, Wp = scheme.W, scheme.W_prime
    lam = np.zeros((K, K))
    step = np.zeros(K)
    step[:-1] = W[:-1] * (ratio[:-1] - ratio[1:])
    for k in range(K):
        lam[:k, k] = step[:k] / Wp[k]
        lam[k, k] = W[k] * ratio[k] / Wp[k]
    if case == "decreasing":
        out = LambdaMatrix(lam, 1.0)
        out.validate()
        return LambdaBuild(case, out)
    C = scheme.C()
    tilde = -lam
    tilde[np.diag_indices(K)] = 2.0 * C - np.diag(lam)
    tl = LambdaMatrix(tilde, 2.0 * C - 1.0)
    tl.validate()
    return LambdaBuild(case, LambdaMatrix(lam, 1.0), tl, C)


def sum1_identity(scheme: WeightScheme, N: int, k: int) -> float:
    """Closed form of Σ_{n<=N} λ_n^k (1-based N, k on the support)."""
    if not (1 <= N <= len(scheme) and 1 <= k <= len(scheme)):
        raise DomainError(f"(N, k) = ({N}, {k}) outside 1..{len(scheme)}")
    if N >= k:
        return 1.0
    return (scheme.W_prime[N - 1] - scheme.W[N - 1] * scheme.ratio[N]) / scheme.W_prime[k - 1]


def _vr(values, r: float) -> float:
    return variation_fast(RealSequence(np.asarray(values, dtype=np.float64)), r).value


def lemma51_check(lam: LambdaMatrix, a, r: float) -> tuple[float, float]:
    """(V_r(Σ_n λ_n^k a_n : k), Λ·V_r(a_n : n)); the first should not exceed the second."""
    lam.validate()
    seq = as_sequence(a)
    b = lam.apply(seq.values)
    return _vr(b, r), lam.Lambda * _vr(seq.values, r)


def mixture_quadrature(lam: LambdaMatrix, a, k: int, samples: int = 4096) -> tuple[float, float]:
    """(Σ_n λ_n^k a_n, midpoint rule for ∫_0^Λ a_{N_k(t)} dt), k 1-based.

    N_k(t) is the least N with t < Σ_{n<=N} λ_n^k, so a_{N_k(t)} is a step
    function whose n-th step has length λ_n^k.
    """
    a = np.asarray(a, dtype=np.float64)
    col = lam.lam[:, k - 1]
    direct = math.fsum((col * a).tolist())
    P = compensated_cumsum(col)
    t = (np.arange(samples) + 0.5) * (lam.Lambda / samples)
    Nk = np.minimum(np.searchsorted(P, t, side="right"), len(a) - 1)
    return direct, math.fsum(a[Nk].tolist()) * lam.Lambda / samples


@dataclass(frozen=True)
class TransferCheck:
    lhs: float  # V_r(A′)
    rhs: float  # V_r(A)
    Cprime: float
    case: str

    @property
    def holds(self) -> bool:
        return self.lhs <= self.Cprime * self.rhs * (1 + 1e-10) + 1e-300

    @property
    def ratio(self) -> float:
        return self.lhs / self.rhs if self.rhs else (0.0 if self.lhs == 0 else math.inf)


def prop52_check(scheme: WeightScheme, a, r: float, exact: bool = False) -> TransferCheck:
    """V_r of the w′-average against V_r of the w-average, with the certified constant.

    Case 'decreasing' certifies C′ = 1; case 'increasing' certifies 4C - 1.
    ``exact`` switches the variation routine to the plain O(J²) program.
    """
    case = scheme.case()
    if case is None:
        raise PreconditionError("w'/w is neither nonincreasing nor nondecreasing on the support")
    A, Ap = scheme.averages(a)
    vr = (lambda v: variation_exact(RealSequence(v), r).value) if exact else (lambda v: _vr(v, r))
    Cp = 1.0 if case == "decreasing" else 4.0 * scheme.C() - 1.0
    return TransferCheck(vr(Ap), vr(A), Cp, case)


def prime_scheme(table: PrimeTable, n_max: int) -> WeightScheme:
    """w_n = 1_ℙ(n) log n, w′_n = 1_ℙ(n) on n <= n_max: the log-weighted vs plain prime average."""
    if n_max < 2 or n_max > table.n_max:
        raise DomainError(f"n_max must lie in [2, {table.n_max}]")
    ind = table.is_prime[1 : n_max + 1].astype(np.float64)
    logs = np.log(np.arange(1, n_max + 1, dtype=np.float64))
    return WeightScheme.from_weights(ind * logs, ind)


def pnt_deviation(table: PrimeTable, N: int) -> float:
    """|θ(N)/N - 1|."""
    return abs(table.theta(N) / N - 1.0)


def pnt_normalization_check(table: PrimeTable, N: int, beta: float) -> float:
    """|θ(N)/N - 1|·(log N)^β."""
    if N < 2:
        raise DomainError(f"N must be >= 2, got {N}")
    return pnt_deviation(table, N) * math.log(N) ** beta

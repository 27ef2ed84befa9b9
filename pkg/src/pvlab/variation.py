"""The r-variation seminorm, its norm, and the long/short block split."""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import numpy as np

from pvlab.errors import DomainError


@dataclass
class RealSequence:
    """Finite real sequence whose first entry carries index ``index_offset``."""

    values: np.ndarray
    index_offset: int = 0

    def __post_init__(self):
        vals = np.asarray(self.values)
        if np.iscomplexobj(vals):
            vals = np.abs(vals)
        vals = vals.astype(np.float64, copy=False)
        if vals.ndim != 1:
            raise DomainError("sequence must be one-dimensional")
        if not np.all(np.isfinite(vals)):
            raise DomainError("sequence contains NaN or infinite entries")
        self.values = vals

    def __len__(self):
        return len(self.values)

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.index_offset, self.index_offset + len(self.values))


def as_sequence(seq) -> RealSequence:
    return seq if isinstance(seq, RealSequence) else RealSequence(seq)


@dataclass
class VariationResult:
    value: float
    path: list[int] = field(default_factory=list)
    approximate: bool = False

    def __float__(self):
        return self.value


def _check_r(r: float) -> float:
    r = float(r)
    if not r >= 1.0 or math.isinf(r):
        raise DomainError(f"r must be a finite real >= 1, got {r}")
    return r


def _dp(a: np.ndarray, r: float) -> tuple[float, list[int]]:
    """O(J^2) dynamic program over increasing index chains.

    best[j] = max_{i<j} best[i] + |a_j - a_i|^r; argmax takes the first
    maximizer, so ties go to the smaller predecessor.
    """
    n = len(a)
    if n < 2:
        return 0.0, []
    best = np.zeros(n)
    pred = np.full(n, -1, dtype=np.int64)
    for j in range(1, n):
        cand = best[:j] + np.abs(a[j] - a[:j]) ** r
        i = int(np.argmax(cand))
        best[j] = cand[i]
        pred[j] = i
    end = int(np.argmax(best))
    if best[end] == 0.0:
        return 0.0, []
    path = [end]
    while pred[path[-1]] >= 0 and (best[path[-1]] > 0.0):
        path.append(int(pred[path[-1]]))
    path.reverse()
    return float(best[end]), path


def variation_exact(seq, r: float) -> VariationResult:
    """V_r: sup over increasing index chains of (Σ |a_{n_{j+1}} - a_{n_j}|^r)^{1/r}."""
    r = _check_r(r)
    seq = as_sequence(seq)
    total, path = _dp(seq.values, r)
    return VariationResult(total ** (1.0 / r), [p + seq.index_offset for p in path])


def turning_points(a: np.ndarray) -> np.ndarray:
    """Indices of the endpoints and strict local extrema after merging flat runs.

    For r >= 1 a chain maximizing the r-variation can always be chosen among
    these indices, because a monotone triple a <= b <= c satisfies
    |c - a|^r >= |b - a|^r + |c - b|^r.
    """
    n = len(a)
    if n <= 2:
        return np.arange(n)
    keep = np.flatnonzero(np.diff(a) != 0)
    if len(keep) == 0:
        return np.array([0])
    # index of the last point of each flat run, plus the first point
    idx = np.concatenate(([0], keep + 1))
    b = a[idx]
    d = np.diff(b)
    interior = np.flatnonzero(np.sign(d[:-1]) != np.sign(d[1:])) + 1
    return idx[np.concatenate(([0], interior, [len(idx) - 1]))]


def variation_fast(seq, r: float) -> VariationResult:
    """Same value as :func:`variation_exact`, DP restricted to turning points.

    The reported path lives on turning points and may differ from the one
    the full DP would pick among equal maximizers.
    """
    r = _check_r(r)
    seq = as_sequence(seq)
    tp = turning_points(seq.values)
    total, path = _dp(seq.values[tp], r)
    return VariationResult(total ** (1.0 / r), [int(tp[p]) + seq.index_offset for p in path])


def _prune_pairs(a: np.ndarray, tp: list[int], max_points: int) -> list[int]:
    """Drop interior adjacent pairs with the smallest jump until max_points remain."""
    n = len(tp)
    nxt = list(range(1, n + 1))
    prv = list(range(-1, n - 1))
    alive = [True] * n
    heap = [(abs(a[tp[i + 1]] - a[tp[i]]), i, i + 1) for i in range(1, n - 2)]
    heapq.heapify(heap)
    count = n
    while count > max_points and heap:
        _, i, j = heapq.heappop(heap)
        if not (alive[i] and alive[j]) or nxt[i] != j:
            continue
        p, q = prv[i], nxt[j]
        if p < 0 or q >= n:
            continue
        alive[i] = alive[j] = False
        nxt[p], prv[q] = q, p
        count -= 2
        if prv[p] >= 0:
            heapq.heappush(heap, (abs(a[tp[q]] - a[tp[p]]), p, q))
    return [tp[i] for i in range(n) if alive[i]]


def variation_approx(seq, r: float, max_points: int = 20_000) -> VariationResult:
    """Lower bound for V_r on long sequences, flagged ``approximate``.

    Turning points are thinned greedily (smallest interior jump first) until
    at most ``max_points`` remain, then the exact DP runs on the survivors.
    Any subsequence gives a lower bound, so the result never overshoots.
    """
    r = _check_r(r)
    seq = as_sequence(seq)
    a = seq.values
    tp = [int(i) for i in turning_points(a)]
    approx = len(tp) > max_points
    if approx:
        tp = _prune_pairs(a, tp, max(max_points, 4))
    idx = np.asarray(tp, dtype=np.int64)
    total, path = _dp(a[idx], r)
    return VariationResult(
        total ** (1.0 / r), [int(idx[p]) + seq.index_offset for p in path], approximate=approx
    )


def variation_norm(seq, r: float) -> float:
    """𝒱_r = sup |a_n| + V_r."""
    seq = as_sequence(seq)
    sup = float(np.max(np.abs(seq.values))) if len(seq) else 0.0
    return sup + variation_exact(seq, r).value


def sup_domination_check(seq, r: float, n0: int) -> tuple[float, float]:
    """(sup_n |a_n|, |a_{n0}| + V_r); the first never exceeds the second.

    ``n0`` is an index in the sequence's own numbering (offset applied).
    """
    seq = as_sequence(seq)
    pos = n0 - seq.index_offset
    if not 0 <= pos < len(seq):
        raise DomainError(f"n0={n0} outside the sequence index range")
    lhs = float(np.max(np.abs(seq.values)))
    return lhs, abs(float(seq.values[pos])) + variation_fast(seq, r).value


# ---------------------------------------------------------------------------
# long / short split


@dataclass
class BlockPartition:
    """Boundaries N_k = floor(2**(k**epsilon)), k = 0, 1, ..., duplicates collapsed.

    Explicit ``boundaries`` override the lacunary construction.
    """

    epsilon: float = 0.5
    boundaries: list[int] | None = None

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise DomainError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if self.boundaries is not None:
            b = sorted(set(int(x) for x in self.boundaries))
            self.boundaries = b

    def upto(self, J: int) -> list[int]:
        """Distinct boundaries in [1, J]."""
        if self.boundaries is not None:
            return [b for b in self.boundaries if 1 <= b <= J]
        out: list[int] = []
        k = 0
        while True:
            nk = int(math.floor(2.0 ** (k**self.epsilon)))
            if nk > J:
                return out
            if not out or nk != out[-1]:
                out.append(nk)
            k += 1


def long_short_split(seq, r: float, part: BlockPartition) -> tuple[float, float]:
    """(V_r^L, V_r^S) for a sequence indexed 1..J.

    Long: V_r along the boundary indices.  Short: ℓ^r sum of V_r over the
    blocks [N_{k-1}, N_k), the final block running to J.  Indices below the
    first boundary form a leading block of their own.
    """
    r = _check_r(r)
    a = as_sequence(seq).values
    J = len(a)
    if J == 0:
        return 0.0, 0.0
    bounds = part.upto(J)
    long_v = variation_fast(a[[b - 1 for b in bounds]], r).value if bounds else 0.0
    edges = sorted(set([1] + bounds + [J + 1]))
    short_r = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        short_r += variation_fast(a[lo - 1 : hi - 1], r).value ** r
    return long_v, short_r ** (1.0 / r)

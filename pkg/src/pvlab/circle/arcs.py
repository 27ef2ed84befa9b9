"""Major/minor arcs, Dirichlet approximation, and measured arc errors."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from pvlab.errors import DomainError
from pvlab.numtheory import FareyPoint, PrimeTable, arith
from pvlab.circle.multipliers import (
    ModelMultiplier,
    check_family,
    model_phi,
    parse_xi,
    prime_sum_at,
)

PAPER_ALPHA = 32.0
ARC_SAMPLES = 11


def _as_fraction(xi) -> Fraction:
    if isinstance(xi, Fraction):
        return xi
    if isinstance(xi, str):
        return _as_fraction(parse_xi(xi))
    if isinstance(xi, tuple):
        return Fraction(*xi)
    return Fraction(float(xi))


@dataclass(frozen=True)
class DirichletApprox:
    point: FareyPoint
    numerator: int
    remainder: Fraction

    @property
    def q(self) -> int:
        return self.point.q


def dirichlet_approx(xi, Qcap: int) -> DirichletApprox:
    """Last continued-fraction convergent a/q of ξ with q <= Qcap.

    Guarantees |ξ - a/q| <= 1/(q Qcap).  ``remainder`` is ξ - a/q exactly;
    ``numerator`` is the raw convergent numerator (it may equal q when the
    convergent is 1/1, which the torus point stores as 0/1).
    """
    if Qcap < 1:
        raise DomainError(f"Qcap must be >= 1, got {Qcap}")
    x = _as_fraction(xi) % 1
    # convergents h/k of x in [0, 1); the first one is 0/1
    h, h_prev = 0, 1
    k, k_prev = 1, 0
    best = (h, k)
    rest = x
    while rest:
        rest = 1 / rest
        a = math.floor(rest)
        rest -= a
        h, h_prev = a * h + h_prev, h
        k, k_prev = a * k + k_prev, k
        if k > Qcap:
            break
        best = (h, k)
    h, k = best
    rem = x - Fraction(h, k)
    assert abs(rem) <= Fraction(1, k * Qcap), (x, h, k, Qcap)
    return DirichletApprox(FareyPoint(h, k), h, rem)


def vinogradov_bound(N: float, q: float) -> float:
    """(log N)^4 (N q^{-1/2} + N^{4/5} + N^{1/2} q^{1/2}), no hidden constant."""
    if N < 2 or q < 2:
        raise DomainError("need N, q >= 2")
    return math.log(N) ** 4 * (N / math.sqrt(q) + N**0.8 + math.sqrt(N * q))


@dataclass(frozen=True)
class ArcDecomposition:
    """Major arcs |ξ - a/q| <= N^{-1}(log N)^α around a/q with q <= (log N)^α."""

    N: int
    alpha: float

    def __post_init__(self):
        if self.N < 3:
            raise DomainError(f"N must be >= 3, got {self.N}")
        if not self.alpha > 0:
            raise DomainError(f"alpha must be positive, got {self.alpha}")

    @property
    def log_power(self) -> float:
        return math.log(self.N) ** self.alpha

    @property
    def halfwidth(self) -> float:
        return self.log_power / self.N

    @property
    def q_max(self) -> int:
        return int(math.floor(self.log_power))

    def centers(self) -> list[FareyPoint]:
        out = [FareyPoint(0, 1)]
        for q in range(2, self.q_max + 1):
            out.extend(FareyPoint(a, q) for a in range(1, q) if math.gcd(a, q) == 1)
        return out

    def classify(self, xi) -> FareyPoint | None:
        return arc_classify(self, xi)


def arc_classify(arcs: ArcDecomposition, xi) -> FareyPoint | None:
    """Witness a/q (smallest q, then closest) of a major arc containing ξ, else None.

    All comparisons are exact: ξ is rational and the half-width is the exact
    rational value of its double.
    """
    x = _as_fraction(xi) % 1
    w = Fraction(arcs.halfwidth)
    if w >= Fraction(1, 2):
        return FareyPoint(0, 1)
    for q in range(1, arcs.q_max + 1):
        lo = math.ceil((x - w) * q)
        hi = math.floor((x + w) * q)
        best = None
        for a in range(lo, hi + 1):
            if q > 1 and math.gcd(a % q, q) != 1:
                continue
            d = abs(x - Fraction(a, q))
            if best is None or d < best[0]:
                best = (d, a)
        if best is not None:
            return FareyPoint(best[1], q)
    return None


def regime(alpha=None, D=None, N=None, M=None) -> str:
    """'paper' only when every supplied parameter sits in the theorems' range."""
    if alpha is not None and alpha <= PAPER_ALPHA:
        return "exploratory"
    if D is not None and D <= 32:
        return "exploratory"
    if N is not None and M is not None and alpha is not None:
        if M < N * math.log(N) ** (-alpha / 4):
            return "exploratory"
    return "paper"


def arc_samples(center: FareyPoint, halfwidth: float, n: int = ARC_SAMPLES) -> np.ndarray:
    """Offsets θ of n equispaced points across the arc; odd n (and n = 1) include the centre."""
    if n < 1:
        raise DomainError(f"need at least one sample, got {n}")
    if n == 1:
        return np.zeros(1)
    return np.linspace(-halfwidth, halfwidth, n)


def major_arc_error(
    table: PrimeTable,
    family: str,
    N: int,
    M: int,
    alpha: float,
    center: FareyPoint,
    samples: int = ARC_SAMPLES,
) -> float:
    """Sampled sup over the arc 𝔐(a/q) of |Σ_p e(ξp)K(p)log p - μ(q)/φ(q) Φ_{M,N}(ξ - a/q)|.

    A lower bound on the true sup; callers label it "sampled-sup".
    """
    check_family(family)
    arcs = ArcDecomposition(N, alpha)
    ar = arith()
    coeff = ar.mu(center.q) / ar.phi(center.q)
    model = ModelMultiplier(family, N, M)
    err = 0.0
    for theta in arc_samples(center, arcs.halfwidth, samples).tolist():
        s = prime_sum_at(table, center.value, theta, M, N, family)
        err = max(err, abs(s - coeff * model_phi(model, theta)))
    return err

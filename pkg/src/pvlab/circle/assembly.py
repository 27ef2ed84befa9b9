"""Farey-localized multipliers ν_N^t on a rational grid and the assembly error.

ν_N^t(ξ) = Σ_{a/q ∈ 𝓡_t} μ(q)/φ(q) Φ_N(ξ - a/q) η_t(ξ - a/q), sampled at
ξ_j = j/Q.  Grid offsets ξ_j - a/q are formed from integers, so no
coincidence test ever compares floats.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from pvlab.errors import DomainError, PreconditionError, ResolutionError
from pvlab.numtheory import PrimeTable, arith, farey_level
from pvlab.circle.cutoff import Cutoff
from pvlab.circle.multipliers import ModelMultiplier, check_family, model_phi, prime_sum_grid

MIN_CELLS = 4


@dataclass
class MultiplierGrid:
    Q: int
    values: np.ndarray
    label: str
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.values) != self.Q:
            raise DomainError(f"grid holds {len(self.values)} values, expected Q={self.Q}")

    def xi(self, j: int) -> Fraction:
        return Fraction(j, self.Q)

    def to_csv(self) -> str:
        buf = io.StringIO()
        head = ",".join(f"{k}={v}" for k, v in self.meta.items())
        buf.write(f"# label={self.label},Q={self.Q}{',' if head else ''}{head}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["j", "xi_num", "xi_den", "re", "im"])
        for j, v in enumerate(self.values.tolist()):
            x = Fraction(j, self.Q)
            w.writerow([j, x.numerator, x.denominator, f"{v.real:.17g}", f"{v.imag:.17g}"])
        return buf.getvalue()


def _check_Q(Q: int) -> None:
    if Q < 2 or Q & (Q - 1):
        raise DomainError(f"grid size must be a power of two >= 2, got {Q}")


def resolvable_levels(cutoff: Cutoff, Q: int) -> int:
    """Largest t whose η_t support spans at least MIN_CELLS grid cells (-1 if none)."""
    t = -1
    while 2.0 * cutoff.support_radius(t + 1) * Q >= MIN_CELLS:
        t += 1
    return t


def truncation_level(cutoff: Cutoff, N: int, t_max: int, Q: int) -> int:
    """min(user cap, resolution limit, floor(log2 N))."""
    t_res = resolvable_levels(cutoff, Q)
    if t_res < 0:
        raise ResolutionError(f"even η_0 spans fewer than {MIN_CELLS} cells of a {Q}-point grid")
    return min(t_max, t_res, int(math.floor(math.log2(N))))


@dataclass
class LevelStats:
    t: int
    points: int
    cells: int
    overlaps: int


def nu_level(cutoff: Cutoff, family: str, N: int, t: int, Q: int) -> tuple[np.ndarray, LevelStats]:
    """ν_N^t on the grid, plus how many cells received more than one nonzero bump."""
    ar = arith()
    radius = cutoff.support_radius(t)
    js, centers_a, centers_q = [], [], []
    pts = farey_level(t)
    for pt in pts:
        lo = math.ceil((pt.value - Fraction(radius)) * Q)
        hi = math.floor((pt.value + Fraction(radius)) * Q)
        for j in range(lo, hi + 1):
            js.append(j)
            centers_a.append(pt.a)
            centers_q.append(pt.q)
    out = np.zeros(Q, dtype=np.complex128)
    if not js:
        return out, LevelStats(t, len(pts), 0, 0)
    j = np.array(js, dtype=np.int64)
    a = np.array(centers_a, dtype=np.int64)
    q = np.array(centers_q, dtype=np.int64)
    # θ = j/Q - a/q = (j q - a Q) / (q Q), numerator exact in int64
    theta = (j * q - a * Q) / (q * Q).astype(np.float64)
    bump = cutoff.eta_t(t, theta)
    live = bump > 0
    coeff = np.array([ar.mu(int(x)) / ar.phi(int(x)) for x in q.tolist()])
    vals = coeff * bump * model_phi(ModelMultiplier(family, N), theta)
    cells = j % Q
    np.add.at(out, cells[live], vals[live])
    hits = np.bincount(cells[live], minlength=Q)
    return out, LevelStats(t, len(pts), int(live.sum()), int((hits > 1).sum()))


def build_nu(
    cutoff: Cutoff,
    family: str,
    N: int,
    t_max: int,
    grid_Q: int,
    strict: bool = False,
    alpha: float | None = None,
) -> MultiplierGrid:
    """Σ_{t<=t_used} ν_N^t on the grid j/Q.

    Bumps of one level are disjoint only when D^{t+2} is large against 4^t;
    at desk-scale D they can share cells.  Shared cells are counted per level
    in ``meta['overlaps']``; ``strict=True`` turns any overlap into an error.
    ``alpha`` is not used by the construction and is only recorded.
    """
    check_family(family)
    _check_Q(grid_Q)
    if t_max < 0:
        raise DomainError(f"t_max must be >= 0, got {t_max}")
    t_used = truncation_level(cutoff, N, t_max, grid_Q)
    total = np.zeros(grid_Q, dtype=np.complex128)
    stats = []
    for t in range(t_used + 1):
        vals, st = nu_level(cutoff, family, N, t, grid_Q)
        if strict and st.overlaps:
            raise PreconditionError(f"level {t}: {st.overlaps} grid cells carry overlapping bumps")
        total += vals
        stats.append(st)
    meta = {
        "family": family,
        "N": N,
        "M": 0,
        "D": cutoff.D,
        "alpha": "" if alpha is None else alpha,
        "t_max": t_max,
        "t_used": t_used,
        "overlaps": "|".join(str(s.overlaps) for s in stats),
    }
    return MultiplierGrid(grid_Q, total, "nu", meta)


@dataclass
class AssemblyReport:
    error: float
    argmax: Fraction
    t_used: int
    overlaps: list[int]
    exact: np.ndarray = field(repr=False)
    model: np.ndarray = field(repr=False)


def assembly_report(
    table: PrimeTable,
    cutoff: Cutoff,
    family: str,
    N: int,
    t_max: int,
    grid_Q: int,
    alpha: float | None = None,
) -> AssemblyReport:
    nu = build_nu(cutoff, family, N, t_max, grid_Q, alpha=alpha)
    exact = prime_sum_grid(table, grid_Q, 0, N, family)
    diff = np.abs(exact - nu.values)
    j = int(np.argmax(diff))
    overlaps = [int(x) for x in str(nu.meta["overlaps"]).split("|") if x]
    return AssemblyReport(float(diff[j]), Fraction(j, grid_Q), nu.meta["t_used"], overlaps, exact, nu.values)


def assembly_error(
    table: PrimeTable,
    cutoff: Cutoff,
    family: str,
    N: int,
    alpha: float,
    t_max: int,
    grid_Q: int,
) -> float:
    """sup_j |m_N(j/Q) - Σ_t ψ_N^t(j/Q)|.

    ``alpha`` does not enter the computed quantity; it only fixes the
    reference rate (log N)^{-α/8} that callers report alongside.
    """
    if not alpha > 0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    return assembly_report(table, cutoff, family, N, t_max, grid_Q, alpha).error

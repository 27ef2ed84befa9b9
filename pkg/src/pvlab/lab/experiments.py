"""Experiment drivers.  Each experiment is a list of independent cells; cells run
on a thread pool and their rows are merged in cell order, so the output does
not depend on the worker count.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import numpy as np

from pvlab.circle import ArcDecomposition, Cutoff, assembly_report, major_arc_error, minor_arc_ratio, parse_xi, regime
from pvlab.errors import ConfigError
from pvlab.kernels import FiniteSignal, kernel_l1_difference, trajectory
from pvlab.lab.config import ExperimentConfig
from pvlab.lab.output import ResultRow
from pvlab.numtheory import FareyPoint, PrimeTable, chebyshev_psi_progression, arith, reduced_residues, sieve
from pvlab.variation import BlockPartition, RealSequence, long_short_split, variation_fast
from pvlab.weights import pnt_deviation, pnt_normalization_check, prime_scheme, prop52_check

DEFAULT_THREADS = 4
SPLIT_CONSTANT = 3.0
KERNEL_DIFF_CONSTANT = 3.0


def thread_count() -> int:
    raw = os.environ.get("PVLAB_THREADS")
    if raw is None or raw == "":
        return min(DEFAULT_THREADS, os.cpu_count() or 1)
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError("PVLAB_THREADS", f"not an integer: {raw!r}") from None
    if n < 1:
        raise ConfigError("PVLAB_THREADS", "must be >= 1")
    return n


def _row(cfg, params, metric, value, *, reg="paper", sampled=False, trunc=None) -> ResultRow:
    return ResultRow(cfg.experiment, tuple(params), metric, float(value), reg, sampled, trunc)


# -- cells -------------------------------------------------------------------


def _assembly_cell(cfg: ExperimentConfig, table: PrimeTable, N: int) -> list[ResultRow]:
    rep = assembly_report(table, Cutoff(cfg.D), cfg.family, N, cfg.t_max, cfg.Q, cfg.alpha)
    reg = regime(alpha=cfg.alpha, D=cfg.D)
    p = (("N", N), ("family", cfg.family), ("D", cfg.D), ("alpha", cfg.alpha), ("Q", cfg.Q))
    kw = dict(reg=reg, sampled=True, trunc=rep.t_used)
    return [
        _row(cfg, p, "sup_error", rep.error, **kw),
        _row(cfg, p, "reference_rate", math.log(N) ** (-cfg.alpha / 8), **kw),
        _row(cfg, p, "overlap_cells", sum(rep.overlaps), **kw),
    ]


def _blowup_cell(cfg, table, N: int) -> list[ResultRow]:
    traj = trajectory(table, cfg.family, FiniteSignal.delta(0), range(2, N + 1), cfg.x)
    rows = []
    for r in cfg.r:
        v = variation_fast(traj, r).value
        rows.append(_row(cfg, (("N", N), ("family", cfg.family), ("x", cfg.x), ("r", r)), "V_r", v))
    return rows


def _transfer_cell(cfg, table, N: int, signal: str) -> list[ResultRow]:
    scheme = prime_scheme(table, N)
    n = np.arange(1, N + 1)
    if signal == "delta":
        a = (cfg.x - n == 0).astype(np.float64)
    else:
        rng = np.random.default_rng(cfg.seed)
        f = FiniteSignal(-N, rng.standard_normal(2 * N + 1))
        a = f(cfg.x - n)
    rows = []
    for r in cfg.r:
        chk = prop52_check(scheme, a, r)
        p = (("N", N), ("signal", signal), ("x", cfg.x), ("r", r), ("case", chk.case))
        rows += [
            _row(cfg, p, "V_r_plain_average", chk.lhs),
            _row(cfg, p, "V_r_log_average", chk.rhs),
            _row(cfg, p, "certified_constant", chk.Cprime),
            _row(cfg, p, "holds", float(chk.holds)),
        ]
    return rows


def _siegel_walfisz_cell(cfg, table, q: int) -> list[ResultRow]:
    phi = arith().phi(q)
    rows = []
    for res in reduced_residues(q):
        for x in cfg.ladder:
            dev = abs(chebyshev_psi_progression(table, x, q, res) - x / phi) / x
            rows.append(_row(cfg, (("N", x), ("q", q), ("a", res)), "relative_deviation", dev))
    return rows


def _major_arc_cell(cfg, table, q: int) -> list[ResultRow]:
    rows = []
    residues = [0] if q == 1 else reduced_residues(q)
    for a in residues:
        center = FareyPoint(a, q)
        for N in cfg.ladder:
            err = major_arc_error(table, cfg.family, N, 0, cfg.alpha, center, cfg.samples)
            reg = regime(alpha=cfg.alpha, N=N, M=0)
            p = (("N", N), ("family", cfg.family), ("alpha", cfg.alpha), ("q", q), ("a", a), ("M", 0))
            rows.append(_row(cfg, p, "arc_error", err, reg=reg, sampled=True))
    return rows


def _minor_arc_cell(cfg, table, N: int) -> list[ResultRow]:
    gamma = parse_xi(cfg.xi)
    ratio = minor_arc_ratio(table, gamma, N)
    arcs = ArcDecomposition(N, cfg.alpha)
    major = arcs.classify(gamma if isinstance(gamma, Fraction) else Fraction(gamma)) is not None
    p = (("N", N), ("xi", cfg.xi), ("alpha", cfg.alpha))
    reg = regime(alpha=cfg.alpha)
    return [
        _row(cfg, p, "normalized_sum", ratio, reg=reg),
        _row(cfg, p, "on_major_arc", float(major), reg=reg),
    ]


def _kernel_diff_rows(cfg, table) -> list[ResultRow]:
    rows = []
    worst = 0.0
    violations = 0
    marks = iter(cfg.ladder)
    mark = next(marks)
    for n in range(3, cfg.ladder[-1] + 1):
        ratio = kernel_l1_difference(table, cfg.family, n) * n / math.log(n)
        worst = max(worst, ratio)
        violations += ratio > KERNEL_DIFF_CONSTANT
        if n == mark:
            p = (("N", n), ("family", cfg.family))
            rows.append(_row(cfg, p, "max_ratio_to_logN_over_N", worst))
            rows.append(_row(cfg, p, "violations", violations))
            mark = next(marks, None)
    return rows


def _normalization_cell(cfg, table, N: int) -> list[ResultRow]:
    p = (("N", N), ("beta", cfg.beta))
    return [
        _row(cfg, p, "deviation", pnt_deviation(table, N)),
        _row(cfg, p, "scaled_deviation", pnt_normalization_check(table, N, cfg.beta)),
    ]


def _split_cell(cfg, r: float) -> list[ResultRow]:
    J = cfg.ladder[0]
    rng = np.random.default_rng([cfg.seed, int(round(r * 1000))])
    part = BlockPartition(cfg.epsilon)
    worst = 0.0
    violations = 0
    for _ in range(cfg.trials):
        seq = RealSequence(rng.standard_normal(J))
        v = variation_fast(seq, r).value
        vl, vs = long_short_split(seq, r, part)
        denom = vl + vs
        ratio = v / denom if denom else 0.0
        worst = max(worst, ratio)
        violations += ratio > SPLIT_CONSTANT
    p = (("J", J), ("epsilon", cfg.epsilon), ("r", r), ("trials", cfg.trials))
    return [_row(cfg, p, "max_ratio", worst), _row(cfg, p, "violations", violations)]


# -- driver ------------------------------------------------------------------


def _needs_table(cfg: ExperimentConfig) -> bool:
    return cfg.experiment != "split"


def plan(cfg: ExperimentConfig, table: PrimeTable | None):
    """The experiment's cells as zero-argument callables, in output order."""
    e = cfg.experiment
    if e == "assembly-decay":
        return [lambda N=N: _assembly_cell(cfg, table, N) for N in cfg.ladder]
    if e == "blowup":
        return [lambda N=N: _blowup_cell(cfg, table, N) for N in cfg.ladder]
    if e == "transfer":
        return [lambda N=N, s=s: _transfer_cell(cfg, table, N, s) for N in cfg.ladder for s in ("delta", "random")]
    if e == "siegel-walfisz":
        return [lambda q=q: _siegel_walfisz_cell(cfg, table, q) for q in range(1, cfg.q_max + 1)]
    if e == "major-arc":
        return [lambda q=q: _major_arc_cell(cfg, table, q) for q in range(1, cfg.q_max + 1)]
    if e == "minor-arc":
        return [lambda N=N: _minor_arc_cell(cfg, table, N) for N in cfg.ladder]
    if e == "kernel-diff":
        return [lambda: _kernel_diff_rows(cfg, table)]
    if e == "normalization":
        return [lambda N=N: _normalization_cell(cfg, table, N) for N in cfg.ladder]
    if e == "split":
        return [lambda r=r: _split_cell(cfg, r) for r in cfg.r]
    raise ConfigError("experiment", f"unknown experiment {e!r}")


def run_experiment(cfg: ExperimentConfig, table: PrimeTable | None = None, threads: int | None = None) -> list[ResultRow]:
    if table is None and _needs_table(cfg):
        table = sieve(cfg.n_max)
    cells = plan(cfg, table)
    workers = min(threads or thread_count(), len(cells))
    if workers <= 1:
        chunks = [cell() for cell in cells]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(lambda c: c(), cells))
    return [row for chunk in chunks for row in chunk]

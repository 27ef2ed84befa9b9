"""``pvlab`` command line.  Every subcommand writes CSV to stdout or ``--out``.

Exit codes: 0 ok, 2 invalid flags or config, 3 grid resolution, 4 I/O.
"""

from __future__ import annotations

import functools
import sys
from fractions import Fraction
from pathlib import Path

import click
import numpy as np

from pvlab.circle import (
    ArcDecomposition,
    Cutoff,
    build_nu,
    dirichlet_approx,
    parse_xi,
    prime_exponential_sum,
    regime,
)
from pvlab.errors import ConfigError, PvlabError, ResolutionError
from pvlab.kernels import build_kernel
from pvlab.lab.config import load_config
from pvlab.lab.experiments import run_experiment
from pvlab.lab.output import rows_to_csv, table_to_csv
from pvlab.lab.plotting import plot_decay
from pvlab.numtheory import load_prime_cache, save_prime_cache, sieve
from pvlab.variation import RealSequence, variation_approx, variation_exact
from pvlab.weights import prime_scheme, prop52_check

EXIT_CONFIG = 2
EXIT_RESOLUTION = 3
EXIT_IO = 4


def _fail(code: int, msg: str):
    click.echo(f"error: {msg}", err=True)
    sys.exit(code)


def guarded(fn):
    """Map library errors onto exit codes."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ResolutionError as exc:
            _fail(EXIT_RESOLUTION, str(exc))
        except ConfigError as exc:
            _fail(EXIT_CONFIG, f"config field {exc}")
        except PvlabError as exc:
            _fail(EXIT_CONFIG, str(exc))
        except OSError as exc:
            _fail(EXIT_IO, str(exc))

    return wrapper


def _emit(text: str, out: str | None) -> None:
    if out is None:
        click.echo(text, nl=False)
    else:
        Path(out).write_text(text, encoding="utf-8", newline="")


def _table(n_max: int, cache: str | None):
    if cache and Path(cache).exists():
        table = load_prime_cache(cache)
        if table.n_max >= n_max:
            return table
    return sieve(n_max)


out_option = click.option("--out", type=click.Path(dir_okay=False), default=None, help="Write CSV here instead of stdout.")
cache_option = click.option("--cache", type=click.Path(dir_okay=False), default=None, help="Prime cache file to read (if large enough).")


@click.group()
@click.version_option(package_name="artifact")
def main():
    """Numerical laboratory for r-variation of prime averages and truncated Hilbert transforms."""


@main.command("sieve")
@click.option("--n-max", type=int, required=True, help="Sieve all primes up to this bound (>= 2).")
@click.option("--cache", type=click.Path(dir_okay=False), default=None, help="Also save the primes to this binary cache file.")
@click.option("--list", "list_primes", is_flag=True, help="List every prime with log p and θ(p) instead of the summary.")
@out_option
@guarded
def sieve_cmd(n_max, cache, list_primes, out):
    """Count primes and compute θ(n_max)."""
    table = sieve(n_max)
    if cache:
        save_prime_cache(table, cache)
    if list_primes:
        recs = [(int(p), float(lp), float(th)) for p, lp, th in zip(table.primes, table.log_primes, table.theta_prefix)]
        _emit(table_to_csv(("p", "log_p", "theta"), recs), out)
        return
    _emit(table_to_csv(("n_max", "pi", "theta"), [(n_max, table.pi(n_max), table.theta(n_max))]), out)


@main.command("kernel")
@click.option("--family", type=click.Choice(["avg", "hilbert", "avg_unweighted"]), default="avg", show_default=True, help="Kernel family.")
@click.option("--N", "N", type=int, required=True, help="Truncation: primes p <= N.")
@cache_option
@out_option
@guarded
def kernel_cmd(family, N, cache, out):
    """Dump the sparse kernel K_N as (site, weight) rows."""
    k = build_kernel(_table(N, cache), family, N)
    _emit(k.to_csv(), out)


@main.command("expsum")
@click.option("--N", "N", type=int, required=True, help="Upper end of the prime range.")
@click.option("--M", "M", type=int, default=0, show_default=True, help="Lower end: primes in (M, N].")
@click.option("--xi", required=True, help="Frequency: rational 'a/b' (exact phases) or decimal.")
@click.option("--family", type=click.Choice(["avg", "hilbert"]), default="avg", show_default=True, help="Kernel weight K(p).")
@cache_option
@out_option
@guarded
def expsum_cmd(N, M, xi, family, cache, out):
    """Σ_{M<p<=N} e(ξp) K(p) log p."""
    try:
        x = parse_xi(xi)
    except (ValueError, ZeroDivisionError):
        raise click.BadParameter(f"not a rational or decimal: {xi!r}", param_hint="--xi")
    s = prime_exponential_sum(_table(max(N, 2), cache), x, M, N, family)
    _emit(table_to_csv(("N", "M", "family", "xi", "re", "im", "abs"), [(N, M, family, xi, s.real, s.imag, abs(s))]), out)


@main.command("arcs")
@click.option("--N", "N", type=int, required=True, help="Scale N (>= 3).")
@click.option("--alpha", type=float, default=4.0, show_default=True, help="Arc exponent α: width N^-1 (log N)^α, q <= (log N)^α.")
@click.option("--xi", required=True, help="Frequency to classify: 'a/b' or decimal.")
@click.option("--qcap", type=int, default=None, help="Denominator cap for the Dirichlet approximation (default N).")
@out_option
@guarded
def arcs_cmd(N, alpha, xi, qcap, out):
    """Classify ξ as major or minor and give its Dirichlet approximation."""
    x = parse_xi(xi)
    x = x if isinstance(x, Fraction) else Fraction(x)
    arcs = ArcDecomposition(N, alpha)
    hit = arcs.classify(x)
    da = dirichlet_approx(x, qcap or N)
    rec = (
        N,
        alpha,
        xi,
        "major" if hit else "minor",
        str(hit) if hit else "",
        arcs.halfwidth,
        arcs.q_max,
        str(da.point),
        float(da.remainder),
        regime(alpha=alpha),
    )
    header = ("N", "alpha", "xi", "arc", "center", "halfwidth", "q_max", "dirichlet", "remainder", "regime")
    _emit(table_to_csv(header, [rec]), out)


@main.command("nu")
@click.option("--family", type=click.Choice(["avg", "hilbert"]), default="avg", show_default=True, help="Model multiplier family.")
@click.option("--N", "N", type=int, required=True, help="Scale N.")
@click.option("--D", "D", type=float, default=2.0, show_default=True, help="Cutoff dilation base D > 1.")
@click.option("--alpha", type=float, default=None, help="Arc exponent, recorded in the header only.")
@click.option("--t-max", type=int, default=6, show_default=True, help="Highest Farey level to include.")
@click.option("--Q", "Q", type=int, default=4096, show_default=True, help="Grid size (power of two); ξ_j = j/Q.")
@click.option("--strict", is_flag=True, help="Fail if bumps of one level share a grid cell.")
@out_option
@guarded
def nu_cmd(family, N, D, alpha, t_max, Q, strict, out):
    """Σ_t ν_N^t sampled on the grid j/Q."""
    grid = build_nu(Cutoff(D), family, N, t_max, Q, strict=strict, alpha=alpha)
    _emit(grid.to_csv(), out)


@main.command("variation")
@click.option("--r", "r", type=float, required=True, help="Exponent r >= 1.")
@click.option("--data", default=None, help="Comma-separated values, e.g. 0,2,1,3.")
@click.option("--file", "path", type=click.Path(dir_okay=False), default=None, help="Read values (one per line or comma-separated) from a file.")
@click.option("--approx", is_flag=True, help="Use the pruned approximate mode (a lower bound).")
@out_option
@guarded
def variation_cmd(r, data, path, approx, out):
    """V_r of a finite sequence and a maximizing index path."""
    if (data is None) == (path is None):
        raise click.UsageError("give exactly one of --data or --file")
    text = data if data is not None else Path(path).read_text(encoding="utf-8")
    try:
        vals = np.array([float(t) for t in text.replace("\n", ",").split(",") if t.strip()])
    except ValueError as exc:
        raise click.BadParameter(str(exc), param_hint="--data")
    seq = RealSequence(vals)
    res = variation_approx(seq, r) if approx else variation_exact(seq, r)
    path_s = ";".join(str(i) for i in res.path)
    _emit(table_to_csv(("r", "variation", "path", "approximate"), [(r, res.value, path_s, res.approximate)]), out)


@main.command("transfer")
@click.option("--n-max", type=int, default=1000, show_default=True, help="Use primes n <= n-max.")
@click.option("--r", "rs", type=float, multiple=True, default=(2.1, 2.5, 3.0, 4.0), show_default=True, help="Exponent r (repeatable).")
@click.option("--x", "x", type=int, default=0, show_default=True, help="Point x; a_n = f(x - n).")
@click.option("--signal", type=click.Choice(["delta", "random"]), default="random", show_default=True, help="f = δ_0 or seeded Gaussian noise on [-n_max, n_max].")
@click.option("--seed", type=int, default=0, show_default=True, help="Seed for the random signal.")
@out_option
@guarded
def transfer_cmd(n_max, rs, x, signal, seed, out):
    """Compare V_r of the plain and log-weighted prime averages."""
    table = sieve(max(n_max, 2))
    scheme = prime_scheme(table, n_max)
    n = np.arange(1, n_max + 1)
    if signal == "delta":
        a = (x - n == 0).astype(np.float64)
    else:
        vals = np.random.default_rng(seed).standard_normal(2 * n_max + 1)
        idx = x - n + n_max
        ok = (idx >= 0) & (idx < len(vals))
        a = np.where(ok, vals[np.clip(idx, 0, len(vals) - 1)], 0.0)
    recs = []
    for r in rs:
        c = prop52_check(scheme, a, r)
        recs.append((n_max, r, c.case, c.lhs, c.rhs, c.Cprime, c.holds))
    _emit(table_to_csv(("n_max", "r", "case", "V_r_plain", "V_r_log", "certified_constant", "holds"), recs), out)


@main.command("experiment")
@click.argument("config", type=click.Path(dir_okay=False))
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="CSV path (overrides the config's out key).")
@click.option("--plot/--no-plot", default=None, help="Also render a log-log SVG next to the CSV (default: config's plot key).")
@guarded
def experiment_cmd(config, out, plot):
    """Run the experiment described by a key = value CONFIG file."""
    cfg = load_config(config)
    dest = out or cfg.out
    text = rows_to_csv(run_experiment(cfg))
    _emit(text, dest)
    if plot if plot is not None else cfg.plot:
        if dest is None:
            raise ConfigError("out", "plotting needs an output path")
        plot_decay(text, Path(dest).with_suffix(".svg"), title=cfg.experiment)


if __name__ == "__main__":
    main()

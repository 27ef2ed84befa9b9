"""Plain-text experiment configuration: one ``key = value`` per line."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from pathlib import Path

from pvlab.circle.multipliers import parse_xi
from pvlab.errors import ConfigError

EXPERIMENTS = (
    "assembly-decay",
    "blowup",
    "transfer",
    "siegel-walfisz",
    "major-arc",
    "minor-arc",
    "kernel-diff",
    "normalization",
    "split",
)
FAMILIES = ("avg", "hilbert", "avg_unweighted")
CIRCLE_EXPERIMENTS = ("assembly-decay", "major-arc")

DEFAULT_LADDERS = {
    "assembly-decay": (100, 1000, 10_000, 100_000),
    "blowup": (10_000,),
    "transfer": (1000,),
    "siegel-walfisz": (100, 1000, 10_000, 100_000, 1_000_000),
    "major-arc": (100, 1000, 10_000, 100_000, 1_000_000),
    "minor-arc": (1000, 10_000, 100_000),
    "kernel-diff": (1000, 10_000, 100_000),
    "normalization": (100, 1000, 10_000, 100_000, 1_000_000),
    "split": (64,),
}


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    ladder: tuple[int, ...] = ()
    n_max: int = 0
    family: str = "avg"
    D: float = 2.0
    alpha: float = 4.0
    epsilon: float = 0.5
    r: tuple[float, ...] = (2.1, 2.5, 3.0, 4.0)
    Q: int = 4096
    t_max: int = 6
    seed: int = 0
    out: str | None = None
    # experiment-specific knobs
    x: int = 0
    xi: str = "0.6180339887"
    q_max: int = 6
    beta: float = 1.0
    trials: int = 1000
    samples: int = 11
    plot: bool = False

    def __post_init__(self):
        if not self.ladder:
            object.__setattr__(self, "ladder", DEFAULT_LADDERS.get(self.experiment, ()))
        if not self.n_max and self.ladder:
            object.__setattr__(self, "n_max", max(self.ladder))
        validate(self)


def _parse_bool(text: str) -> bool:
    t = text.lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_int(text: str) -> int:
    # accept 1e5-style integers but nothing fractional
    try:
        return int(text)
    except ValueError:
        v = float(text)
        if not v.is_integer():
            raise ValueError(f"not an integer: {text!r}")
        return int(v)


def _tuple_of(conv):
    def parse(text: str):
        return tuple(conv(p.strip()) for p in text.split(",") if p.strip())

    return parse


_PARSERS = {
    "experiment": str,
    "ladder": _tuple_of(_parse_int),
    "n_max": _parse_int,
    "family": str,
    "D": float,
    "alpha": float,
    "epsilon": float,
    "r": _tuple_of(float),
    "Q": _parse_int,
    "t_max": _parse_int,
    "seed": _parse_int,
    "out": str,
    "x": _parse_int,
    "xi": str,
    "q_max": _parse_int,
    "beta": float,
    "trials": _parse_int,
    "samples": _parse_int,
    "plot": _parse_bool,
}
assert set(_PARSERS) == {f.name for f in dataclasses.fields(ExperimentConfig)}


def parse_config(text: str) -> ExperimentConfig:
    """Parse ``key = value`` lines; '#' starts a comment, blank lines are skipped."""
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", f"expected 'key = value', got {raw.strip()!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in _PARSERS:
            raise ConfigError(key, f"unknown key (line {lineno})")
        if key in values:
            raise ConfigError(key, f"duplicate key (line {lineno})")
        try:
            values[key] = _PARSERS[key](val)
        except ValueError as exc:
            raise ConfigError(key, str(exc)) from None
    if "experiment" not in values:
        raise ConfigError("experiment", "missing required key")
    return ExperimentConfig(**values)


def load_config(path) -> ExperimentConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"))


def _require(cond: bool, key: str, msg: str) -> None:
    if not cond:
        raise ConfigError(key, msg)


def validate(cfg: ExperimentConfig) -> None:
    """Check every field against the preconditions of the modules it feeds."""
    _require(cfg.experiment in EXPERIMENTS, "experiment", f"unknown experiment {cfg.experiment!r}; expected one of {EXPERIMENTS}")
    _require(len(cfg.ladder) > 0, "ladder", "empty ladder")
    _require(all(b > a for a, b in zip(cfg.ladder, cfg.ladder[1:])), "ladder", "must be strictly ascending")
    low = 2 if cfg.experiment == "split" else 3
    _require(cfg.ladder[0] >= low, "ladder", f"entries must be >= {low}")
    if cfg.experiment != "split":
        _require(cfg.n_max >= cfg.ladder[-1], "n_max", f"must be >= largest ladder entry {cfg.ladder[-1]}")
    _require(cfg.family in FAMILIES, "family", f"expected one of {FAMILIES}")
    if cfg.experiment in CIRCLE_EXPERIMENTS:
        _require(cfg.family != "avg_unweighted", "family", f"{cfg.experiment} supports avg and hilbert only")
    _require(math.isfinite(cfg.D) and cfg.D > 1, "D", "must be a finite real > 1")
    _require(math.isfinite(cfg.alpha) and cfg.alpha > 0, "alpha", "must be positive")
    _require(0 < cfg.epsilon < 1, "epsilon", "must lie in (0, 1)")
    _require(len(cfg.r) > 0, "r", "empty list")
    _require(all(math.isfinite(v) and v >= 1 for v in cfg.r), "r", "entries must be finite and >= 1")
    _require(cfg.Q >= 2 and cfg.Q & (cfg.Q - 1) == 0, "Q", "must be a power of two >= 2")
    _require(cfg.t_max >= 0, "t_max", "must be >= 0")
    _require(cfg.seed >= 0, "seed", "must be >= 0")
    _require(cfg.q_max >= 1, "q_max", "must be >= 1")
    _require(cfg.trials >= 1, "trials", "must be >= 1")
    _require(cfg.samples >= 1, "samples", "must be >= 1")
    _require(math.isfinite(cfg.beta), "beta", "must be finite")
    try:
        parse_xi(cfg.xi)
    except (ValueError, ZeroDivisionError):
        raise ConfigError("xi", f"not a rational 'a/b' or decimal: {cfg.xi!r}") from None

"""Experiment configuration, orchestration, CSV/SVG output and the command line."""

from pvlab.lab.config import ExperimentConfig, load_config, parse_config
from pvlab.lab.experiments import run_experiment
from pvlab.lab.output import ResultRow, rows_to_csv

__all__ = ["ExperimentConfig", "ResultRow", "load_config", "parse_config", "rows_to_csv", "run_experiment"]

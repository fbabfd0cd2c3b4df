"""Experiment configs, the runner, diagnostic suites and the command line."""

from .config import ExperimentSpec, ObjectiveSpec, format_config, load_config, parse_config
from .runner import ExperimentResult, run_experiment

__all__ = ["ExperimentSpec", "ObjectiveSpec", "format_config", "load_config", "parse_config",
           "ExperimentResult", "run_experiment"]

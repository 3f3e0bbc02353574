"""Experiment configuration, runs, suites, trace files, plots and the command line."""

from harness.config import (
    ConfigError,
    ExperimentConfig,
    apply_overrides,
    dump_config,
    load_config,
    parse_override,
    validate_config,
)
from harness.csv_io import load_config_from_csv, read_trace_csv, write_trace_csv
from harness.experiment import ExperimentResult, Instance, build_instance, run_experiment
from harness.suite import SuiteConfig, SuiteMember, load_suite, run_suite
from harness.theory_report import print_theory, theory_report

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "ExperimentResult",
    "Instance",
    "SuiteConfig",
    "SuiteMember",
    "apply_overrides",
    "build_instance",
    "dump_config",
    "load_config",
    "load_config_from_csv",
    "parse_override",
    "print_theory",
    "read_trace_csv",
    "run_experiment",
    "run_suite",
    "theory_report",
    "validate_config",
    "write_trace_csv",
]

"""Experiment harness: configs, seeded runs, CSV output and the CLI."""

from .config import (
    ConfigError,
    ExperimentConfig,
    build_instance,
    build_policies,
    list_presets,
    load_config,
)
from .report import emit_csv, format_csv
from .runner import (
    AggregatedResult,
    ConcentrationReport,
    diagnostic_concentration,
    run_experiment,
    run_repetition,
    simulate,
    timing_report,
)

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "build_instance",
    "build_policies",
    "list_presets",
    "load_config",
    "emit_csv",
    "format_csv",
    "AggregatedResult",
    "ConcentrationReport",
    "diagnostic_concentration",
    "run_experiment",
    "run_repetition",
    "simulate",
    "timing_report",
]

"""Reproducible estimator experiments on RiverSwim"""

from .harness import (
    DEFAULT_ESTIMATORS,
    EXPERIMENTS,
    EstimatorSpec,
    ExperimentConfig,
    ExperimentError,
    ExperimentReport,
    parse_estimators,
    run_comparison,
    run_rate_experiment,
    run_tau_experiment,
)
from .report import OutputExistsError, write_report
from .riverswim import build_riverswim

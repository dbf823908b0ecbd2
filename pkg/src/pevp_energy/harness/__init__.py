from .emit import emit, reports_to_csv, theory_table, violin_to_csv
from .experiment import (
    EnergyReport,
    ExperimentConfig,
    LinearFit,
    enumerate_divisor_pairs,
    fit_linear_in_d,
    run_experiment,
)

__all__ = [
    "EnergyReport",
    "ExperimentConfig",
    "LinearFit",
    "emit",
    "enumerate_divisor_pairs",
    "fit_linear_in_d",
    "reports_to_csv",
    "run_experiment",
    "theory_table",
    "violin_to_csv",
]

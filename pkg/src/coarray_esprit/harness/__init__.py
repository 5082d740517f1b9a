from .config import ExperimentConfig, load_config, preset
from .sweep import (
    CSV_COLUMNS,
    GridPoint,
    TrialResult,
    aggregate,
    fit_loglog_slope,
    run_sweep,
    run_trial,
    run_trials,
)

from gpbt.harness.config import ExperimentConfig, load_config, parse_config
from gpbt.harness.metrics import best_mean_reward, compare, format_pct
from gpbt.harness.runner import SummaryRow, emit_plot_data, run_experiment

__all__ = [
    "ExperimentConfig",
    "SummaryRow",
    "best_mean_reward",
    "compare",
    "emit_plot_data",
    "format_pct",
    "load_config",
    "parse_config",
    "run_experiment",
]

from relaylab.harness.config import ExperimentConfig, load_config, parse_config, validate_config
from relaylab.harness.figures import FigureName, FigureOverrides, fig_data, figure_configs, required_snr_summary
from relaylab.harness.report import CompareReport, compare_report, emit_csv, read_csv, rows_to_frame
from relaylab.harness.selfcheck import CheckResult, run_selfcheck
from relaylab.harness.sweep import ResultRow, run_sweep

__all__ = [
    "CheckResult",
    "CompareReport",
    "ExperimentConfig",
    "FigureName",
    "FigureOverrides",
    "ResultRow",
    "compare_report",
    "emit_csv",
    "fig_data",
    "figure_configs",
    "load_config",
    "parse_config",
    "read_csv",
    "required_snr_summary",
    "rows_to_frame",
    "run_selfcheck",
    "run_sweep",
    "validate_config",
]

from .grid import (
    GridConfig,
    GridRunner,
    TableSpec,
    TrainOverrides,
    default_tables,
    load_grid_config,
    run_experiment_grid,
)
from .metrics import (
    ConfusionMatrix,
    accuracy_overall,
    accuracy_per_class,
    confusion,
    per_class_accuracies,
    undefined_support,
)
from .report import (
    Report,
    best_per_row,
    parse_results_json,
    render_confusion_csv,
    render_csv,
    render_json,
    render_report,
    render_table,
    write_report,
)
from .results import CellFailure, ExperimentResult, ResultsDocument

__all__ = [
    "CellFailure",
    "ConfusionMatrix",
    "ExperimentResult",
    "GridConfig",
    "GridRunner",
    "Report",
    "ResultsDocument",
    "TableSpec",
    "TrainOverrides",
    "accuracy_overall",
    "accuracy_per_class",
    "best_per_row",
    "confusion",
    "default_tables",
    "load_grid_config",
    "parse_results_json",
    "per_class_accuracies",
    "render_confusion_csv",
    "render_csv",
    "render_json",
    "render_report",
    "render_table",
    "run_experiment_grid",
    "undefined_support",
    "write_report",
]

import csv
import io
import json
import logging
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

from pydantic import BaseModel, Field, ValidationError

from wav2emo.classical import METHOD_TITLES
from wav2emo.errors import ParseError, describe_validation_error
from wav2emo.evaluation.grid import TableSpec
from wav2emo.evaluation.results import CellFailure, ExperimentResult, ResultsDocument

logger = logging.getLogger(__name__)

CSV_HEADER = ["dataset", "method", "frontend", "accuracy", "seed", "wall_ms"]
BEST_MARK = "*"
MISSING = "-"

FRONTEND_TITLES = {
    "raw": "raw audio",
    "mfcc": "MFCC features",
    "logmel": "log-mel spectrograms",
}
DEEP_TITLES = {"cnn": "CNN", "lstm": "LSTM", "cnn-lstm": "CNN-LSTM"}


def method_title(method: str) -> str:
    return METHOD_TITLES.get(method) or DEEP_TITLES.get(method) or method


def table_title(table: TableSpec) -> str:
    if table.title:
        return table.title
    family = "machine learning" if table.family == "classical" else "deep learning"
    features = FRONTEND_TITLES[table.frontend]
    return f"Evaluation results of {family} methods with {features}"


def best_per_row(values: Sequence[Optional[float]]) -> List[bool]:
    """Marks every cell equal to the row maximum; missing cells never win."""
    present = [v for v in values if v is not None]
    if not present:
        return [False] * len(values)
    top = max(present)
    return [v is not None and v == top for v in values]


def render_table(
    table: TableSpec, results: Sequence[ExperimentResult], datasets: Sequence[str]
) -> str:
    """
    Datasets as rows, methods as columns, accuracies to two decimals, and the
    best value of each row suffixed with `*`. Failed or missing cells are `-`.
    """
    by_cell = {
        (r.dataset, r.method): r.accuracy
        for r in results
        if r.frontend == table.frontend
    }
    header = ["Dataset"] + [method_title(m) for m in table.methods]
    rows = []
    for dataset in datasets:
        values = [by_cell.get((dataset, m)) for m in table.methods]
        marks = best_per_row(values)
        cells = [
            MISSING if v is None else f"{v:.2f}{BEST_MARK if best else ''}"
            for v, best in zip(values, marks)
        ]
        rows.append([dataset] + cells)

    widths = [max(len(row[i]) for row in [header, *rows]) for i in range(len(header))]

    def line(cells: List[str]) -> str:
        padded = [cell.ljust(width) for cell, width in zip(cells, widths)]
        return "| " + " | ".join(padded) + " |"

    rule = "|" + "|".join("-" * (width + 2) for width in widths) + "|"
    lines = [table_title(table), "", line(header), rule] + [line(r) for r in rows]
    return "\n".join(lines) + "\n"


def render_csv(results: Sequence[ExperimentResult]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in results:
        writer.writerow(
            [r.dataset, r.method, r.frontend, repr(r.accuracy), r.seed, r.wall_ms]
        )
    return buffer.getvalue()


def render_confusion_csv(result: ExperimentResult) -> str:
    labels = result.confusion.labels or [
        str(i) for i in range(result.confusion.n_classes)
    ]
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["true\\predicted"] + labels)
    for label, row in zip(labels, result.confusion.counts):
        writer.writerow([label] + row)
    return buffer.getvalue()


def render_json(document: ResultsDocument) -> str:
    return document.model_dump_json(indent=2) + "\n"


def render_failures(failures: Sequence[CellFailure]) -> str:
    return (
        json.dumps([f.model_dump() for f in failures], indent=2, sort_keys=True) + "\n"
    )


def parse_results_json(text: str) -> ResultsDocument:
    try:
        return ResultsDocument.model_validate_json(text)
    except ValidationError as e:
        message = describe_validation_error(e)
        raise ParseError(f"invalid results file: {message}") from e


def confusion_filename(result: ExperimentResult) -> str:
    return f"{result.dataset}__{result.frontend}__{result.method}.csv"


def default_tables_for(results: Sequence[ExperimentResult]) -> List[TableSpec]:
    """One table per frontend, methods in order of first appearance."""
    methods: Dict[str, List[str]] = {}
    for r in results:
        column = methods.setdefault(r.frontend, [])
        if r.method not in column:
            column.append(r.method)
    return [
        TableSpec.model_validate({"frontend": frontend, "methods": columns})
        for frontend, columns in methods.items()
    ]


class Report(BaseModel):
    json_text: str = Field(description="Results document, schema v1")
    csv_text: str = Field(description="One row per result")
    failures_text: str = Field(description="Failed cells as a JSON list")
    tables: Dict[str, str] = Field(description="File name to text table")
    confusions: Dict[str, str] = Field(description="File name to confusion CSV")


def render_report(
    results: Sequence[ExperimentResult],
    failures: Sequence[CellFailure] = (),
    tables: Optional[List[TableSpec]] = None,
    datasets: Optional[List[str]] = None,
) -> Report:
    """
    Every output format for a set of results.

    Args:
        results: Finished cells, in grid order.
        failures: Cells that raised; listed in the JSON document.
        tables: Layout of the text tables; one per frontend when omitted.
        datasets: Row order; order of first appearance when omitted.
    """
    if tables is None:
        tables = default_tables_for(results)
    if datasets is None:
        datasets = list(dict.fromkeys(r.dataset for r in results))
    document = ResultsDocument(results=list(results), failures=list(failures))
    rendered_tables = {
        f"table{index}_{table.family}_{table.frontend}.txt": render_table(
            table, results, datasets
        )
        for index, table in enumerate(tables, start=1)
    }
    return Report(
        json_text=render_json(document),
        csv_text=render_csv(results),
        failures_text=render_failures(failures),
        tables=rendered_tables,
        confusions={confusion_filename(r): render_confusion_csv(r) for r in results},
    )


def write_report(report: Report, out_dir: Union[str, Path]) -> List[Path]:
    """Write results.json, results.csv, failures.json, tables and confusions."""
    out_dir = Path(out_dir)
    (out_dir / "confusion").mkdir(parents=True, exist_ok=True)
    files = {
        out_dir / "results.json": report.json_text,
        out_dir / "results.csv": report.csv_text,
        out_dir / "failures.json": report.failures_text,
    }
    files.update({out_dir / name: text for name, text in report.tables.items()})
    for name, text in report.confusions.items():
        files[out_dir / "confusion" / name] = text
    for path, text in files.items():
        path.write_text(text, encoding="utf-8")
    logger.info(f"Wrote {len(files)} report files to {out_dir}")
    return list(files)

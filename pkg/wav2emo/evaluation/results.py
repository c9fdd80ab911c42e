from typing import List, Literal

from pydantic import BaseModel, Field, model_validator

from wav2emo.evaluation.metrics import ConfusionMatrix

RESULTS_SCHEMA_VERSION = 1


class ExperimentResult(BaseModel):
    """One cell of a result table."""

    dataset: str = Field(description="Dataset name from the grid config")
    method: str = Field(description="Classifier or architecture name")
    frontend: Literal["raw", "mfcc", "logmel"] = Field(description="Input path")
    accuracy: float = Field(ge=0.0, le=100.0, description="Overall percent correct")
    per_class_accuracy: List[float] = Field(
        default_factory=list, description="One-vs-rest percent per class id"
    )
    confusion: ConfusionMatrix = Field(description="Test-set confusion matrix")
    undefined_support: List[str] = Field(
        default_factory=list, description="Classes absent from the test set"
    )
    wall_ms: int = Field(default=0, ge=0, description="Fit plus evaluation time")
    seed: int = Field(description="Split and model seed")

    @model_validator(mode="after")
    def ensure_accuracy_matches_confusion(self) -> "ExperimentResult":
        counts = self.confusion.counts
        total = sum(sum(row) for row in counts)
        trace = sum(counts[i][i] for i in range(len(counts)))
        if total and abs(self.accuracy - 100.0 * trace / total) > 1e-9:
            raise ValueError(
                f"accuracy {self.accuracy} disagrees with confusion matrix "
                f"({trace}/{total})"
            )
        return self

    @property
    def cell(self) -> str:
        return f"{self.dataset}/{self.frontend}/{self.method}"


class CellFailure(BaseModel):
    dataset: str
    method: str
    frontend: str
    error: str = Field(description="Exception type and message")


class ResultsDocument(BaseModel):
    schema_version: Literal[1] = RESULTS_SCHEMA_VERSION
    results: List[ExperimentResult] = Field(default_factory=list)
    failures: List[CellFailure] = Field(default_factory=list)

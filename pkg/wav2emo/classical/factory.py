from typing import Dict, List

from wav2emo.classical.base import Classifier
from wav2emo.classical.bayes import GaussianNaiveBayes
from wav2emo.classical.ensemble import MajorityVoting, NamedClassifier, Stacking
from wav2emo.classical.forest import RandomForest
from wav2emo.classical.knn import KNearestNeighbors
from wav2emo.classical.logistic import LogisticRegression
from wav2emo.classical.svm import LinearSVM
from wav2emo.classical.tree import DecisionTree
from wav2emo.errors import ConfigError

# column order of the classical result tables
CLASSICAL_METHODS: List[str] = ["svm", "rf", "dt", "nb", "knn", "mv", "stck"]

METHOD_TITLES: Dict[str, str] = {
    "svm": "SVM",
    "rf": "RF",
    "dt": "DT",
    "nb": "NB",
    "knn": "KNN",
    "mv": "MV",
    "stck": "STCK",
    "lr": "LR",
}


def committee(seed: int, n_jobs: int = 1) -> List[NamedClassifier]:
    """The SVM, RF, DT and NB members shared by voting and stacking."""
    return [
        ("svm", LinearSVM(seed=seed)),
        ("rf", RandomForest(seed=seed, n_jobs=n_jobs)),
        ("dt", DecisionTree(seed=seed)),
        ("nb", GaussianNaiveBayes()),
    ]


def build_classifier(name: str, seed: int = 0, n_jobs: int = 1) -> Classifier:
    """
    Fresh, unfitted classifier for a method name of the result tables
    (svm, rf, dt, nb, knn, mv, stck) or lr for logistic regression.
    """
    match name:
        case "svm":
            return LinearSVM(seed=seed)
        case "rf":
            return RandomForest(seed=seed, n_jobs=n_jobs)
        case "dt":
            return DecisionTree(seed=seed)
        case "nb":
            return GaussianNaiveBayes()
        case "knn":
            return KNearestNeighbors()
        case "lr":
            return LogisticRegression()
        case "mv":
            return MajorityVoting(committee(seed, n_jobs))
        case "stck":
            return Stacking(committee(seed, n_jobs), LogisticRegression(), seed=seed)
    known = ", ".join(CLASSICAL_METHODS + ["lr"])
    raise ConfigError(f"unknown classical method {name!r}; expected one of {known}")

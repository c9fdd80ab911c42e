import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np
from sklearn.base import clone
from sklearn.model_selection import StratifiedKFold

from wav2emo.classical.base import Classifier, Tensors, nested, unnested
from wav2emo.classical.logistic import LogisticRegression
from wav2emo.errors import FitError

logger = logging.getLogger(__name__)

NamedClassifier = Tuple[str, Classifier]


def majority_vote(predictions: Sequence[int]) -> int:
    """Most frequent label; ties go to the lowest label."""
    if len(predictions) == 0:
        raise ValueError("majority_vote needs at least one prediction")
    return int(np.argmax(np.bincount(np.asarray(predictions, dtype=np.int64))))


class MajorityVoting(Classifier):
    """Hard voting over independently fitted members."""

    def __init__(self, estimators: List[NamedClassifier]):
        self.estimators = estimators

    def _fit(self, X: np.ndarray, y: np.ndarray) -> None:
        if len(self.estimators) < 2:
            raise FitError("majority voting needs at least 2 members")
        self.estimators_ = []
        for name, estimator in self.estimators:
            logger.debug(f"Fitting voting member {name}")
            self.estimators_.append(clone(estimator).fit(X, y))

    def member_predictions(self, X: np.ndarray) -> np.ndarray:
        return np.vstack([member.predict(X) for member in self.estimators_])

    def _proba(self, X: np.ndarray) -> np.ndarray:
        votes = self.member_predictions(X)
        counts = np.stack(
            [np.bincount(column, minlength=self.n_classes) for column in votes.T]
        )
        return counts / len(self.estimators_)

    def _export(self) -> Tensors:
        tensors: Tensors = {}
        for index, member in enumerate(self.estimators_):
            tensors.update(nested(f"member{index}", member.export_tensors()))
        return tensors

    def _import(self, tensors: Tensors) -> None:
        self.estimators_ = [
            clone(estimator).import_tensors(unnested(f"member{index}", tensors))
            for index, (_, estimator) in enumerate(self.estimators)
        ]


class Stacking(Classifier):
    """
    Two-level stacking.

    Base learners are fitted on stratified folds and their out-of-fold class
    probabilities, concatenated per learner, train the meta learner. For
    prediction the base learners are refitted on the whole training set.
    """

    def __init__(
        self,
        estimators: List[NamedClassifier],
        final_estimator: Optional[Classifier] = None,
        folds: int = 5,
        seed: int = 0,
    ):
        self.estimators = estimators
        self.final_estimator = final_estimator
        self.folds = folds
        self.seed = seed

    def _meta_learner(self) -> Classifier:
        return clone(self.final_estimator or LogisticRegression())

    def out_of_fold_probabilities(self, X: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Meta features of width n_base * n_classes."""
        if self.folds < 2:
            raise FitError(f"stacking needs at least 2 folds, got {self.folds}")
        splitter = StratifiedKFold(
            n_splits=self.folds, shuffle=True, random_state=self.seed
        )
        try:
            splits = list(splitter.split(X, y))
        except ValueError as e:
            raise FitError(f"cannot build {self.folds} stratified folds: {e}") from e

        k = self.n_classes
        meta = np.zeros((y.size, len(self.estimators) * k))
        for fold, (train_rows, held_out) in enumerate(splits):
            missing = np.setdiff1d(np.arange(k), y[train_rows])
            if missing.size:
                raise FitError(
                    f"fold {fold} has no training samples of classes "
                    f"{self.classes_[missing].tolist()}"
                )
            for index, (_, estimator) in enumerate(self.estimators):
                model = clone(estimator).fit(X[train_rows], y[train_rows])
                meta[held_out, index * k : (index + 1) * k] = model.predict_proba(
                    X[held_out]
                )
        return meta

    def _fit(self, X: np.ndarray, y: np.ndarray) -> None:
        if len(self.estimators) < 1:
            raise FitError("stacking needs at least 1 base learner")
        meta = self.out_of_fold_probabilities(X, y)
        self.final_estimator_ = self._meta_learner().fit(meta, y)
        self.estimators_ = [
            clone(estimator).fit(X, y) for _, estimator in self.estimators
        ]

    def meta_features(self, X: np.ndarray) -> np.ndarray:
        return np.hstack([member.predict_proba(X) for member in self.estimators_])

    def _proba(self, X: np.ndarray) -> np.ndarray:
        return self.final_estimator_.predict_proba(self.meta_features(X))

    def _export(self) -> Tensors:
        tensors = nested("meta", self.final_estimator_.export_tensors())
        for index, member in enumerate(self.estimators_):
            tensors.update(nested(f"member{index}", member.export_tensors()))
        return tensors

    def _import(self, tensors: Tensors) -> None:
        self.final_estimator_ = self._meta_learner().import_tensors(
            unnested("meta", tensors)
        )
        self.estimators_ = [
            clone(estimator).import_tensors(unnested(f"member{index}", tensors))
            for index, (_, estimator) in enumerate(self.estimators)
        ]

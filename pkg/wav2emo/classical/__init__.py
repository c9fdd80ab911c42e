from .base import Classifier, check_features
from .bayes import GaussianNaiveBayes
from .ensemble import MajorityVoting, Stacking, majority_vote
from .factory import CLASSICAL_METHODS, METHOD_TITLES, build_classifier, committee
from .forest import RandomForest
from .knn import KNearestNeighbors
from .logistic import LogisticRegression
from .model_io import (
    dump_classifier,
    load_classifier,
    parse_classifier,
    save_classifier,
)
from .svm import LinearSVM
from .tree import DecisionTree, Leaf, Split, TreeNode, best_split, fit_tree

__all__ = [
    "CLASSICAL_METHODS",
    "METHOD_TITLES",
    "Classifier",
    "DecisionTree",
    "GaussianNaiveBayes",
    "KNearestNeighbors",
    "Leaf",
    "LinearSVM",
    "LogisticRegression",
    "MajorityVoting",
    "RandomForest",
    "Split",
    "Stacking",
    "TreeNode",
    "best_split",
    "build_classifier",
    "check_features",
    "committee",
    "dump_classifier",
    "fit_tree",
    "load_classifier",
    "majority_vote",
    "parse_classifier",
    "save_classifier",
]

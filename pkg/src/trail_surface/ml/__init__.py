"""From-scratch classifiers: k-NN, CART decision tree and linear SVM."""

from .base import Dataset, MinMaxScaler, Model, Prediction
from .knn import KNN, knn_train
from .model_io import load_model, load_model_with_meta, save_model
from .svm import LinearSVM, svm_train
from .tree import DecisionTree, tree_train


def knn_predict(model: KNN, features, id: str = "") -> Prediction:
    return model.predict(features, id)


def tree_predict(model: DecisionTree, features, id: str = "") -> Prediction:
    return model.predict(features, id)


def svm_predict(model: LinearSVM, features, id: str = "") -> Prediction:
    return model.predict(features, id)


def train_model(kind: str, data: Dataset, seed: int = 0) -> Model:
    """Train one of ``svm``, ``knn`` (k=3) or ``tree`` with default settings."""
    if kind == "svm":
        return svm_train(data, seed=seed)
    if kind == "knn":
        return knn_train(data, k=3)
    if kind == "tree":
        return tree_train(data)
    raise ValueError(f"unknown model kind {kind!r}")


__all__ = [
    "Dataset", "DecisionTree", "KNN", "LinearSVM", "MinMaxScaler", "Model", "Prediction",
    "knn_predict", "knn_train", "load_model", "load_model_with_meta", "save_model",
    "svm_predict", "svm_train", "train_model", "tree_predict", "tree_train",
]

"""IsoSVM: Isomap embedding followed by a linear SVM.

The embedding is transductive: Isomap is fit once on every study, without
labels, and leave-one-out cross-validation only retrains the SVM. A
per-fold refit would need an out-of-sample extension, which is not
provided.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted, check_X_y

from ._validation import check_binary_labels
from .exceptions import InputError
from .isomap import FeatureStandardizer, Isomap
from .study import cohort_labels, cohort_matrix
from .svm import LinearSVM

EMBEDDING_NOTE = "isomap fit once on all studies (transductive, label-blind); SVM retrained per fold"


@dataclass(frozen=True)
class FoldResult:
    study_id: str
    score: float
    predicted: object
    true: object


@dataclass
class LoocvResult:
    folds: list
    classes: tuple
    isomap: Isomap
    standardizer: FeatureStandardizer
    hyperparameters: dict = field(default_factory=dict)

    @property
    def scores(self):
        return np.array([f.score for f in self.folds])

    @property
    def predicted(self):
        return np.array([f.predicted for f in self.folds])

    @property
    def true(self):
        return np.array([f.true for f in self.folds])


class IsoSVM(ClassifierMixin, BaseEstimator):
    """Standardize, embed with Isomap, then separate with a linear SVM."""

    def __init__(self, n_neighbors=5, n_components=2, C=1.0):
        self.n_neighbors = n_neighbors
        self.n_components = n_components
        self.C = C

    def _embed(self, X):
        self.standardizer_ = FeatureStandardizer().fit(X)
        self.isomap_ = Isomap(self.n_neighbors, self.n_components).fit(self.standardizer_.transform(X))
        return self.isomap_.embedding_

    def fit(self, X, y):
        X, y = check_X_y(X, y, dtype=np.float64)
        self.classes_, _ = check_binary_labels(y)
        self.training_X_ = X
        emb = self._embed(X)
        self.svm_ = LinearSVM(C=self.C).fit(emb, y)
        return self

    def decision_function(self, X):
        check_is_fitted(self, "svm_")
        emb = self.isomap_.transform(self.standardizer_.transform(X))
        return self.svm_.decision_function(emb)

    def predict(self, X):
        return np.where(self.decision_function(X) > 0, self.classes_[1], self.classes_[0])

    def loocv(self, X, y, study_ids=None, n_jobs=1):
        """Leave-one-out decision scores on a shared embedding."""
        X, y = check_X_y(X, y, dtype=np.float64)
        n = X.shape[0]
        if n < 4:
            raise InputError(f"leave-one-out needs at least 4 studies, got {n}")
        classes, _ = check_binary_labels(y)
        for c in classes:
            if np.sum(y == c) < 2:
                raise InputError(f"class {c!r} needs at least two studies for leave-one-out")
        self.classes_ = classes
        emb = self._embed(X)
        ids = list(study_ids) if study_ids is not None else [str(i) for i in range(n)]

        def _fold(i):
            train = np.arange(n) != i
            svm = LinearSVM(C=self.C).fit(emb[train], y[train])
            score = float(svm.decision_function(emb[i : i + 1])[0])
            pred = classes[1] if score > 0 else classes[0]
            return FoldResult(study_id=ids[i], score=score, predicted=pred, true=y[i])

        if n_jobs > 1:
            with ThreadPoolExecutor(max_workers=n_jobs) as pool:
                folds = list(pool.map(_fold, range(n)))
        else:
            folds = [_fold(i) for i in range(n)]
        return LoocvResult(
            folds=folds,
            classes=tuple(classes.tolist()),
            isomap=self.isomap_,
            standardizer=self.standardizer_,
            hyperparameters={
                "n_neighbors": self.n_neighbors,
                "n_neighbors_effective": self.isomap_.n_neighbors_,
                "n_components": self.n_components,
                "n_components_effective": self.isomap_.n_components_,
                "C": self.C,
            },
        )


def loocv_isosvm(rows, k=5, embedding_dim=2, C=1.0, n_jobs=1):
    """Leave-one-out IsoSVM over a list of labelled :class:`StudyFeatureVector`."""
    rows = list(rows)
    X, _ = cohort_matrix(rows)
    y = cohort_labels(rows)
    model = IsoSVM(n_neighbors=k, n_components=embedding_dim, C=C)
    return model.loocv(X, y, study_ids=[r.study_id for r in rows], n_jobs=n_jobs)

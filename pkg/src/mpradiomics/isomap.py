"""Feature standardization and Isomap embedding."""

from __future__ import annotations

import numpy as np
from scipy.sparse.csgraph import csgraph_from_dense, shortest_path
from scipy.spatial.distance import cdist
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from ._validation import check_int
from .exceptions import ComputationError, InputError
from .study import StudyFeatureVector, cohort_matrix

_ZERO_VARIANCE_RTOL = 1e-12


class FeatureStandardizer(TransformerMixin, BaseEstimator):
    """Z-score each column; columns without variance are dropped.

    Uses the population standard deviation. After ``fit``,
    ``support_`` flags the retained columns and ``warnings_`` names the
    dropped ones.
    """

    def __init__(self, feature_names=None):
        self.feature_names = feature_names

    def fit(self, X, y=None):
        X = check_array(X, dtype=np.float64)
        if X.shape[0] < 2:
            raise InputError("standardization needs at least two rows")
        mean = X.mean(axis=0)
        std = X.std(axis=0)
        keep = std > _ZERO_VARIANCE_RTOL * np.maximum(1.0, np.abs(mean))
        names = self.feature_names or [f"x{k}" for k in range(X.shape[1])]
        self.support_ = keep
        self.mean_ = mean[keep]
        self.scale_ = std[keep]
        self.feature_names_out_ = [n for n, k in zip(names, keep) if k]
        self.warnings_ = [f"dropped zero-variance feature {n!r}" for n, k in zip(names, keep) if not k]
        if not keep.any():
            raise InputError("every feature has zero variance")
        return self

    def transform(self, X):
        check_is_fitted(self, "support_")
        X = check_array(X, dtype=np.float64)
        return (X[:, self.support_] - self.mean_) / self.scale_


def standardize(rows):
    """Standardize a list of :class:`StudyFeatureVector`.

    Returns the standardized rows and the fitted :class:`FeatureStandardizer`
    (per-feature mean and scale, plus the dropped-feature warnings).
    """
    rows = list(rows)
    if len(rows) < 2:
        raise InputError("standardization needs at least two rows")
    X, names = cohort_matrix(rows)
    scaler = FeatureStandardizer(feature_names=names).fit(X)
    Z = scaler.transform(X)
    out = [
        StudyFeatureVector(
            study_id=r.study_id,
            features=dict(zip(scaler.feature_names_out_, map(float, z))),
            label=r.label,
            time_point=r.time_point,
        )
        for r, z in zip(rows, Z)
    ]
    return out, scaler


def knn_graph(distances, k):
    """Symmetric k-nearest-neighbour adjacency weighted by distance.

    Ties are broken by the lower index. Absent edges are ``inf``.
    """
    n = distances.shape[0]
    W = np.full((n, n), np.inf)
    for i in range(n):
        row = distances[i].copy()
        row[i] = np.inf
        nbrs = np.argsort(row, kind="stable")[:k]
        W[i, nbrs] = distances[i, nbrs]
        W[nbrs, i] = distances[nbrs, i]
    return W


def classical_mds(geodesic, n_components):
    """Top eigenpairs of the double-centred squared distance matrix.

    Returns ``(embedding, eigenvalues)``; each axis is signed so its
    largest-magnitude coordinate is positive.
    """
    n = geodesic.shape[0]
    J = np.eye(n) - np.full((n, n), 1.0 / n)
    Bm = -0.5 * J @ (geodesic**2) @ J
    Bm = 0.5 * (Bm + Bm.T)
    evals, evecs = np.linalg.eigh(Bm)
    order = np.argsort(evals, kind="stable")[::-1]
    evals = evals[order][:n_components]
    evecs = evecs[:, order][:, :n_components]
    for c in range(evecs.shape[1]):
        if evecs[np.argmax(np.abs(evecs[:, c])), c] < 0:
            evecs[:, c] = -evecs[:, c]
    return evecs * np.sqrt(np.maximum(evals, 0.0)), evals


class Isomap(TransformerMixin, BaseEstimator):
    """Isomap: k-NN graph geodesics followed by classical MDS.

    If the neighbour graph is disconnected, ``n_neighbors`` is increased
    until it is connected; the effective value is ``n_neighbors_`` and each
    step is logged in ``adjustments_``. When fewer positive eigenvalues than
    ``n_components`` exist, the embedding dimension shrinks and a note is
    added to ``warnings_``.

    There is no out-of-sample extension: ``transform`` only accepts the
    training matrix.
    """

    def __init__(self, n_neighbors=5, n_components=2):
        self.n_neighbors = n_neighbors
        self.n_components = n_components

    def fit(self, X, y=None):
        X = check_array(X, dtype=np.float64)
        n = X.shape[0]
        k = check_int(self.n_neighbors, "n_neighbors")
        dim = check_int(self.n_components, "n_components")
        if k >= n:
            raise InputError(f"n_neighbors={k} must be smaller than the number of rows {n}")
        if dim > n - 1:
            raise InputError(f"n_components={dim} must be at most n - 1 = {n - 1}")

        euclid = cdist(X, X)
        adjustments = []
        while True:
            W = knn_graph(euclid, k)
            geo = shortest_path(csgraph_from_dense(W, null_value=np.inf), directed=False)
            if np.all(np.isfinite(geo)):
                break
            if k + 1 >= n:
                raise ComputationError("neighbour graph stays disconnected")
            adjustments.append(f"n_neighbors {k} -> {k + 1}: graph disconnected")
            k += 1
        geo = 0.5 * (geo + geo.T)
        np.fill_diagonal(geo, 0.0)

        emb, evals = classical_mds(geo, dim)
        scale = max(1.0, float(np.abs(evals).max()))
        positive = int(np.sum(evals > 1e-10 * scale))
        self.warnings_ = []
        if positive < dim:
            if positive == 0:
                raise ComputationError("no positive eigenvalue; embedding failed")
            self.warnings_.append(
                f"only {positive} positive eigenvalues; n_components reduced from {dim}"
            )
            emb, evals = emb[:, :positive], evals[:positive]
        self.training_points_ = X
        self.euclidean_matrix_ = euclid
        self.geodesic_matrix_ = geo
        self.embedding_ = emb
        self.eigenvalues_ = evals
        self.n_neighbors_ = k
        self.n_components_ = emb.shape[1]
        self.adjustments_ = adjustments
        return self

    def fit_transform(self, X, y=None):
        return self.fit(X).embedding_

    def transform(self, X):
        check_is_fitted(self, "embedding_")
        X = check_array(X, dtype=np.float64)
        if X.shape == self.training_points_.shape and np.array_equal(X, self.training_points_):
            return self.embedding_
        raise NotImplementedError("Isomap here has no out-of-sample extension")


def fit_isomap(rows, k=5, embedding_dim=2):
    """Fit :class:`Isomap` on standardized rows (matrix or feature vectors)."""
    if isinstance(rows, (list, tuple)) and rows and isinstance(rows[0], StudyFeatureVector):
        X, _ = cohort_matrix(rows)
    else:
        X = rows
    return Isomap(n_neighbors=k, n_components=embedding_dim).fit(X)

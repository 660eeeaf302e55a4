import numpy as np
import pytest
from oracles import s_curve
from scipy.stats import spearmanr

from mpradiomics.exceptions import InputError
from mpradiomics.isomap import FeatureStandardizer, Isomap, classical_mds, fit_isomap, knn_graph, standardize
from mpradiomics.study import StudyFeatureVector


def rows_from(matrix, names=("a", "b")):
    return [StudyFeatureVector(f"s{i}", dict(zip(names, map(float, r)))) for i, r in enumerate(matrix)]


def test_standardize_two_rows():
    out, scaler = standardize(rows_from([[0.0, 5.0], [2.0, 5.0]]))
    assert [r.features for r in out] == [{"a": -1.0}, {"a": 1.0}]
    assert scaler.warnings_ == ["dropped zero-variance feature 'b'"]
    assert scaler.feature_names_out_ == ["a"]


def test_standardize_idempotent_and_errors(rng):
    X = rng.normal(size=(10, 4)) * [1, 10, 100, 0.1] + 3
    Z = FeatureStandardizer().fit_transform(X)
    assert np.allclose(Z.mean(axis=0), 0, atol=1e-12) and np.allclose(Z.std(axis=0), 1, atol=1e-12)
    assert np.allclose(FeatureStandardizer().fit_transform(Z), Z, atol=1e-12, rtol=0)
    with pytest.raises(InputError):
        standardize(rows_from([[1.0, 2.0]]))
    with pytest.raises(InputError):
        FeatureStandardizer().fit(np.ones((3, 2)))


def test_knn_graph_symmetric_with_index_ties():
    D = np.array([[0, 1, 1, 2], [1, 0, 2, 1], [1, 2, 0, 1], [2, 1, 1, 0]], dtype=float)
    W = knn_graph(D, 1)
    assert np.array_equal(np.isfinite(W), np.isfinite(W.T))
    # each row keeps its lowest-index nearest neighbour: 0-1, 1-0, 2-0, 3-1
    edges = {(i, j) for i, j in zip(*np.nonzero(np.isfinite(W))) if i < j}
    assert edges == {(0, 1), (0, 2), (1, 3)}


def test_line_embedding_preserves_order_and_gaps():
    t = np.array([0.0, 0.5, 1.7, 2.0, 3.5, 4.1])
    X = np.outer(t, [1.0, 2.0, -2.0])
    model = Isomap(n_neighbors=2, n_components=1).fit(X)
    coord = model.embedding_[:, 0]
    gaps = np.abs(np.diff(coord))
    assert np.allclose(gaps, np.diff(t) * 3.0, atol=1e-9)
    assert abs(spearmanr(coord, t)[0]) == 1.0


def test_s_curve_and_geodesic_properties():
    pts = s_curve(12)
    model = fit_isomap(pts, k=2, embedding_dim=1)
    assert model.adjustments_ == []
    assert abs(spearmanr(model.embedding_[:, 0], np.arange(12))[0]) == 1.0
    G, E = model.geodesic_matrix_, model.euclidean_matrix_
    assert np.array_equal(G, G.T) and np.all(np.diag(G) == 0) and np.all(np.isfinite(G))
    assert np.all(G >= E - 1e-12)
    assert np.all(G[:, None, :] <= G[:, :, None] + G[None, :, :] + 1e-9)


def test_disconnected_graph_increments_k():
    X = np.array([[0.0], [0.1], [0.2], [10.0], [10.1], [10.2]])
    model = Isomap(n_neighbors=1, n_components=1).fit(X)
    assert model.n_neighbors_ == 3 and len(model.adjustments_) == 2
    assert np.all(np.isfinite(model.geodesic_matrix_))


def test_dimension_reduced_when_eigenvalues_vanish():
    X = np.outer(np.arange(5.0), [1.0, 1.0])
    model = Isomap(n_neighbors=2, n_components=3).fit(X)
    assert model.n_components_ == 1 and model.warnings_


def test_errors_and_transform():
    X = np.random.default_rng(0).normal(size=(5, 3))
    with pytest.raises(InputError):
        Isomap(n_neighbors=5).fit(X)
    with pytest.raises(InputError):
        Isomap(n_neighbors=2, n_components=5).fit(X)
    model = Isomap(n_neighbors=2).fit(X)
    assert model.transform(X) is model.embedding_
    with pytest.raises(NotImplementedError):
        model.transform(X + 1)
    assert model.get_params() == {"n_neighbors": 2, "n_components": 2}


def test_fit_isomap_accepts_feature_vectors(rng):
    X = rng.normal(size=(8, 3))
    a = fit_isomap(rows_from(X, names=("x", "y", "z")), k=3)
    b = fit_isomap(X, k=3)
    assert np.array_equal(a.embedding_, b.embedding_)


def test_classical_mds_recovers_distances():
    pts = np.array([[0.0, 0.0], [3.0, 0.0], [0.0, 4.0], [3.0, 4.0]])
    D = np.linalg.norm(pts[:, None] - pts[None], axis=-1)
    emb, evals = classical_mds(D, 2)
    assert np.allclose(np.linalg.norm(emb[:, None] - emb[None], axis=-1), D, atol=1e-12)
    assert evals[0] >= evals[1] > 0

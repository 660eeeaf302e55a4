"""Soft-margin linear SVM solved in the dual by SMO.

Minimizes ``0.5 * ||w||^2 + C * sum(hinge)`` with an unregularized bias.
The dual

    min_a  0.5 * a' Q a - sum(a)   s.t.  y'a = 0,  0 <= a <= C,
    Q_ij = y_i y_j <x_i, x_j>

is solved with two-variable updates and second-order working-set
selection (Fan, Chen and Lin, JMLR 2005). Pair selection is a
deterministic argmax/argmin, lowest index first on ties.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from ._validation import check_binary_labels, check_int, check_positive_float
from .exceptions import ComputationError

_TAU = 1e-12


def _smo(K, y, C, tol, max_iter):
    n = len(y)
    alpha = np.zeros(n)
    grad = -np.ones(n)
    Q = (y[:, None] * y[None, :]) * K
    for it in range(max_iter):
        up = ((y > 0) & (alpha < C)) | ((y < 0) & (alpha > 0))
        low = ((y > 0) & (alpha > 0)) | ((y < 0) & (alpha < C))
        score = -y * grad
        up_scores = np.where(up, score, -np.inf)
        i = int(np.argmax(up_scores))
        m = up_scores[i]
        low_scores = np.where(low, score, np.inf)
        M = low_scores.min()
        if m - M < tol:
            return alpha, grad, it
        # second-order choice of j among violating low indices
        cand = low & (score < m)
        b = m - score
        a = K[i, i] + np.diag(K) - 2.0 * K[i]
        a = np.where(a > 0, a, _TAU)
        gain = np.where(cand, -(b * b) / a, np.inf)
        j = int(np.argmin(gain))

        a_ij = a[j]
        old_i, old_j = alpha[i], alpha[j]
        step = b[j] / a_ij
        total = y[i] * old_i + y[j] * old_j
        new_i = np.clip(old_i + y[i] * step, 0.0, C)
        new_j = np.clip(y[j] * (total - y[i] * new_i), 0.0, C)
        new_i = y[i] * (total - y[j] * new_j)
        alpha[i], alpha[j] = new_i, new_j
        grad += Q[:, i] * (new_i - old_i) + Q[:, j] * (new_j - old_j)
    raise ComputationError(f"SMO did not converge in {max_iter} iterations")


def _bias(alpha, grad, y, C):
    """LIBSVM's rho; returns the intercept ``-rho``."""
    yg = y * grad
    free = (alpha > 0) & (alpha < C)
    if free.any():
        rho = yg[free].mean()
    else:
        at_upper = alpha >= C
        at_lower = alpha <= 0
        ub_mask = ((y > 0) & at_lower) | ((y < 0) & at_upper)
        lb_mask = ((y > 0) & at_upper) | ((y < 0) & at_lower)
        ub = yg[ub_mask].min() if ub_mask.any() else np.inf
        lb = yg[lb_mask].max() if lb_mask.any() else -np.inf
        rho = 0.5 * (ub + lb)
    return -float(rho)


class LinearSVM(ClassifierMixin, BaseEstimator):
    """Binary linear SVM. ``classes_[1]`` is the positive class.

    After ``fit``: ``coef_``, ``intercept_``, ``alpha_``, and the objective
    values ``primal_objective_``, ``dual_objective_`` and ``duality_gap_``.
    """

    def __init__(self, C=1.0, tol=1e-8, max_iter=100_000):
        self.C = C
        self.tol = tol
        self.max_iter = max_iter

    def fit(self, X, y):
        X, y = check_X_y(X, y, dtype=np.float64)
        C = check_positive_float(self.C, "C")
        max_iter = check_int(self.max_iter, "max_iter")
        self.classes_, y01 = check_binary_labels(y)
        ys = 2.0 * y01 - 1.0
        K = X @ X.T
        alpha, grad, n_iter = _smo(K, ys, C, float(self.tol), max_iter)
        w = (alpha * ys) @ X
        b = _bias(alpha, grad, ys, C)
        self.alpha_ = alpha
        self.coef_ = w
        self.intercept_ = b
        self.n_iter_ = n_iter
        half_norm = 0.5 * float(w @ w)
        hinge = np.maximum(0.0, 1.0 - ys * (X @ w + b))
        self.primal_objective_ = half_norm + C * float(hinge.sum())
        self.dual_objective_ = float(alpha.sum()) - 0.5 * float(alpha @ (ys * (K @ (alpha * ys))))
        self.duality_gap_ = self.primal_objective_ - self.dual_objective_
        return self

    def decision_function(self, X):
        check_is_fitted(self, "coef_")
        X = check_array(X, dtype=np.float64)
        return X @ self.coef_ + self.intercept_

    def predict(self, X):
        return np.where(self.decision_function(X) > 0, self.classes_[1], self.classes_[0])


def train_linear_svm(embedded, labels, C=1.0):
    return LinearSVM(C=C).fit(embedded, labels)

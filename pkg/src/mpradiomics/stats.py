"""Summary statistics, Welch t-tests, ROC analysis and time-point deltas."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .exceptions import ComputationError, InputError, SingleClassError
from .study import StudyFeatureVector

T_TEST_METHOD = "welch"
COMPARISON_COLUMNS = ("feature", "mean_a", "sem_a", "mean_b", "sem_b", "t", "p", "auc", "orientation")


def summarize(values):
    """Mean and standard error of the mean (sample std, n - 1)."""
    x = np.asarray(values, dtype=np.float64)
    if x.size < 2:
        raise InputError("need at least two values")
    return float(x.mean()), float(x.std(ddof=1) / math.sqrt(x.size))


# -- incomplete beta ---------------------------------------------------------

_BETA_EPS = 1e-16
_BETA_TINY = 1e-300
_BETA_MAXIT = 10_000


def _beta_cf(a, b, x):
    """Continued fraction for I_x(a, b), modified Lentz evaluation."""
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _BETA_TINY:
        d = _BETA_TINY
    d = 1.0 / d
    h = d
    for m in range(1, _BETA_MAXIT + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _BETA_TINY:
            d = _BETA_TINY
        c = 1.0 + aa / c
        if abs(c) < _BETA_TINY:
            c = _BETA_TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _BETA_TINY:
            d = _BETA_TINY
        c = 1.0 + aa / c
        if abs(c) < _BETA_TINY:
            c = _BETA_TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _BETA_EPS:
            return h
    raise ComputationError(f"incomplete beta did not converge for a={a}, b={b}, x={x}")


def betainc(a, b, x):
    """Regularized incomplete beta function I_x(a, b) for a, b > 0.

    Evaluates the classical continued fraction on whichever side of
    ``x = (a + 1) / (a + b + 2)`` makes it converge fast, using the
    symmetry ``I_x(a, b) = 1 - I_{1-x}(b, a)``.
    """
    if a <= 0 or b <= 0:
        raise InputError("betainc needs a, b > 0")
    if not 0.0 <= x <= 1.0:
        raise InputError("betainc needs 0 <= x <= 1")
    if x == 0.0 or x == 1.0:
        return x
    log_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        + a * math.log(x) + b * math.log1p(-x)
    )
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_cf(a, b, x) / a
    return 1.0 - front * _beta_cf(b, a, 1.0 - x) / b


def student_t_two_sided_p(t, df):
    if math.isinf(t):
        return 0.0
    return min(1.0, betainc(0.5 * df, 0.5, df / (df + t * t)))


def welch_t_test(a, b):
    """Unequal-variance two-sample t-test; returns ``(t, two-sided p)``.

    ``t`` has the sign of ``mean(a) - mean(b)``. Two constant groups give
    ``(0, 1)`` when equal and ``(+-inf, 0)`` otherwise.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.size < 2 or b.size < 2:
        raise InputError("each group needs at least two values")
    va = a.var(ddof=1) / a.size
    vb = b.var(ddof=1) / b.size
    diff = float(a.mean() - b.mean())
    se2 = float(va + vb)
    if se2 == 0.0:
        if diff == 0.0:
            return 0.0, 1.0
        return math.copysign(math.inf, diff), 0.0
    t = diff / math.sqrt(se2)
    df = float(se2 * se2 / (va * va / (a.size - 1) + vb * vb / (b.size - 1)))
    return t, student_t_two_sided_p(t, df)


# -- ROC -------------------------------------------------------------------

@dataclass(frozen=True)
class RocCurve:
    fpr: tuple
    tpr: tuple
    thresholds: tuple
    auc_fraction: Fraction

    @property
    def auc(self):
        return float(self.auc_fraction)

    @property
    def points(self):
        return list(zip(self.fpr, self.tpr))

    def to_dict(self):
        return {
            "auc": self.auc,
            "fpr": list(self.fpr),
            "tpr": list(self.tpr),
            "thresholds": [None if math.isinf(t) else t for t in self.thresholds],
        }


def _binary(labels, pos_label=None):
    labels = np.asarray(labels)
    classes = np.unique(labels)
    if classes.size != 2:
        raise SingleClassError(f"both classes must be present, found {classes.tolist()}")
    if pos_label is None:
        pos_label = classes[1]
    elif pos_label not in classes:
        raise InputError(f"positive label {pos_label!r} not among {classes.tolist()}")
    return labels == pos_label


def mann_whitney_auc(scores, labels, pos_label=None):
    """Concordance of positive vs negative scores, ties counting one half."""
    pos = _binary(labels, pos_label)
    s = np.asarray(scores, dtype=np.float64)
    neg_sorted = np.sort(s[~pos])
    sp = s[pos]
    below = np.searchsorted(neg_sorted, sp, side="left")
    not_above = np.searchsorted(neg_sorted, sp, side="right")
    twice = int(np.sum(2 * below + (not_above - below)))
    return Fraction(twice, 2 * int(pos.sum()) * int((~pos).sum()))


def roc_auc(scores, labels, pos_label=None):
    """ROC curve over descending unique thresholds with trapezoidal AUC.

    A study is called positive when its score is at or above the threshold.
    The area is accumulated in integer counts and checked against the
    Mann-Whitney statistic, so tied scores earn half credit.
    """
    pos = _binary(labels, pos_label)
    s = np.asarray(scores, dtype=np.float64)
    if s.shape != pos.shape:
        raise InputError("scores and labels differ in length")
    n_pos, n_neg = int(pos.sum()), int((~pos).sum())
    order = np.argsort(-s, kind="stable")
    s_sorted, pos_sorted = s[order], pos[order]
    tp = np.cumsum(pos_sorted)
    fp = np.cumsum(~pos_sorted)
    last = np.r_[s_sorted[1:] != s_sorted[:-1], True]
    tps = [0] + [int(v) for v in tp[last]]
    fps = [0] + [int(v) for v in fp[last]]
    thresholds = [math.inf] + [float(v) for v in s_sorted[last]]
    twice_area = sum((fps[k] - fps[k - 1]) * (tps[k] + tps[k - 1]) for k in range(1, len(tps)))
    auc = Fraction(twice_area, 2 * n_pos * n_neg)
    if auc != mann_whitney_auc(s, pos, True):
        raise ComputationError("trapezoidal AUC disagrees with the Mann-Whitney statistic")
    return RocCurve(
        fpr=tuple(f / n_neg for f in fps),
        tpr=tuple(t / n_pos for t in tps),
        thresholds=tuple(thresholds),
        auc_fraction=auc,
    )


def confusion_metrics(predictions, labels, pos_label=None):
    """``(sensitivity, specificity, accuracy)``."""
    truth = _binary(labels, pos_label)
    if pos_label is None:
        pos_label = np.unique(np.asarray(labels))[1]
    pred = np.asarray(predictions) == pos_label
    if pred.shape != truth.shape:
        raise InputError("predictions and labels differ in length")
    tp = int(np.sum(pred & truth))
    tn = int(np.sum(~pred & ~truth))
    sens = tp / int(truth.sum())
    spec = tn / int((~truth).sum())
    return sens, spec, (tp + tn) / truth.size


# -- time points -----------------------------------------------------------

def delta_features(t1, t2):
    """Per-feature change ``t2 - t1`` of one study; label comes from ``t2``."""
    if t1.study_id != t2.study_id:
        raise InputError(f"study mismatch: {t1.study_id!r} vs {t2.study_id!r}")
    if t1.names != t2.names:
        raise InputError(f"feature lists differ for study {t1.study_id!r}")
    return StudyFeatureVector(
        study_id=t2.study_id,
        features={k: t2.features[k] - t1.features[k] for k in t1.features},
        label=t2.label,
    )


# -- group comparison --------------------------------------------------------

@dataclass(frozen=True)
class FeatureComparison:
    feature: str
    mean_a: float
    sem_a: float
    mean_b: float
    sem_b: float
    t: float
    p: float
    auc: float
    orientation: str

    def as_row(self):
        return [getattr(self, c) for c in COMPARISON_COLUMNS]


@dataclass(frozen=True)
class GroupComparison:
    """Per-feature comparison of group ``a`` against group ``b``.

    ``orientation`` is ``higher_in_b`` when larger values point to group
    ``b``, else ``lower_in_b``; the reported AUC is the oriented one (>= 0.5).
    """

    label_a: str
    label_b: str
    rows: tuple
    method: str = T_TEST_METHOD

    def __getitem__(self, feature):
        for r in self.rows:
            if r.feature == feature:
                return r
        raise KeyError(feature)

    @property
    def features(self):
        return [r.feature for r in self.rows]


def group_compare(cohort, label_a=None, label_b=None):
    """Summaries, Welch test and single-feature AUC for every feature.

    Groups are defined by the studies' labels; by default ``a`` is the
    lexicographically smaller label.
    """
    from .study import cohort_labels, cohort_matrix

    cohort = list(cohort)
    X, names = cohort_matrix(cohort)
    y = cohort_labels(cohort)
    classes = sorted(set(y.tolist()))
    if len(classes) != 2:
        raise SingleClassError(f"need exactly two groups, found {classes}")
    label_a = classes[0] if label_a is None else label_a
    label_b = classes[1] if label_b is None else label_b
    in_a, in_b = y == label_a, y == label_b
    if in_a.sum() < 2 or in_b.sum() < 2:
        raise InputError("each group needs at least two studies")
    rows = []
    for k, name in enumerate(names):
        col = X[:, k]
        a, b = col[in_a], col[in_b]
        mean_a, sem_a = summarize(a)
        mean_b, sem_b = summarize(b)
        t, p = welch_t_test(a, b)
        sub = in_a | in_b
        auc = roc_auc(col[sub], in_b[sub], True).auc_fraction
        orientation = "higher_in_b"
        if auc < Fraction(1, 2):
            auc, orientation = 1 - auc, "lower_in_b"
        rows.append(FeatureComparison(name, mean_a, sem_a, mean_b, sem_b, t, p, float(auc), orientation))
    return GroupComparison(label_a=str(label_a), label_b=str(label_b), rows=tuple(rows))


def write_comparison_csv(comparison, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(COMPARISON_COLUMNS)
        for r in comparison.rows:
            writer.writerow([repr(v) if isinstance(v, float) else v for v in r.as_row()])
    return path


def read_comparison_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != COMPARISON_COLUMNS:
            raise InputError(f"{path}: unexpected columns {header}")
        out = []
        for row in reader:
            vals = [row[0]] + [float(v) for v in row[1:8]] + [row[8]]
            out.append(FeatureComparison(*vals))
    return out

"""Per-study feature rows and cohort helpers."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import InputError


@dataclass(frozen=True)
class StudyFeatureVector:
    study_id: str
    features: dict = field(default_factory=dict)
    label: str | None = None
    time_point: int | None = None

    @property
    def names(self):
        return list(self.features)

    def values(self):
        return np.array([self.features[k] for k in self.features], dtype=np.float64)


def cohort_matrix(rows):
    """Stack rows into ``(X, names)``; every row must share the name list."""
    rows = list(rows)
    if not rows:
        raise InputError("cohort is empty")
    names = rows[0].names
    for r in rows[1:]:
        if r.names != names:
            raise InputError(
                f"study {r.study_id!r} has a different feature list than {rows[0].study_id!r}"
            )
    X = np.vstack([r.values() for r in rows]) if names else np.empty((len(rows), 0))
    return X, names


def cohort_labels(rows):
    labels = [r.label for r in rows]
    missing = [r.study_id for r in rows if r.label is None]
    if missing:
        raise InputError(f"studies without a label: {missing}")
    return np.asarray(labels)

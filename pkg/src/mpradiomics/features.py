"""End-to-end feature extraction and the feature-file format.

A feature file is CSV preceded by one comment line holding JSON
provenance (config, extension features, file format tag)::

    # {"format": "mpradiomics-features/1", "config": {...}, ...}
    study_id,label,time_point,TSPM_entropy_T1,...
    case01,smooth,,3.52...

Floats are written with ``repr`` so files round-trip exactly.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .config import PipelineConfig
from .exceptions import InputError
from .study import StudyFeatureVector
from .tscm import directional_summary
from .tsfos import EXTENSION_FEATURES, build_tsh, tsfos_features
from .tspm import subset_features
from .volume_io import quantize, signature_array

FEATURE_FORMAT = "mpradiomics-features/1"
ID_COLUMNS = ("study_id", "label", "time_point")


def extract_features(stack, roi, config=None, n_jobs=1):
    """All TSPM, TSFOS and TSCM features of one ROI, in frozen order."""
    config = config or PipelineConfig()
    q = quantize(stack, roi, config.G)
    table = subset_features(
        signature_array(q, roi),
        config.G,
        config.max_subset_size,
        names=stack.names,
        n_jobs=n_jobs,
    )
    out = table.as_features("TSPM_")
    out.update(tsfos_features(build_tsh(stack, roi, config.B, config.normalization), "TSFOS_"))
    tscm = directional_summary(q, roi, config.d, config.angles, n_jobs=n_jobs)
    out.update({f"TSCM_{k}": v for k, v in tscm.items()})
    return out


class MpRadiomicsExtractor(TransformerMixin, BaseEstimator):
    """Transformer from ``(VolumeStack, RoiMask)`` pairs to feature rows.

    Stateless; ``fit`` only validates parameters. ``feature_names_out_`` is
    set by ``transform``.
    """

    def __init__(self, G=64, B=64, d=1, angles=(0, 45, 90, 135), max_subset_size=None,
                 normalization="per-channel", n_jobs=1):
        self.G = G
        self.B = B
        self.d = d
        self.angles = angles
        self.max_subset_size = max_subset_size
        self.normalization = normalization
        self.n_jobs = n_jobs

    def _config(self):
        return PipelineConfig(
            G=self.G, B=self.B, d=self.d, angles=tuple(self.angles),
            max_subset_size=self.max_subset_size, normalization=self.normalization,
        )

    def fit(self, X=None, y=None):
        self._config()
        return self

    def transform(self, X):
        config = self._config()
        rows = [extract_features(stack, roi, config, self.n_jobs) for stack, roi in X]
        if not rows:
            return np.empty((0, 0))
        names = list(rows[0])
        for r in rows[1:]:
            if list(r) != names:
                raise InputError("studies yield different feature lists (channel names differ?)")
        self.feature_names_out_ = names
        return np.array([[r[k] for k in names] for r in rows])

    def get_feature_names_out(self, input_features=None):
        return np.asarray(self.feature_names_out_, dtype=object)


# -- feature files -----------------------------------------------------------

def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def format_feature_file(rows, header=None):
    rows = list(rows)
    if not rows:
        raise InputError("nothing to write")
    names = rows[0].names
    meta = {"format": FEATURE_FORMAT}
    meta.update(header or {})
    buf = io.StringIO()
    buf.write("# " + json.dumps(meta, sort_keys=True) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(list(ID_COLUMNS) + names)
    for r in rows:
        if r.names != names:
            raise InputError(f"study {r.study_id!r} has a different feature list")
        writer.writerow(
            [r.study_id, _fmt(r.label), _fmt(r.time_point)]
            + [repr(float(r.features[k])) for k in names]
        )
    return buf.getvalue()


def write_feature_file(path, rows, header=None):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_feature_file(rows, header), encoding="utf-8")
    return path


def read_feature_file(path):
    """Return ``(rows, header)`` from a feature file."""
    path = Path(path)
    if not path.is_file():
        raise InputError(f"missing feature file: {path}")
    lines = path.read_text(encoding="utf-8").splitlines()
    header = {}
    if lines and lines[0].startswith("#"):
        try:
            header = json.loads(lines[0][1:])
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: bad header line ({exc})") from None
        lines = lines[1:]
    reader = csv.reader(lines)
    try:
        columns = next(reader)
    except StopIteration:
        raise InputError(f"{path}: no column header") from None
    if tuple(columns[:3]) != ID_COLUMNS:
        raise InputError(f"{path}: first columns must be {ID_COLUMNS}")
    names = columns[3:]
    rows = []
    for rec in reader:
        if len(rec) != len(columns):
            raise InputError(f"{path}: row has {len(rec)} fields, expected {len(columns)}")
        try:
            values = [float(v) for v in rec[3:]]
        except ValueError as exc:
            raise InputError(f"{path}: {exc}") from None
        rows.append(
            StudyFeatureVector(
                study_id=rec[0],
                features=dict(zip(names, values)),
                label=rec[1] or None,
                time_point=int(rec[2]) if rec[2] else None,
            )
        )
    return rows, header


def read_cohort(directory):
    """All rows of every ``*.csv`` feature file in ``directory``, by file name."""
    directory = Path(directory)
    if not directory.is_dir():
        raise InputError(f"not a directory: {directory}")
    rows = []
    for path in sorted(directory.glob("*.csv")):
        rows.extend(read_feature_file(path)[0])
    ids = [r.study_id for r in rows]
    dup = sorted({i for i in ids if ids.count(i) > 1})
    if dup:
        raise InputError(f"{directory}: duplicate study ids {dup}")
    return rows


def extraction_header(config, stack):
    return {
        "config": config.to_dict(),
        "channels": stack.names,
        "tsfos_extensions": ["TSFOS_" + n for n in EXTENSION_FEATURES],
    }

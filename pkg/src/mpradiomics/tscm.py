"""Tissue signature co-occurrence matrices (TSCM) and Haralick features.

For a displacement ``(d, theta)`` every voxel pair ``(i, j)`` with both
voxels inside the ROI contributes, for every channel ``r``, one count at
``(level_i(r), level_j(r))``. The multi-channel TSCM is therefore the sum of
the per-channel gray-level co-occurrence matrices. Offsets are in-plane, per
axial slice:

=====  ==========
theta  (dx, dy)
=====  ==========
0      (d, 0)
45     (d, -d)
90     (0, -d)
135    (-d, -d)
=====  ==========

Matrices are symmetrized by adding the transpose and then normalized.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._validation import check_int, check_same_dims
from .exceptions import EmptyTscmError, InputError
from .volume_io import VOXEL_DTYPE, RoiMask, _write_raw

ANGLES = (0, 45, 90, 135)
_DIRECTIONS = {0: (1, 0), 45: (1, -1), 90: (0, -1), 135: (-1, -1)}

HARALICK_FEATURES = (
    "energy",
    "contrast",
    "correlation",
    "sum_of_squares_variance",
    "homogeneity1",
    "homogeneity2",
    "sum_average",
    "sum_variance",
    "sum_entropy",
    "entropy",
    "difference_variance",
    "difference_entropy",
    "imc1",
    "imc2",
    "max_correlation_coefficient",
    "autocorrelation",
    "dissimilarity",
    "cluster_shade",
    "cluster_prominence",
    "max_probability",
    "inverse_difference_normalized",
    "inverse_difference_moment_normalized",
)
SUMMARY_SUFFIXES = ("mean", "0", "45", "90", "135", "range")


def offset(d, theta):
    if theta not in _DIRECTIONS:
        raise InputError(f"angle must be one of {ANGLES}, got {theta!r}")
    ux, uy = _DIRECTIONS[theta]
    return ux * d, uy * d


@dataclass(frozen=True)
class Tscm:
    """``raw`` holds directed pair counts; ``matrix`` is ``raw + raw.T``."""

    raw: np.ndarray
    G: int
    d: int
    theta: int

    @property
    def matrix(self):
        return self.raw + self.raw.T

    @property
    def normalized(self):
        m = self.matrix
        return m / m.sum()

    @property
    def n_pairs(self):
        return int(self.raw.sum())


def _axis_slices(n, delta):
    """Anchor and partner slices along one axis for a shift of ``delta``."""
    if abs(delta) >= n:
        return None
    if delta >= 0:
        return slice(0, n - delta), slice(delta, n)
    return slice(-delta, n), slice(0, n + delta)


def _pair_codes(levels, inside, G, dx, dy):
    """Flattened ``(m - 1) * G + (n - 1)`` codes of every qualifying pair."""
    sx = _axis_slices(inside.shape[0], dx)
    sy = _axis_slices(inside.shape[1], dy)
    if sx is None or sy is None:
        return np.empty(0, dtype=np.int64)
    a = (sx[0], sy[0], slice(None))
    b = (sx[1], sy[1], slice(None))
    valid = inside[a] & inside[b]
    codes = [
        (lv[a][valid].astype(np.int64) - 1) * G + (lv[b][valid].astype(np.int64) - 1)
        for lv in levels
    ]
    return np.concatenate(codes)


def build_tscm(q, roi, d=1, theta=0):
    """Accumulate the multi-channel co-occurrence matrix for one displacement."""
    d = check_int(d, "d")
    check_same_dims(q.dims, roi.dims, "quantized stack and mask dims")
    dx, dy = offset(d, theta)
    codes = _pair_codes(q.levels, roi.inside, q.G, dx, dy)
    if codes.size == 0:
        raise EmptyTscmError(f"no voxel pair inside the ROI at d={d}, theta={theta}")
    raw = np.bincount(codes, minlength=q.G * q.G).reshape(q.G, q.G)
    return Tscm(raw=raw.astype(np.int64), G=q.G, d=d, theta=theta)


def _entropy_bits(p):
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p))) + 0.0


def haralick_features(t):
    """The 22 co-occurrence statistics of a TSCM or a probability matrix.

    Indices run from 1 to G. Entropies are in bits; IMC2 uses the
    natural-log convention so its value does not depend on the entropy base.
    Correlation is reported as 1 when either marginal has zero variance, and
    the maximal correlation coefficient is 0 when fewer than two levels are
    occupied.
    """
    if isinstance(t, Tscm):
        if t.n_pairs == 0:
            raise EmptyTscmError("co-occurrence matrix is empty")
        M = t.matrix.astype(np.float64)
    else:
        M = np.asarray(t, dtype=np.float64)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise InputError("co-occurrence matrix must be square")
    total = M.sum()
    if not total > 0:
        raise EmptyTscmError("co-occurrence matrix is empty")
    P = M / total
    G = P.shape[0]
    lv = np.arange(1, G + 1, dtype=np.float64)
    i = lv[:, None]
    j = lv[None, :]
    px = P.sum(axis=1)
    py = P.sum(axis=0)
    mux = float(np.sum(lv * px))
    muy = float(np.sum(lv * py))
    varx = float(np.sum((lv - mux) ** 2 * px))
    vary = float(np.sum((lv - muy) ** 2 * py))
    diff = np.abs(i - j)

    k_sum = np.arange(2, 2 * G + 1, dtype=np.float64)
    p_sum = np.bincount((i + j - 2).astype(np.int64).ravel(), weights=P.ravel(), minlength=2 * G - 1)
    k_diff = np.arange(G, dtype=np.float64)
    p_diff = np.bincount(diff.astype(np.int64).ravel(), weights=P.ravel(), minlength=G)

    sum_average = float(np.sum(k_sum * p_sum))
    diff_average = float(np.sum(k_diff * p_diff))

    hxy = _entropy_bits(P)
    hx = _entropy_bits(px)
    hy = _entropy_bits(py)
    pxpy = px[:, None] * py[None, :]
    nz = P > 0
    hxy1 = float(-np.sum(P[nz] * np.log2(pxpy[nz])))
    hxy2 = _entropy_bits(pxpy)

    if varx > 0 and vary > 0:
        correlation = float(np.sum((i - mux) * (j - muy) * P) / math.sqrt(varx * vary))
    else:
        correlation = 1.0
    hmax = max(hx, hy)
    imc1 = (hxy - hxy1) / hmax if hmax > 0 else 0.0
    imc2 = math.sqrt(max(0.0, 1.0 - math.exp(-2.0 * math.log(2.0) * (hxy2 - hxy))))

    rows = px > 0
    cols = py > 0
    if rows.sum() >= 2 and cols.sum() >= 2:
        B = P[np.ix_(rows, cols)] / np.sqrt(px[rows][:, None] * py[cols][None, :])
        sv = np.linalg.svd(B, compute_uv=False)
        mcc = float(sv[1])
    else:
        mcc = 0.0

    def weighted(w):
        # weights <= 1 applied to raw counts keep the ratio <= 1 exactly
        return float(np.sum(M * w) / total)

    cluster = i + j - mux - muy
    return {
        "energy": float(np.sum(P * P)),
        "contrast": float(np.sum(diff**2 * P)),
        "correlation": correlation,
        "sum_of_squares_variance": float(np.sum((i - mux) ** 2 * P)),
        "homogeneity1": weighted(1.0 / (1.0 + diff)),
        "homogeneity2": weighted(1.0 / (1.0 + diff**2)),
        "sum_average": sum_average,
        "sum_variance": float(np.sum((k_sum - sum_average) ** 2 * p_sum)),
        "sum_entropy": _entropy_bits(p_sum),
        "entropy": hxy,
        "difference_variance": float(np.sum((k_diff - diff_average) ** 2 * p_diff)),
        "difference_entropy": _entropy_bits(p_diff),
        "imc1": imc1,
        "imc2": imc2,
        "max_correlation_coefficient": mcc,
        "autocorrelation": float(np.sum(i * j * P)),
        "dissimilarity": float(np.sum(diff * P)),
        "cluster_shade": float(np.sum(cluster**3 * P)),
        "cluster_prominence": float(np.sum(cluster**4 * P)),
        "max_probability": float(P.max()),
        "inverse_difference_normalized": weighted(1.0 / (1.0 + diff / G)),
        "inverse_difference_moment_normalized": weighted(1.0 / (1.0 + diff**2 / G**2)),
    }


def _summarize(per_angle, angles):
    out = {}
    for name in HARALICK_FEATURES:
        vals = [per_angle[a][name] for a in angles]
        out[f"{name}_mean"] = sum(vals) / len(vals)
        for a, v in zip(angles, vals):
            out[f"{name}_{a}"] = v
        out[f"{name}_range"] = max(vals) - min(vals)
    return out


def directional_summary(q, roi, d=1, angles=ANGLES, n_jobs=1):
    """Haralick features per angle, their mean and their range.

    Keys look like ``contrast_mean``, ``contrast_0`` ... ``contrast_range``.
    """
    angles = tuple(angles)

    def _one(theta):
        return haralick_features(build_tscm(q, roi, d, theta))

    if n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            results = list(pool.map(_one, angles))
    else:
        results = [_one(a) for a in angles]
    return _summarize(dict(zip(angles, results)), angles)


# -- feature maps ----------------------------------------------------------

@dataclass(frozen=True)
class FeatureMapVolume:
    """Per-voxel feature values; NaN where undefined."""

    values: np.ndarray
    window_radius: int
    feature_name: str
    d: int = 1


def _resolve_feature(name):
    """Map a user feature name to ``(family, key)``."""
    bare = name[len("TSCM_"):] if name.startswith("TSCM_") else name
    if bare in HARALICK_FEATURES:
        return "tscm", bare
    if name in ("TSPM_entropy", "TSPM_uniformity", "TSPM_mutual_information"):
        return "tspm", name[len("TSPM_"):]
    if name.startswith("TSFOS_"):
        from .tsfos import FEATURE_NAMES

        if name[len("TSFOS_"):] in FEATURE_NAMES:
            return "tsfos", name[len("TSFOS_"):]
    raise InputError(f"unknown feature name {name!r}")


class _WindowTscm:
    """Pair codes per angle, indexed by anchor voxel, for fast window queries."""

    def __init__(self, q, roi, d, angles):
        self.G = q.G
        self.angles = angles
        self.inside = roi.inside
        self.per_angle = []
        nx, ny, _ = roi.dims
        for theta in angles:
            dx, dy = offset(d, theta)
            sx = _axis_slices(nx, dx)
            sy = _axis_slices(ny, dy)
            if sx is None or sy is None:
                self.per_angle.append(None)
                continue
            # anchor grid shaped like the full volume; invalid anchors masked
            valid = np.zeros(roi.dims, dtype=bool)
            codes = np.zeros((q.n_channels,) + roi.dims, dtype=np.int64)
            a = (sx[0], sy[0], slice(None))
            b = (sx[1], sy[1], slice(None))
            valid[a] = roi.inside[a] & roi.inside[b]
            for c, lv in enumerate(q.levels):
                codes[c][a] = (lv[a].astype(np.int64) - 1) * q.G + (lv[b].astype(np.int64) - 1)
            self.per_angle.append((dx, dy, valid, codes))

    def features(self, box, key):
        (x0, x1), (y0, y1), (z0, z1) = box
        vals = []
        for entry in self.per_angle:
            if entry is None:
                continue
            dx, dy, valid, codes = entry
            ax0, ax1 = max(x0, x0 - dx), min(x1, x1 - dx)
            ay0, ay1 = max(y0, y0 - dy), min(y1, y1 - dy)
            if ax1 < ax0 or ay1 < ay0:
                continue
            sl = (slice(ax0, ax1 + 1), slice(ay0, ay1 + 1), slice(z0, z1 + 1))
            sel = valid[sl]
            if not sel.any():
                continue
            picked = codes[(slice(None),) + sl][:, sel].ravel()
            raw = np.bincount(picked, minlength=self.G * self.G).reshape(self.G, self.G)
            vals.append(haralick_features(raw + raw.T)[key])
        return sum(vals) / len(vals) if vals else np.nan


def feature_map(q, roi, feature_name, window_radius=1, d=1, stack=None, B=None,
                normalization="per-channel", angles=ANGLES, n_jobs=1):
    """Evaluate one feature over a cubic window around every ROI voxel.

    The window is clipped to the volume and to the ROI. Co-occurrence
    features are the mean over the angles with at least one pair in the
    window. ``TSFOS_*`` features need the intensity ``stack``.
    """
    from .tsfos import build_tsh, tsfos_features
    from .tspm import build_tspm, tspm_entropy, tspm_mutual_information, tspm_uniformity

    window_radius = check_int(window_radius, "window_radius")
    d = check_int(d, "d")
    check_same_dims(q.dims, roi.dims, "quantized stack and mask dims")
    family, key = _resolve_feature(feature_name)
    if family == "tsfos" and stack is None:
        raise InputError("TSFOS feature maps need the intensity stack")
    if family == "tspm" and key == "mutual_information" and q.n_channels < 2:
        raise InputError("mutual information needs at least two channels")

    window = _WindowTscm(q, roi, d, tuple(angles)) if family == "tscm" else None
    dims = roi.dims
    w = window_radius
    positions = np.argwhere(roi.inside)

    def _value(pos):
        box = tuple((max(p - w, 0), min(p + w, n - 1)) for p, n in zip(pos, dims))
        sl = tuple(slice(lo, hi + 1) for lo, hi in box)
        sub_inside = roi.inside[sl]
        if sub_inside.sum() < 2:
            return np.nan
        if family == "tscm":
            return window.features(box, key)
        if family == "tspm":
            sig = q.levels[(slice(None),) + sl][:, sub_inside].T
            t = build_tspm(sig, q.G)
            if key == "entropy":
                return tspm_entropy(t)
            if key == "uniformity":
                return tspm_uniformity(t)
            return tspm_mutual_information(t)
        local = np.zeros(dims, dtype=bool)
        local[sl] = sub_inside
        tsh = build_tsh(stack, RoiMask(local), B or q.G, normalization)
        return tsfos_features(tsh)[key]

    if n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            results = list(pool.map(_value, positions))
    else:
        results = [_value(p) for p in positions]
    values = np.full(dims, np.nan)
    if len(positions):
        values[tuple(positions.T)] = results
    return FeatureMapVolume(values=values, window_radius=w, feature_name=feature_name, d=d)


def save_feature_map(fmap, path):
    """Write the map as raw float32 (x fastest) plus a ``.json`` sidecar."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    _write_raw(path, fmap.values, VOXEL_DTYPE)
    sidecar = path.with_suffix(path.suffix + ".json")
    sidecar.write_text(
        json.dumps(
            {
                "feature": fmap.feature_name,
                "window_radius": fmap.window_radius,
                "d": fmap.d,
                "dims": list(fmap.values.shape),
                "sentinel": "NaN",
            },
            indent=2,
        )
        + "\n",
        encoding="utf-8",
    )
    return path, sidecar

"""First-order statistics of the pooled multi-channel intensity histogram."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._validation import check_int, check_same_dims
from .exceptions import InputError

NORMALIZATIONS = ("per-channel", "pooled")

# Features beyond entropy/uniformity/energy; listed in export metadata.
EXTENSION_FEATURES = (
    "mean",
    "variance",
    "skewness",
    "kurtosis",
    "min_bin_fraction",
    "max_bin_fraction",
)
FEATURE_NAMES = ("entropy", "uniformity", "energy") + EXTENSION_FEATURES


@dataclass(frozen=True)
class TissueSignatureHistogram:
    bins: np.ndarray
    B: int
    range: tuple

    @property
    def total(self):
        return int(self.bins.sum())


def _pooled_values(stack, roi, normalization):
    inside = roi.inside
    parts = []
    for ch in stack.channels:
        v = ch.voxels[inside].astype(np.float64)
        if normalization == "per-channel":
            lo, hi = v.min(), v.max()
            v = (v - lo) / (hi - lo) if hi > lo else np.zeros_like(v)
        parts.append(v)
    return np.concatenate(parts)


def build_tsh(stack, roi, B, normalization="per-channel"):
    """Histogram of all in-ROI intensities of all channels into ``B`` bins.

    ``per-channel`` rescales each channel to ``[0, 1]`` over the ROI before
    pooling; ``pooled`` bins the raw intensities directly.
    """
    B = check_int(B, "B", minimum=2)
    if normalization not in NORMALIZATIONS:
        raise InputError(f"normalization must be one of {NORMALIZATIONS}, got {normalization!r}")
    check_same_dims(stack.dims, roi.dims, "stack and mask dims")
    values = _pooled_values(stack, roi, normalization)
    lo, hi = float(values.min()), float(values.max())
    if hi > lo:
        idx = np.floor(B * (values - lo) / (hi - lo)).astype(np.int64)
        idx = np.clip(idx, 0, B - 1)
    else:
        idx = np.zeros(values.shape, dtype=np.int64)
    bins = np.bincount(idx, minlength=B).astype(np.int64)
    return TissueSignatureHistogram(bins=bins, B=B, range=(lo, hi))


def tsfos_features(tsh, prefix=""):
    """Named statistics of a :class:`TissueSignatureHistogram`.

    Moments use bin centres ``(i + 0.5) / B`` on the unit axis. Skewness and
    kurtosis are 0 for a zero-variance histogram.
    """
    if tsh.total <= 0:
        raise InputError("histogram is empty")
    p = tsh.bins / tsh.total
    occupied = p[p > 0]
    centers = (np.arange(tsh.B) + 0.5) / tsh.B
    mean = float(np.sum(p * centers))
    dev = centers - mean
    var = float(np.sum(p * dev**2))
    if var > 0:
        skew = float(np.sum(p * dev**3) / var**1.5)
        kurt = float(np.sum(p * dev**4) / var**2)
    else:
        skew = kurt = 0.0
    uniformity = float(np.sum(occupied**2))
    feats = {
        "entropy": float(-np.sum(occupied * np.log2(occupied))) + 0.0,
        "uniformity": uniformity,
        "energy": uniformity,
        "mean": mean,
        "variance": var,
        "skewness": skew,
        "kurtosis": kurt,
        "min_bin_fraction": float(occupied.min()),
        "max_bin_fraction": float(occupied.max()),
    }
    return {prefix + k: feats[k] for k in FEATURE_NAMES}

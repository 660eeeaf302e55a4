"""Tissue signature probability matrix (TSPM) features.

The TSPM is the joint histogram of quantized tissue signatures over an ROI.
With ``G`` levels and ``N`` channels the dense matrix has ``G**N`` cells, so
it is stored sparsely: a lexicographically sorted array of occupied level
vectors and their integer counts. All information measures are in bits.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._validation import check_int
from .exceptions import InputError
from .volume_io import TissueSignature

_CODE_LIMIT = 2**62


@dataclass(frozen=True)
class Tspm:
    """Sparse joint histogram.

    ``keys`` is a ``(K, M)`` int array of occupied level vectors in
    lexicographic order, ``freq`` the matching ``(K,)`` int64 counts and
    ``channel_subset`` the ``M`` channel indices the axes refer to.
    """

    keys: np.ndarray
    freq: np.ndarray
    G: int
    channel_subset: tuple

    @property
    def total(self):
        return int(self.freq.sum())

    @property
    def counts(self):
        return {tuple(int(v) for v in k): int(c) for k, c in zip(self.keys, self.freq)}

    @property
    def n_occupied(self):
        return len(self.freq)

    def probabilities(self):
        return self.freq / self.total


def _as_matrix(signatures):
    if isinstance(signatures, np.ndarray):
        sig = signatures
    else:
        rows = [s.levels if isinstance(s, TissueSignature) else s for s in signatures]
        sig = np.asarray(rows)
    if sig.ndim != 2 or sig.shape[0] == 0:
        raise InputError("need a non-empty collection of signatures")
    return sig.astype(np.int64, copy=False)


def _encode(cols, G):
    """Pack each row of ``cols`` (levels 1..G) into one integer preserving lex order."""
    code = np.zeros(cols.shape[0], dtype=np.int64)
    for j in range(cols.shape[1]):
        code = code * G + (cols[:, j] - 1)
    return code


def _decode(codes, G, m):
    keys = np.empty((codes.size, m), dtype=np.int64)
    rest = codes.copy()
    for j in range(m - 1, -1, -1):
        keys[:, j] = rest % G + 1
        rest //= G
    return keys


def _aggregate(cols, weights, G):
    """Sum ``weights`` over identical rows of ``cols``; return sorted keys and sums."""
    m = cols.shape[1]
    if G**m < _CODE_LIMIT:
        codes = _encode(cols, G)
        order = np.argsort(codes, kind="stable")
        codes = codes[order]
        starts = np.flatnonzero(np.r_[True, codes[1:] != codes[:-1]])
        sums = np.add.reduceat(weights[order], starts)
        return _decode(codes[starts], G, m), sums.astype(np.int64)
    keys, inverse = np.unique(cols, axis=0, return_inverse=True)
    sums = np.zeros(len(keys), dtype=np.int64)
    np.add.at(sums, inverse.ravel(), weights)
    return keys.astype(np.int64), sums


def build_tspm(signatures, G, subset=None):
    """Count how often each (restricted) tissue signature occurs.

    ``signatures`` is a list of :class:`TissueSignature` (or level tuples) or
    an ``(n, N)`` integer array; ``subset`` picks the channels, in strictly
    increasing order, that span the matrix (default: all).
    """
    G = check_int(G, "G", minimum=2)
    sig = _as_matrix(signatures)
    n_channels = sig.shape[1]
    subset = tuple(range(n_channels)) if subset is None else tuple(int(c) for c in subset)
    if not subset:
        raise InputError("subset must not be empty")
    if any(c < 0 or c >= n_channels for c in subset):
        raise InputError(f"subset {subset} out of range for {n_channels} channels")
    if any(b <= a for a, b in zip(subset, subset[1:])):
        raise InputError(f"subset {subset} must be strictly increasing")
    cols = sig[:, list(subset)]
    if cols.min() < 1 or cols.max() > G:
        raise InputError(f"signature levels must lie in [1, {G}]")
    keys, freq = _aggregate(cols, np.ones(len(cols), dtype=np.int64), G)
    return Tspm(keys=keys, freq=freq, G=G, channel_subset=subset)


def marginalize(t, subset):
    """Sum ``t`` over every axis not in ``subset`` (global channel indices)."""
    subset = tuple(sorted(int(c) for c in subset))
    if not subset or not set(subset) <= set(t.channel_subset):
        raise InputError(f"subset {subset} is not contained in {t.channel_subset}")
    if subset == t.channel_subset:
        return t
    cols = [t.channel_subset.index(c) for c in subset]
    keys, freq = _aggregate(t.keys[:, cols], t.freq, t.G)
    return Tspm(keys=keys, freq=freq, G=t.G, channel_subset=subset)


def tspm_entropy(t):
    """Shannon entropy in bits, never above ``log2`` of the occupied cell count."""
    p = t.probabilities()
    h = float(-np.sum(p * np.log2(p))) + 0.0
    # round-off can push a uniform table one ulp past its exact maximum
    return min(h, math.log2(len(p)))


def tspm_uniformity(t):
    p = t.probabilities()
    return float(np.sum(p * p))


def _interaction_information(entropy_of, subset):
    """Inclusion-exclusion over all non-empty sub-subsets of ``subset``."""
    total = 0.0
    for size in range(1, len(subset) + 1):
        sign = 1.0 if size % 2 else -1.0
        for sub in itertools.combinations(subset, size):
            total += sign * entropy_of(sub)
    return total


def tspm_mutual_information(t):
    """Multivariate (interaction) information of the axes of ``t``.

    For two channels this is ``H(X1) + H(X2) - H(X1, X2)``. With more
    channels the value can be negative.
    """
    if len(t.channel_subset) < 2:
        raise InputError("mutual information needs at least two channels")
    return _interaction_information(
        lambda sub: tspm_entropy(marginalize(t, sub)), t.channel_subset
    )


@dataclass(frozen=True)
class SubsetFeatures:
    entropy: float
    uniformity: float
    mutual_information: float | None


@dataclass(frozen=True)
class SubsetFeatureTable:
    """Features per channel subset, in size-then-lexicographic order."""

    entries: dict
    names: tuple = ()

    def descriptor(self, subset):
        if self.names:
            return "+".join(self.names[c] for c in subset)
        return "+".join(str(c) for c in subset)

    def as_features(self, prefix="TSPM_"):
        out = {}
        for subset, feats in self.entries.items():
            desc = self.descriptor(subset)
            out[f"{prefix}entropy_{desc}"] = feats.entropy
            out[f"{prefix}uniformity_{desc}"] = feats.uniformity
            if feats.mutual_information is not None:
                out[f"{prefix}mutual_information_{desc}"] = feats.mutual_information
        return out


def channel_subsets(n_channels, max_subset_size):
    return [
        sub
        for size in range(1, max_subset_size + 1)
        for sub in itertools.combinations(range(n_channels), size)
    ]


def subset_features(signatures, G, max_subset_size=None, names=(), n_jobs=1):
    """Entropy, uniformity and (for two or more channels) mutual information
    of every channel subset up to ``max_subset_size`` channels.

    One full joint histogram is built; every subset is a marginal of it.
    """
    sig = _as_matrix(signatures)
    n_channels = sig.shape[1]
    if max_subset_size is None:
        max_subset_size = n_channels
    max_subset_size = check_int(max_subset_size, "max_subset_size")
    if max_subset_size > n_channels:
        raise InputError(
            f"max_subset_size={max_subset_size} exceeds channel count {n_channels}"
        )
    full = build_tspm(sig, G)
    subsets = channel_subsets(n_channels, max_subset_size)

    def _eval(sub):
        m = marginalize(full, sub)
        return tspm_entropy(m), tspm_uniformity(m)

    if n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            results = list(pool.map(_eval, subsets))
    else:
        results = [_eval(sub) for sub in subsets]
    entropy = {sub: r[0] for sub, r in zip(subsets, results)}

    entries = {}
    for sub, (h, u) in zip(subsets, results):
        mi = _interaction_information(entropy.__getitem__, sub) if len(sub) >= 2 else None
        entries[sub] = SubsetFeatures(entropy=h, uniformity=u, mutual_information=mi)
    return SubsetFeatureTable(entries=entries, names=tuple(names))

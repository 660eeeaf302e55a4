"""Multi-channel volumes, ROI masks and gray-level quantization.

On-disk layout
--------------
A stack is described by a JSON manifest::

    {"dims": [nx, ny, nz], "spacing": [sx, sy, sz],
     "channels": [{"name": "T1", "path": "t1.raw"}, ...]}

Each channel file holds ``nx*ny*nz`` little-endian float32 values in raster
order (x fastest, then y, then z). A mask file uses the same order with one
unsigned byte per voxel; any nonzero byte marks an inside voxel. Paths are
relative to the manifest directory. Optional manifest keys ``study_id``,
``label`` and ``time_point`` are carried through as metadata.

In memory every volume is a numpy array indexed ``[x, y, z]``.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._validation import check_dims, check_int, check_same_dims
from .exceptions import EmptyMaskError, InputError

VOXEL_DTYPE = np.dtype("<f4")
MASK_DTYPE = np.dtype("u1")
OUTSIDE = 0  # level stored for voxels outside the ROI


def _frozen(array):
    array = np.asarray(array)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class Channel:
    name: str
    voxels: np.ndarray


@dataclass(frozen=True)
class VolumeStack:
    """N co-registered scalar volumes on one voxel grid."""

    channels: tuple
    dims: tuple
    spacing: tuple = (1.0, 1.0, 1.0)
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        dims = check_dims(self.dims)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "spacing", tuple(float(s) for s in self.spacing))
        if not self.channels:
            raise InputError("a stack needs at least one channel")
        channels = []
        seen = set()
        for ch in self.channels:
            if not isinstance(ch, Channel):
                ch = Channel(*ch)
            if not ch.name or not isinstance(ch.name, str):
                raise InputError("channel names must be non-empty strings")
            if ch.name in seen:
                raise InputError(f"duplicate channel name {ch.name!r}")
            seen.add(ch.name)
            vox = np.asarray(ch.voxels)
            check_same_dims(vox.shape, dims, f"channel {ch.name!r} shape and stack dims")
            if not np.all(np.isfinite(vox)):
                raise InputError(f"channel {ch.name!r} contains non-finite voxels")
            channels.append(Channel(ch.name, _frozen(vox)))
        object.__setattr__(self, "channels", tuple(channels))

    @property
    def n_channels(self):
        return len(self.channels)

    @property
    def names(self):
        return [ch.name for ch in self.channels]

    def as_array(self):
        """Return a float64 array of shape ``(N, nx, ny, nz)``."""
        return np.stack([ch.voxels for ch in self.channels]).astype(np.float64)

    @classmethod
    def from_arrays(cls, arrays, names=None, spacing=(1.0, 1.0, 1.0), metadata=None):
        arrays = [np.asarray(a) for a in arrays]
        arrays = [a if a.dtype.kind == "f" else a.astype(np.float64) for a in arrays]
        if names is None:
            names = [f"ch{k}" for k in range(len(arrays))]
        return cls(
            channels=tuple(Channel(n, a) for n, a in zip(names, arrays)),
            dims=arrays[0].shape,
            spacing=spacing,
            metadata=dict(metadata or {}),
        )


@dataclass(frozen=True)
class RoiMask:
    inside: np.ndarray
    label: str = "roi"

    def __post_init__(self):
        inside = np.asarray(self.inside).astype(bool)
        check_dims(inside.shape, "mask dims")
        if not inside.any():
            raise EmptyMaskError(f"mask {self.label!r} has no inside voxels")
        object.__setattr__(self, "inside", _frozen(inside))

    @property
    def dims(self):
        return self.inside.shape

    @property
    def count(self):
        return int(self.inside.sum())


@dataclass(frozen=True)
class QuantizedStack:
    """Per-channel ROI levels in ``1..G``; ``OUTSIDE`` (0) elsewhere.

    ``levels`` has shape ``(N, nx, ny, nz)``.
    """

    levels: np.ndarray
    G: int
    per_channel_range: tuple
    names: tuple = ()

    @property
    def dims(self):
        return self.levels.shape[1:]

    @property
    def n_channels(self):
        return self.levels.shape[0]


@dataclass(frozen=True)
class TissueSignature:
    position: tuple
    levels: tuple


# -- file IO ---------------------------------------------------------------

def _read_raw(path, dtype, dims):
    path = Path(path)
    if not path.is_file():
        raise InputError(f"missing volume file: {path}")
    expected = int(np.prod(dims)) * dtype.itemsize
    size = path.stat().st_size
    if size != expected:
        raise InputError(
            f"{path}: file holds {size} bytes, dims {tuple(dims)} need {expected}"
        )
    flat = np.fromfile(path, dtype=dtype)
    return flat.reshape(dims, order="F")


def _write_raw(path, array, dtype):
    data = np.asarray(array).astype(dtype).ravel(order="F")
    with open(path, "wb") as fh:
        fh.write(data.tobytes())


def load_stack(manifest_path):
    """Read a stack manifest and its channel files."""
    manifest_path = Path(manifest_path)
    if not manifest_path.is_file():
        raise InputError(f"missing manifest: {manifest_path}")
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InputError(f"{manifest_path}: invalid JSON ({exc})") from None
    for key in ("dims", "channels"):
        if key not in manifest:
            raise InputError(f"{manifest_path}: manifest lacks {key!r}")
    dims = check_dims(manifest["dims"])
    base = manifest_path.parent
    channels = []
    for entry in manifest["channels"]:
        if "name" not in entry or "path" not in entry:
            raise InputError(f"{manifest_path}: channel entries need 'name' and 'path'")
        voxels = _read_raw(base / entry["path"], VOXEL_DTYPE, dims)
        channels.append(Channel(entry["name"], voxels))
    metadata = {k: manifest[k] for k in ("study_id", "label", "time_point") if k in manifest}
    return VolumeStack(
        channels=tuple(channels),
        dims=dims,
        spacing=tuple(manifest.get("spacing", (1.0, 1.0, 1.0))),
        metadata=metadata,
    )


def save_stack(stack, manifest_path):
    """Write ``stack`` as a manifest plus one ``.raw`` file per channel.

    Voxels are stored as float32, so a float32 stack round-trips bit-exactly.
    """
    manifest_path = Path(manifest_path)
    manifest_path.parent.mkdir(parents=True, exist_ok=True)
    entries = []
    for k, ch in enumerate(stack.channels):
        fname = f"channel{k:02d}_{_safe(ch.name)}.raw"
        _write_raw(manifest_path.parent / fname, ch.voxels, VOXEL_DTYPE)
        entries.append({"name": ch.name, "path": fname})
    manifest = {
        "dims": list(stack.dims),
        "spacing": list(stack.spacing),
        "channels": entries,
    }
    manifest.update(stack.metadata)
    manifest_path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return manifest_path


def _safe(name):
    return "".join(c if c.isalnum() or c in "-_" else "_" for c in name)


def load_mask(path, expected_dims, label=None):
    expected_dims = check_dims(expected_dims, "expected_dims")
    inside = _read_raw(path, MASK_DTYPE, expected_dims) != 0
    return RoiMask(inside, label=label or os.path.basename(str(path)))


def save_mask(mask, path):
    inside = mask.inside if isinstance(mask, RoiMask) else np.asarray(mask, dtype=bool)
    _write_raw(path, inside, MASK_DTYPE)
    return Path(path)


# -- quantization ----------------------------------------------------------

def quantize(stack, roi, G):
    """Bin each channel's ROI intensities into ``G`` equal-width levels.

    The range of each channel is taken from in-ROI voxels only. A value ``v``
    maps to ``floor(G * (v - min) / (max - min)) + 1`` clipped to ``[1, G]``;
    a channel that is constant inside the ROI maps to level 1.
    """
    G = check_int(G, "G", minimum=2)
    check_same_dims(stack.dims, roi.dims, "stack and mask dims")
    inside = roi.inside
    levels = np.zeros((stack.n_channels,) + stack.dims, dtype=np.int32)
    ranges = []
    for k, ch in enumerate(stack.channels):
        values = ch.voxels[inside].astype(np.float64)
        lo, hi = float(values.min()), float(values.max())
        ranges.append((lo, hi))
        if hi > lo:
            # numerator first so scaled copies of a channel bin identically
            lv = np.floor(G * (values - lo) / (hi - lo)).astype(np.int64) + 1
            lv = np.clip(lv, 1, G)
        else:
            lv = np.ones(values.shape, dtype=np.int64)
        levels[k][inside] = lv
    return QuantizedStack(
        levels=_frozen(levels),
        G=G,
        per_channel_range=tuple(ranges),
        names=tuple(stack.names),
    )


def roi_indices(roi):
    """Flat raster (x-fastest) indices of the inside voxels."""
    return np.flatnonzero(roi.inside.ravel(order="F"))


def signature_array(q, roi):
    """In-ROI signatures as an ``(n_voxels, N)`` integer array in raster order."""
    check_same_dims(q.dims, roi.dims, "quantized stack and mask dims")
    idx = roi_indices(roi)
    flat = q.levels.reshape((q.n_channels, -1), order="F")
    return np.ascontiguousarray(flat[:, idx].T)


def extract_signatures(q, roi):
    """One :class:`TissueSignature` per in-ROI voxel, raster order."""
    sig = signature_array(q, roi)
    pos = np.unravel_index(roi_indices(roi), roi.dims, order="F")
    return [
        TissueSignature(position=(int(x), int(y), int(z)), levels=tuple(int(v) for v in row))
        for x, y, z, row in zip(*pos, sig)
    ]

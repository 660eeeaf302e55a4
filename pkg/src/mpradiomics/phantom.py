"""Synthetic multi-channel tumour phantoms.

Random numbers come from numpy's PCG64 bit generator seeded with the
phantom seed, so volumes are bit-identical across runs and platforms.

Every phantom is an ellipsoidal ROI inside a smooth background field.
``smooth`` phantoms add only low-amplitude white noise. ``heterogeneous``
phantoms draw the same smooth component first and then add multi-scale
speckle and a dark core, so they always carry more in-ROI variance than
the smooth phantom with the same seed.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.ndimage import gaussian_filter

from ._validation import check_dims, check_int
from .exceptions import InputError
from .volume_io import RoiMask, VolumeStack, save_mask, save_stack

TEXTURES = ("smooth", "heterogeneous")
CHANNEL_NAMES = ("T1", "T2", "FLAIR", "ADC", "PWI")
AMPLITUDE = 10.0
SPECKLE_SCALES = (0.7, 1.5, 3.0)


@dataclass(frozen=True)
class PhantomSpec:
    label: str
    dims: tuple = (32, 32, 32)
    n_channels: int = 3
    texture: str = "smooth"
    noise: float = 0.1
    seed: int = 0
    study_id: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "dims", check_dims(self.dims))
        check_int(self.n_channels, "n_channels")
        check_int(self.seed, "seed", minimum=0)
        if self.texture not in TEXTURES:
            raise InputError(f"texture must be one of {TEXTURES}, got {self.texture!r}")
        if not self.noise >= 0:
            raise InputError("noise must be non-negative")


def channel_names(n):
    if n <= len(CHANNEL_NAMES):
        return list(CHANNEL_NAMES[:n])
    return [f"ch{k}" for k in range(n)]


def _unit(field):
    sd = field.std()
    return (field - field.mean()) / sd if sd > 0 else field - field.mean()


def _ellipsoid(dims, scale):
    grids = np.meshgrid(*[np.arange(n, dtype=np.float64) for n in dims], indexing="ij")
    r2 = np.zeros(dims)
    for g, n in zip(grids, dims):
        half = (n - 1) / 2.0
        radius = max(scale * n / 2.0, 0.5)
        r2 += ((g - half) / radius) ** 2
    return r2 <= 1.0


def generate_phantom(spec):
    """Return ``(VolumeStack, RoiMask)`` for ``spec``."""
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    dims = spec.dims
    smooth_sigma = max(dims) / 6.0
    anatomy = _unit(gaussian_filter(rng.standard_normal(dims), smooth_sigma, mode="wrap"))
    names = channel_names(spec.n_channels)
    gains = rng.uniform(0.5, 1.5, spec.n_channels)
    channels = []
    for c in range(spec.n_channels):
        own = _unit(gaussian_filter(rng.standard_normal(dims), smooth_sigma, mode="wrap"))
        white = rng.standard_normal(dims)
        channels.append(
            100.0 * (c + 1) + AMPLITUDE * gains[c] * (anatomy + 0.5 * own) + spec.noise * AMPLITUDE * white
        )

    roi = _ellipsoid(dims, 0.8)
    if spec.texture == "heterogeneous":
        core = _ellipsoid(dims, 0.35)
        for c in range(spec.n_channels):
            speckle = sum(
                _unit(gaussian_filter(rng.standard_normal(dims), s, mode="wrap")) for s in SPECKLE_SCALES
            )
            channels[c] = channels[c] + 1.5 * AMPLITUDE * speckle - 2.0 * AMPLITUDE * core

    stack = VolumeStack.from_arrays(
        [ch.astype(np.float32) for ch in channels],
        names=names,
        metadata={"study_id": spec.study_id or f"{spec.label}-{spec.seed}", "label": spec.label},
    )
    return stack, RoiMask(roi, label=spec.study_id or f"{spec.label}-{spec.seed}")


def write_phantom(spec, out_dir):
    """Write ``manifest.json``, channel files and ``mask.raw`` into ``out_dir``."""
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise InputError(f"cannot create {out_dir}: {exc}") from None
    stack, roi = generate_phantom(spec)
    manifest = save_stack(stack, out_dir / "manifest.json")
    mask = save_mask(roi, out_dir / "mask.raw")
    return manifest, mask

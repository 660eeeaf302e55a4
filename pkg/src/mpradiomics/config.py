"""Pipeline configuration and presets."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields, replace

from ._validation import check_int, check_positive_float
from .exceptions import InputError
from .tscm import ANGLES
from .tsfos import NORMALIZATIONS


@dataclass(frozen=True)
class PipelineConfig:
    G: int = 64
    B: int = 64
    d: int = 1
    angles: tuple = ANGLES
    max_subset_size: int | None = None  # None: all channels
    isomap_k: int = 5
    isomap_dim: int = 2
    svm_C: float = 1.0
    seed: int = 0
    normalization: str = "per-channel"

    def __post_init__(self):
        check_int(self.G, "G", minimum=2)
        check_int(self.B, "B", minimum=2)
        check_int(self.d, "d")
        angles = tuple(int(a) for a in self.angles)
        if not angles or any(a not in ANGLES for a in angles) or len(set(angles)) != len(angles):
            raise InputError(f"angles must be distinct values from {ANGLES}, got {self.angles}")
        object.__setattr__(self, "angles", angles)
        if self.max_subset_size is not None:
            check_int(self.max_subset_size, "max_subset_size")
        check_int(self.isomap_k, "isomap_k")
        check_int(self.isomap_dim, "isomap_dim")
        object.__setattr__(self, "svm_C", check_positive_float(self.svm_C, "svm_C"))
        check_int(self.seed, "seed", minimum=0)
        if self.normalization not in NORMALIZATIONS:
            raise InputError(f"normalization must be one of {NORMALIZATIONS}")

    def to_dict(self):
        out = asdict(self)
        out["angles"] = list(self.angles)
        return out

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise InputError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_json(cls, text):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"invalid config JSON: {exc}") from None
        if not isinstance(data, dict):
            raise InputError("config JSON must be an object")
        return cls.from_dict(data)

    def with_updates(self, **changes):
        return replace(self, **changes)


PRESETS = {
    "grading": PipelineConfig(G=64, B=64),
    "progression": PipelineConfig(G=16, B=16),
}


def preset(name):
    try:
        return PRESETS[name]
    except KeyError:
        raise InputError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None

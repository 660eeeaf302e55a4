import pytest
from hypothesis import given
from hypothesis import strategies as st

from mpradiomics.config import PRESETS, PipelineConfig, preset
from mpradiomics.exceptions import InputError


def test_presets():
    assert (preset("grading").G, preset("grading").B) == (64, 64)
    assert (preset("progression").G, preset("progression").B) == (16, 16)
    assert preset("grading").angles == (0, 45, 90, 135) and preset("grading").d == 1
    with pytest.raises(InputError):
        preset("staging")


@given(
    G=st.integers(2, 256),
    B=st.integers(2, 256),
    d=st.integers(1, 4),
    angles=st.lists(st.sampled_from([0, 45, 90, 135]), min_size=1, max_size=4, unique=True),
    max_subset_size=st.none() | st.integers(1, 5),
    svm_C=st.floats(1e-3, 1e3),
    seed=st.integers(0, 2**32),
    normalization=st.sampled_from(["per-channel", "pooled"]),
)
def test_json_round_trip(**kw):
    cfg = PipelineConfig(**kw)
    assert PipelineConfig.from_json(cfg.to_json()) == cfg


@pytest.mark.parametrize(
    "bad",
    [{"G": 1}, {"B": 0}, {"d": 0}, {"angles": [30]}, {"angles": []}, {"angles": [0, 0]},
     {"svm_C": 0}, {"isomap_k": 0}, {"seed": -1}, {"normalization": "z"}, {"max_subset_size": 0}],
)
def test_invalid_values(bad):
    with pytest.raises(InputError):
        PipelineConfig(**bad)


def test_from_json_errors():
    with pytest.raises(InputError):
        PipelineConfig.from_json("{not json")
    with pytest.raises(InputError):
        PipelineConfig.from_json("[1, 2]")
    with pytest.raises(InputError):
        PipelineConfig.from_dict({"G": 8, "colour": "red"})


def test_with_updates_revalidates():
    assert PRESETS["grading"].with_updates(seed=3).seed == 3
    with pytest.raises(InputError):
        PRESETS["grading"].with_updates(G=0)

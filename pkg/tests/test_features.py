import numpy as np
import pytest
from conftest import full_mask, make_stack

from mpradiomics.config import PipelineConfig
from mpradiomics.exceptions import InputError
from mpradiomics.features import (
    MpRadiomicsExtractor,
    extract_features,
    format_feature_file,
    read_cohort,
    read_feature_file,
    write_feature_file,
)
from mpradiomics.phantom import PhantomSpec, generate_phantom
from mpradiomics.study import StudyFeatureVector, cohort_matrix
from mpradiomics.tscm import HARALICK_FEATURES, SUMMARY_SUFFIXES
from mpradiomics.tsfos import FEATURE_NAMES

SMALL = PipelineConfig(G=8, B=8)


def test_constant_phantom_features():
    stack = make_stack(np.full((5, 5, 3), 2.0), np.full((5, 5, 3), 9.0), names=["T1", "T2"])
    f = extract_features(stack, full_mask((5, 5, 3)), SMALL)
    for k, v in f.items():
        if k.startswith("TSPM_entropy") or k == "TSFOS_entropy":
            assert v == 0.0
        if k.startswith("TSPM_uniformity") or k == "TSFOS_uniformity":
            assert v == 1.0
    assert f["TSCM_contrast_mean"] == 0.0


def test_column_order_is_frozen():
    stack, roi = generate_phantom(PhantomSpec("s", dims=(10, 10, 6), n_channels=2))
    names = list(extract_features(stack, roi, SMALL))
    tspm = [n for n in names if n.startswith("TSPM_")]
    assert tspm == [
        "TSPM_entropy_T1", "TSPM_uniformity_T1", "TSPM_entropy_T2", "TSPM_uniformity_T2",
        "TSPM_entropy_T1+T2", "TSPM_uniformity_T1+T2", "TSPM_mutual_information_T1+T2",
    ]
    assert names[len(tspm):len(tspm) + len(FEATURE_NAMES)] == ["TSFOS_" + n for n in FEATURE_NAMES]
    tscm = names[len(tspm) + len(FEATURE_NAMES):]
    assert len(tscm) == len(HARALICK_FEATURES) * len(SUMMARY_SUFFIXES)
    assert tscm[0] == "TSCM_energy_mean" and tscm[-1] == "TSCM_inverse_difference_moment_normalized_range"


def test_threads_do_not_change_values():
    stack, roi = generate_phantom(PhantomSpec("h", dims=(12, 12, 6), n_channels=3, texture="heterogeneous"))
    assert extract_features(stack, roi, SMALL, n_jobs=1) == extract_features(stack, roi, SMALL, n_jobs=8)


def test_extractor_estimator():
    pairs = [generate_phantom(PhantomSpec("s", dims=(8, 8, 4), seed=k)) for k in range(3)]
    ext = MpRadiomicsExtractor(G=8, B=8).fit()
    X = ext.transform(pairs)
    assert X.shape == (3, len(ext.get_feature_names_out()))
    assert ext.get_params()["G"] == 8
    with pytest.raises(InputError):
        MpRadiomicsExtractor(G=1).fit()


def test_feature_file_round_trip(tmp_path):
    rows = [
        StudyFeatureVector("a", {"x": 0.1, "y": 1e-300}, "smooth", 1),
        StudyFeatureVector("b", {"x": 1 / 3, "y": -2.5}, None, None),
    ]
    path = write_feature_file(tmp_path / "f.csv", rows, {"config": SMALL.to_dict()})
    back, header = read_feature_file(path)
    assert back == rows
    assert header["format"] == "mpradiomics-features/1" and header["config"]["G"] == 8
    assert format_feature_file(back, header) == path.read_text()


def test_feature_file_errors(tmp_path):
    with pytest.raises(InputError):
        read_feature_file(tmp_path / "missing.csv")
    bad = tmp_path / "bad.csv"
    bad.write_text("id,x\n1,2\n")
    with pytest.raises(InputError):
        read_feature_file(bad)
    with pytest.raises(InputError):
        write_feature_file(tmp_path / "mixed.csv",
                           [StudyFeatureVector("a", {"x": 1.0}), StudyFeatureVector("b", {"y": 1.0})])


def test_read_cohort(tmp_path):
    for sid in ("b", "a"):
        write_feature_file(tmp_path / f"{sid}.csv", [StudyFeatureVector(sid, {"x": 1.0}, "l")])
    rows = read_cohort(tmp_path)
    assert [r.study_id for r in rows] == ["a", "b"]
    write_feature_file(tmp_path / "c.csv", [StudyFeatureVector("a", {"x": 2.0}, "l")])
    with pytest.raises(InputError):
        read_cohort(tmp_path)
    with pytest.raises(InputError):
        read_cohort(tmp_path / "nope")
    with pytest.raises(InputError):
        cohort_matrix([StudyFeatureVector("a", {"x": 1.0}), StudyFeatureVector("b", {"y": 1.0})])

"""Multiparametric radiomics: tissue-signature texture features and IsoSVM."""

__version__ = "0.1.0"

from .config import PRESETS, PipelineConfig
from .exceptions import ComputationError, InputError, MpRadiomicsError
from .features import MpRadiomicsExtractor, extract_features
from .isomap import FeatureStandardizer, Isomap, fit_isomap, standardize
from .isosvm import IsoSVM, loocv_isosvm
from .phantom import PhantomSpec, generate_phantom
from .stats import confusion_metrics, delta_features, group_compare, roc_auc, summarize, welch_t_test
from .study import StudyFeatureVector
from .svm import LinearSVM, train_linear_svm
from .tscm import build_tscm, directional_summary, feature_map, haralick_features
from .tsfos import build_tsh, tsfos_features
from .tspm import (
    build_tspm,
    marginalize,
    subset_features,
    tspm_entropy,
    tspm_mutual_information,
    tspm_uniformity,
)
from .volume_io import (
    QuantizedStack,
    RoiMask,
    TissueSignature,
    VolumeStack,
    extract_signatures,
    load_mask,
    load_stack,
    quantize,
    save_mask,
    save_stack,
)

__all__ = [
    "build_tscm",
    "build_tsh",
    "build_tspm",
    "ComputationError",
    "confusion_metrics",
    "delta_features",
    "directional_summary",
    "extract_features",
    "extract_signatures",
    "feature_map",
    "FeatureStandardizer",
    "fit_isomap",
    "generate_phantom",
    "group_compare",
    "haralick_features",
    "InputError",
    "Isomap",
    "IsoSVM",
    "LinearSVM",
    "load_mask",
    "load_stack",
    "loocv_isosvm",
    "marginalize",
    "MpRadiomicsError",
    "MpRadiomicsExtractor",
    "PhantomSpec",
    "PipelineConfig",
    "PRESETS",
    "quantize",
    "QuantizedStack",
    "roc_auc",
    "RoiMask",
    "save_mask",
    "save_stack",
    "standardize",
    "StudyFeatureVector",
    "subset_features",
    "summarize",
    "TissueSignature",
    "train_linear_svm",
    "tsfos_features",
    "tspm_entropy",
    "tspm_mutual_information",
    "tspm_uniformity",
    "VolumeStack",
    "welch_t_test",
]

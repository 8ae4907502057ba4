"""Representation alignment diagnostics.

Computes neighborhood-based kernel alignment between paired feature sets,
its aggregate under semantic-preserving input transforms, and layer-wise
alignment profiles, with a bit-exact feature file format, deterministic
synthetic pipelines, and a brute-force reference implementation for
verifying the fast path.
"""

__version__ = "0.1.0"

from .backend import BACKEND, HAVE_NUMBA, worker_count
from .errors import (
    AllFiltered,
    BadMagic,
    ConditionSetMismatch,
    DegenerateMask,
    EmptyLayerList,
    KTooLarge,
    MissingIdentityCondition,
    NonFiniteValue,
    OnlyClsToken,
    RepalignError,
    ScaleTooSmall,
    ShapeMismatch,
    SingleSample,
    TruncatedPayload,
    ValidationError,
    VersionMismatch,
    ZeroBaseline,
)
from .features import (
    FeatureMeta,
    FeatureSet,
    OutlierPolicy,
    TokenFeatureSet,
    filter_outliers,
    normalize_channels,
    pool_tokens,
)
from .kernels import (
    CknnaScore,
    KernelMatrix,
    KnnSets,
    MutualKnnMask,
    center,
    cknna,
    cknna_features,
    gram,
    knn_sets,
    mutual_mask,
)
from .oracle import ORACLE_MAX_N, cknna_oracle
from .pipeline import Settings, ensure_pooled, preprocess_pair, score_pair
from .profiles import LayerProfile, layer_profile
from .rafs import load_csv, load_features, read_rafs, write_rafs
from .report import (
    AlignmentReport,
    canonical_json,
    emit_report,
    file_digest,
    parse_report,
    report_cknna,
    report_layer_profile,
    report_se_cknna,
)
from .rng import (
    counter_hash,
    derive_seed,
    norm_ppf,
    normal_field,
    standard_normals,
    uniform01,
    uniform_field,
)
from .secknna import SeCknnaResult, relative_change, se_cknna
from .selfcheck import SWEEP_TOLERANCE, SweepInstance, equivalence_sweep, max_delta
from .toy import extract_corpus, model_seeds, synth_corpus, synth_image, toy_extract
from .transforms import (
    Image,
    TransformCondition,
    canonical_order,
    default_suite,
    suite_from_json,
    suite_to_json,
    condition_for_index,
    transform_corpus,
    transform_image,
)

__all__ = [
    "__version__",
    "BACKEND",
    "HAVE_NUMBA",
    "worker_count",
    # errors
    "RepalignError",
    "ValidationError",
    "BadMagic",
    "VersionMismatch",
    "TruncatedPayload",
    "NonFiniteValue",
    "SingleSample",
    "AllFiltered",
    "OnlyClsToken",
    "KTooLarge",
    "ShapeMismatch",
    "DegenerateMask",
    "ScaleTooSmall",
    "MissingIdentityCondition",
    "ConditionSetMismatch",
    "ZeroBaseline",
    "EmptyLayerList",
    # feature store
    "FeatureSet",
    "FeatureMeta",
    "TokenFeatureSet",
    "OutlierPolicy",
    "normalize_channels",
    "filter_outliers",
    "pool_tokens",
    "read_rafs",
    "write_rafs",
    "load_features",
    "load_csv",
    # kernels
    "KernelMatrix",
    "KnnSets",
    "MutualKnnMask",
    "CknnaScore",
    "gram",
    "knn_sets",
    "mutual_mask",
    "center",
    "cknna",
    "cknna_features",
    "cknna_oracle",
    "ORACLE_MAX_N",
    # transforms and toy pipeline
    "TransformCondition",
    "Image",
    "condition_for_index",
    "transform_corpus",
    "transform_image",
    "default_suite",
    "canonical_order",
    "suite_to_json",
    "suite_from_json",
    "synth_image",
    "synth_corpus",
    "toy_extract",
    "extract_corpus",
    "model_seeds",
    # pipeline and metrics
    "Settings",
    "ensure_pooled",
    "preprocess_pair",
    "score_pair",
    "SeCknnaResult",
    "se_cknna",
    "relative_change",
    "LayerProfile",
    "layer_profile",
    # reports
    "AlignmentReport",
    "emit_report",
    "parse_report",
    "canonical_json",
    "file_digest",
    "report_cknna",
    "report_se_cknna",
    "report_layer_profile",
    # self-check
    "SweepInstance",
    "equivalence_sweep",
    "max_delta",
    "SWEEP_TOLERANCE",
    # rng
    "counter_hash",
    "uniform01",
    "norm_ppf",
    "standard_normals",
    "normal_field",
    "uniform_field",
    "derive_seed",
]

"""Fuzzy c-means image segmentation.

Two interchangeable engines cluster grayscale images: a single-threaded
sequential reference, and a block-parallel engine that decomposes each
iteration into per-pixel map kernels and a block-structured tree
reduction executed on host worker threads. The parallel engine is
bit-reproducible at any worker count and matches the sequential engine's
label maps exactly. Evaluation (Dice overlap), PGM I/O and a timing
harness round out the toolkit.

The numeric kernels run on a compiled extension when available, with a
bit-identical pure-Python fallback (see fcmseg.backend).
"""

from .backend import backend_name, compiled_available, using_compiled
from .core import (
    defuzzify,
    init_membership,
    membership_delta,
    objective,
    run_fcm_sequential,
    update_centers,
    update_membership,
)
from .errors import (
    DegenerateClusterError,
    DimensionMismatchError,
    FcmError,
    InvalidConfigError,
    InvalidGridError,
    MalformedHeaderError,
    MissingClassError,
    PgmError,
    PgmValueError,
    TruncatedRasterError,
    UnsupportedMagicError,
)
from .imgio import (
    GROUND_TRUTH_CLASSES,
    PgmImage,
    enlarge_dataset,
    flatten_index,
    label_intensity,
    membership_index,
    read_ground_truth,
    read_pgm,
    write_pgm,
)
from .metrics import BinaryMask, DscReport, dsc, mask_for_class, match_clusters
from .parallel import (
    BlockGrid,
    CenterTerms,
    block_reduce_sum,
    kernel_center_terms,
    parallel_update_centers,
    parallel_update_membership,
    reduce_full,
    reduction_levels,
    run_fcm_parallel,
)
from .bench import BenchRecord, run_benchmark
from .types import (
    ClusterCenters,
    FcmConfig,
    FcmResult,
    GrayImage,
    LabelMap,
    MembershipMatrix,
)

__version__ = "0.1.0"

__all__ = [
    "BenchRecord",
    "BinaryMask",
    "BlockGrid",
    "CenterTerms",
    "ClusterCenters",
    "DegenerateClusterError",
    "DimensionMismatchError",
    "DscReport",
    "FcmConfig",
    "FcmError",
    "FcmResult",
    "GROUND_TRUTH_CLASSES",
    "GrayImage",
    "InvalidConfigError",
    "InvalidGridError",
    "LabelMap",
    "MalformedHeaderError",
    "MembershipMatrix",
    "MissingClassError",
    "PgmError",
    "PgmImage",
    "PgmValueError",
    "TruncatedRasterError",
    "UnsupportedMagicError",
    "backend_name",
    "block_reduce_sum",
    "compiled_available",
    "defuzzify",
    "dsc",
    "enlarge_dataset",
    "flatten_index",
    "init_membership",
    "kernel_center_terms",
    "label_intensity",
    "mask_for_class",
    "match_clusters",
    "membership_delta",
    "membership_index",
    "objective",
    "parallel_update_centers",
    "parallel_update_membership",
    "read_ground_truth",
    "read_pgm",
    "reduce_full",
    "reduction_levels",
    "run_benchmark",
    "run_fcm_parallel",
    "run_fcm_sequential",
    "update_centers",
    "update_membership",
    "using_compiled",
    "write_pgm",
]

"""Python surface of the sparse semantic Gaussian occupancy engine.

The heavy lifting lives in the compiled `_core` module; this package just
re-exports it under friendly names.
"""

from ._core import (
    VoxelGridSpec,
    classify_grid,
    compose_covariance,
    dense_reference_splat,
    eval_mixture,
    iou,
    memory_ratio,
    miou,
    quat_to_rot,
    run_synthetic_sequence,
    splat,
)

__all__ = [
    "VoxelGridSpec",
    "classify_grid",
    "compose_covariance",
    "dense_reference_splat",
    "eval_mixture",
    "iou",
    "memory_ratio",
    "miou",
    "quat_to_rot",
    "run_synthetic_sequence",
    "splat",
]

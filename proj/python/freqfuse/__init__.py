"""Spatial and frequency feature fusion for few-shot classification."""

from ._freqfuse import (
    FeatureDump,
    FreqfuseError,
    dct_matrix,
    dct_pipeline,
    evaluate_episodes,
    extract_features,
    forward_dct_block,
    fuse,
    generate_synthetic,
    inverse_dct_block,
    l2_normalize,
    load_image,
    merge_dumps,
    read_dump,
    summarize_accuracies,
    write_dump,
    zigzag_index,
)

__all__ = [
    "FeatureDump",
    "FreqfuseError",
    "dct_matrix",
    "dct_pipeline",
    "evaluate_episodes",
    "extract_features",
    "forward_dct_block",
    "fuse",
    "generate_synthetic",
    "inverse_dct_block",
    "l2_normalize",
    "load_image",
    "merge_dumps",
    "read_dump",
    "summarize_accuracies",
    "write_dump",
    "zigzag_index",
]

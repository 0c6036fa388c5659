"""3-D adversarial synthesis and evaluation of healthy lung CT patches."""

import torch as _torch  # noqa: F401  (loads libtorch before the extension)

from ._core import (
    ArgumentError,
    IntegrityError,
    LoadError,
    ValidationError,
    branch_count,
    fid,
    generate,
    generator_parameter_count,
    mdmin,
    phantom_patches,
    roc_auc,
    run_cli,
    select_redundant,
    skeletonize,
    slerp_path,
    version,
    welch,
)

__version__ = version()

__all__ = [
    "ArgumentError",
    "IntegrityError",
    "LoadError",
    "ValidationError",
    "branch_count",
    "fid",
    "generate",
    "generator_parameter_count",
    "mdmin",
    "phantom_patches",
    "roc_auc",
    "run_cli",
    "select_redundant",
    "skeletonize",
    "slerp_path",
    "version",
    "welch",
]

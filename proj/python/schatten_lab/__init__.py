"""Python bindings for the schatten_lab experiments."""

from ._core import (
    Grid,
    LowRankOperator,
    NumericFailure,
    calibrate_l1,
    cli,
    dense_schatten_norm,
    deterministic_sharp_alpha,
    hartree_solve,
    region_membership,
    singular_regime_exponents,
    strichartz,
    version,
)

__all__ = [
    "Grid",
    "LowRankOperator",
    "NumericFailure",
    "calibrate_l1",
    "cli",
    "dense_schatten_norm",
    "deterministic_sharp_alpha",
    "hartree_solve",
    "region_membership",
    "singular_regime_exponents",
    "strichartz",
    "version",
]

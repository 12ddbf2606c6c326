"""Exact max-plus linear algebra and semigroup identities for tropical matrices."""

from .core import (
    BOTTOM,
    CapExceeded,
    PermanentReport,
    ShapeError,
    TropError,
    TropMatrix,
    TropScalar,
    is_bottom,
    is_nonsingular,
    lcm_upto,
    load_matrix,
    mat_max,
    mat_mul,
    mat_pow,
    permanent,
    save_matrix,
    trace,
)

__all__ = [
    "BOTTOM",
    "CapExceeded",
    "PermanentReport",
    "ShapeError",
    "TropError",
    "TropMatrix",
    "TropScalar",
    "is_bottom",
    "is_nonsingular",
    "lcm_upto",
    "load_matrix",
    "mat_max",
    "mat_mul",
    "mat_pow",
    "permanent",
    "save_matrix",
    "trace",
]

"""Baker-map multi-image cipher."""

from ._core import (
    FormatError,
    VerificationError,
    apply,
    apply_inverse,
    chebyshev,
    count_partitions,
    decrypt,
    encrypt,
    henon_sine_step,
    is_admissible,
    rank,
    synthesize,
    unrank,
    verify,
)

__all__ = [
    "FormatError",
    "VerificationError",
    "apply",
    "apply_inverse",
    "chebyshev",
    "count_partitions",
    "decrypt",
    "encrypt",
    "henon_sine_step",
    "is_admissible",
    "rank",
    "synthesize",
    "unrank",
    "verify",
]

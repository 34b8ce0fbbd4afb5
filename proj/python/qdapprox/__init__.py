"""Diophantine approximation in real quadratic fields."""

from ._core import (
    QdaError,
    approx_root,
    canonical,
    fundamental_unit,
    good_pair,
    hunt,
    kernel_sum,
    norm,
    prime_elements,
    run,
    sieve_identity,
    system_count,
    theta_count,
    weights,
)

__all__ = [
    "QdaError",
    "approx_root",
    "canonical",
    "fundamental_unit",
    "good_pair",
    "hunt",
    "kernel_sum",
    "norm",
    "prime_elements",
    "run",
    "sieve_identity",
    "system_count",
    "theta_count",
    "weights",
]
__version__ = "0.1.0"

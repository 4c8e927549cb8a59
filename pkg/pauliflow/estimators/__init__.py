"""
Copyright (c) 2024 The pauliflow authors.
"""
from .base import AbstractEstimator
from .oracle import DensityMatrixEstimator, PauliTransferEstimator, oracle_for
from .truncated import TruncatedPathEstimator

__all__ = [
    "AbstractEstimator",
    "DensityMatrixEstimator",
    "PauliTransferEstimator",
    "TruncatedPathEstimator",
    "oracle_for",
]

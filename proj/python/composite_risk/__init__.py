"""Composite risk estimators with kernel and wavelet smoothing."""

from ._crisk import (
    CriskError,
    bandwidth_rule,
    bias_study,
    estimate_risk,
    kernel_density,
    oracle,
    resolution_rule,
    sample,
    wavelet_density,
)

__all__ = [
    "CriskError",
    "bandwidth_rule",
    "bias_study",
    "estimate_risk",
    "kernel_density",
    "oracle",
    "resolution_rule",
    "sample",
    "wavelet_density",
]

"""Asymptotic key-rate bounds for imperfect BB84 with local randomisation."""

__version__ = "0.1.0"

from .analysis import (
    SweepResult,
    SweepSpec,
    ThresholdResult,
    optimize_eta,
    sweep,
    threshold_with_lr,
    threshold_without_lr,
    thresholds,
)
from .keyrate import (
    KeyRateReport,
    NoiseFraction,
    ProtocolParams,
    binary_entropy,
    cond_entropy_bound,
    f_theta,
    phi,
    rate_bound,
    rate_from_fidelity,
    threshold_root_expression,
)

__all__ = [
    "KeyRateReport",
    "NoiseFraction",
    "ProtocolParams",
    "SweepResult",
    "SweepSpec",
    "ThresholdResult",
    "binary_entropy",
    "cond_entropy_bound",
    "f_theta",
    "optimize_eta",
    "phi",
    "rate_bound",
    "rate_from_fidelity",
    "sweep",
    "threshold_root_expression",
    "threshold_with_lr",
    "threshold_without_lr",
    "thresholds",
]

"""
Leggett model exports
"""

from .model import (
    LeggettComponent,
    LeggettModel,
    ThresholdScan,
    binding_point,
    build_uniform_product_model,
    build_werner_model,
    component_correlator,
    critical_visibility,
    denominator,
    necessary_condition_slack,
    p_minus_scan,
    p_plus_minus,
    threshold_scan,
    witness_model,
)

__all__ = [
    "LeggettComponent",
    "LeggettModel",
    "ThresholdScan",
    "binding_point",
    "build_uniform_product_model",
    "build_werner_model",
    "component_correlator",
    "critical_visibility",
    "denominator",
    "necessary_condition_slack",
    "p_minus_scan",
    "p_plus_minus",
    "threshold_scan",
    "witness_model",
]

"""
Correlations module exports
"""

from .io import (
    correlation_from_dict,
    correlation_from_probabilities,
    correlation_to_dict,
    dump_correlation,
    load_correlation,
)
from .models import (
    BinaryCorrelation,
    OutcomeDistribution,
    PositivityViolation,
    SettingsGrid,
    deterministic_correlation,
    fully_random_correlation,
    mix,
    positivity_bounds,
    pr_box_correlation,
    product_state_correlation,
    reconstruct_distribution,
    validate,
    werner_correlation,
)
from .presets import PresetLibrary, SettingsPreset

__all__ = [
    "BinaryCorrelation",
    "OutcomeDistribution",
    "PositivityViolation",
    "PresetLibrary",
    "SettingsGrid",
    "SettingsPreset",
    "correlation_from_dict",
    "correlation_from_probabilities",
    "correlation_to_dict",
    "deterministic_correlation",
    "dump_correlation",
    "fully_random_correlation",
    "load_correlation",
    "mix",
    "positivity_bounds",
    "pr_box_correlation",
    "product_state_correlation",
    "reconstruct_distribution",
    "validate",
    "werner_correlation",
]

"""
Leggett Toolkit - Configuration
Numeric gates, solver defaults and run defaults
"""

from typing import Dict, Iterable, Literal, Optional

from pydantic import BaseModel, Field, ValidationError
from pydantic_settings import BaseSettings, SettingsConfigDict

from .errors import InvalidArgumentError

FORMAT_VERSION = "leggett-report/1.0"

# Visibility up to which the explicit Werner model is claimed: (1 + 1/sqrt(2)) / 2
CRITICAL_VISIBILITY = (1.0 + 2.0 ** -0.5) / 2.0

# Werner states are entangled above this visibility
ENTANGLEMENT_VISIBILITY = 1.0 / 3.0


class Tolerances(BaseModel):
    """Every numeric gate used by the toolkit"""

    positivity: float = Field(default=1e-9, gt=0, description="Positivity slack allowed in validate()")
    signaling: float = Field(default=1e-9, gt=0, description="Marginal mismatch across contexts")
    clamp: float = Field(default=1e-9, gt=0, description="Largest drift absorbed by clamping")
    normalization: float = Field(default=1e-12, gt=0)
    extremal: float = Field(default=1e-12, gt=0, description="|marginal| = 1 detection")
    distinct_angle: float = Field(default=1e-9, gt=0, description="Radians separating two settings")
    lp_slack: float = Field(default=1e-9, gt=0, description="Per-row relaxation inside the LP")
    witness: float = Field(default=1e-8, gt=0, description="Witness reproduction inside the solver")
    soundness: float = Field(default=1e-6, gt=0, description="Independent witness re-check")
    pivot: float = Field(default=1e-10, gt=0, description="Absolute simplex pivot tolerance")
    weight_drop: float = Field(default=1e-12, ge=0, description="Witness components at or below are dropped")
    quadrature: float = Field(default=5e-3, gt=0, description="Quadrature error at n=1e3")
    quadrature_fine: float = Field(default=5e-4, gt=0, description="Quadrature error at n=1e5")
    regime: float = Field(default=1e-12, ge=0, description="Allowed excess of V over the critical value")


class Settings(BaseSettings):
    """Toolkit settings, overridable through LEGGETT_* environment variables"""

    model_config = SettingsConfigDict(
        env_prefix="LEGGETT_",
        env_file=".env",
        env_file_encoding="utf-8",
        env_nested_delimiter="__",
        extra="ignore",
    )

    # App Configuration
    app_name: str = "Leggett Toolkit"
    app_version: str = "0.1.0"
    log_level: str = Field(default="WARNING", description="Level for the structlog stderr stream")

    tolerances: Tolerances = Field(default_factory=Tolerances)

    # LP engine
    lp_backend: Literal["simplex", "highs"] = "simplex"
    lp_max_iterations: int = Field(default=50_000, ge=1)
    lp_grid_cap: int = Field(default=20_000, ge=1, description="Max hidden-variable pairs per LP")
    certificate_rounds: int = Field(default=3, ge=0, description="Column-generation rounds before a certificate is given up")

    # Hidden-variable grids
    antipodal_grid_n: int = Field(default=200, ge=2, description="Fibonacci nodes, v = -u")
    product_grid_n: int = Field(default=48, ge=2, description="Fibonacci nodes per factor")
    verification_factor: int = Field(default=10, ge=2)

    # Bell scenario limits
    bell_strategy_cap: int = Field(default=20, description="Max |A| + |B| settings")
    bell_dense_limit: int = Field(default=12, description="Max |A| + |B| with every strategy in one LP")
    bell_column_rounds: int = Field(default=500, ge=1, description="Column-generation rounds above the dense limit")
    bell_columns_per_round: int = Field(default=16, ge=1, description="Strategies priced in per round")

    # Runs
    default_seed: int = 20130406
    presets_file: Optional[str] = Field(default="config/presets.yaml")


# Global settings instance
settings = Settings()


def parse_tolerance_overrides(pairs: Iterable[str]) -> Dict[str, float]:
    """Parse KEY=VAL strings against the Tolerances fields"""
    overrides: Dict[str, float] = {}
    for pair in pairs:
        key, sep, raw = pair.partition("=")
        key = key.strip()
        if not sep or key not in Tolerances.model_fields:
            raise InvalidArgumentError(f"Unknown tolerance override: {pair!r}")
        try:
            overrides[key] = float(raw)
        except ValueError as e:
            raise InvalidArgumentError(f"Tolerance {key} is not a number: {raw!r}") from e
    return overrides


def apply_tolerance_overrides(overrides: Dict[str, float]) -> Tolerances:
    """Replace the global tolerances with a validated, updated copy"""
    merged = settings.tolerances.model_dump() | overrides
    try:
        settings.tolerances = Tolerances(**merged)
    except ValidationError as e:
        raise InvalidArgumentError(f"Invalid tolerance override: {e.errors()[0]['msg']}") from e
    return settings.tolerances

"""
Run configuration
The fully resolved parameters of one CLI run, embedded in every report
"""

import hashlib
import json
from typing import Any, Dict, Literal, Optional

from pydantic import BaseModel, Field

from ..config import FORMAT_VERSION, settings
from ..solvers import GridMode

Command = Literal["verify-werner", "threshold-scan", "classify-examples", "feasibility"]


class RunConfig(BaseModel):
    """Resolved parameters of a run; identical configs produce identical reports"""

    command: Command
    V: Optional[float] = Field(default=None, ge=0.0, description="Werner visibility")
    n: int = Field(default=100_000, description="Quadrature nodes for the Werner model")
    trials: int = Field(default=50, ge=1, description="Random (a, b) pairs")
    resolution: int = Field(default=1_000_000, description="t-grid points per zoom round")
    grid_mode: Optional[GridMode] = None
    grid_n: Optional[int] = Field(default=None, ge=2)
    input: Optional[str] = None
    output: Optional[str] = None
    csv: Optional[str] = None
    preset: Optional[str] = None
    include_spread: bool = False
    seed: int = Field(default_factory=lambda: settings.default_seed)
    lp_backend: str = Field(default_factory=lambda: settings.lp_backend)
    tolerance_overrides: Dict[str, float] = Field(default_factory=dict)

    def resolved(self) -> Dict[str, Any]:
        """Config as recorded in reports: output locations excluded, tolerances in effect included"""
        data = self.model_dump(mode="json", exclude={"output", "csv"})
        data["tolerances"] = settings.tolerances.model_dump()
        data["format_version"] = FORMAT_VERSION
        return data

    def config_hash(self) -> str:
        """SHA-256 of the canonical config JSON"""
        canonical = json.dumps(self.resolved(), sort_keys=True, default=str)
        return hashlib.sha256(canonical.encode()).hexdigest()

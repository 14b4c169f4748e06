"""
Setting Presets
Named measurement geometries for the classification examples, extendable from YAML
"""

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import structlog
import yaml

from ..config import settings
from ..errors import CorrelationFormatError, InvalidArgumentError
from ..geometry import E_X, E_Y, E_Z, UnitVector3
from .models import SettingsGrid

logger = structlog.get_logger(__name__)


@dataclass
class SettingsPreset:
    """A named settings grid plus hidden-variable directions worth adding to LP grids"""
    name: str
    description: str
    alice: Tuple[UnitVector3, ...]
    bob: Tuple[UnitVector3, ...]
    # Directions orthogonal to a party's settings leave its correlators unconstrained
    hidden_u: Tuple[UnitVector3, ...] = field(default_factory=tuple)
    hidden_v: Tuple[UnitVector3, ...] = field(default_factory=tuple)

    @property
    def grid(self) -> SettingsGrid:
        return SettingsGrid(self.alice, self.bob)


def _parse_vector(raw: Any) -> UnitVector3:
    if isinstance(raw, dict):
        if "equatorial" in raw:
            return UnitVector3.equatorial(float(raw["equatorial"]))
        if "theta" in raw:
            return UnitVector3.from_angles(math.radians(float(raw["theta"])), math.radians(float(raw.get("phi", 0.0))))
        raise InvalidArgumentError(f"Unknown vector specification: {raw}")
    return UnitVector3.from_array([float(x) for x in raw])


def _parse_vectors(raw: Optional[List[Any]]) -> Tuple[UnitVector3, ...]:
    return tuple(_parse_vector(item) for item in (raw or []))


def _polar(theta_deg: float, phi_deg: float) -> UnitVector3:
    return UnitVector3.from_angles(math.radians(theta_deg), math.radians(phi_deg))


class PresetLibrary:
    """
    Preset registry

    Built-in geometries reproduce the classification examples with zero user
    input; a YAML file can add or replace presets by name.
    """

    def __init__(self, presets_file: Optional[str] = None):
        self.presets: Dict[str, SettingsPreset] = {}
        self.presets_file = presets_file if presets_file is not None else settings.presets_file
        self._load_default_presets()
        if self.presets_file:
            self.load_presets_from_file(self.presets_file)

    def _load_default_presets(self):
        """Load the built-in example geometries"""
        equatorial = tuple(UnitVector3.equatorial(d) for d in (0.0, 45.0, 90.0, 135.0))
        diagonal = UnitVector3.from_components(1.0, 0.0, 1.0)
        anti_diagonal = UnitVector3.from_components(1.0, 0.0, -1.0)

        self.register(SettingsPreset(
            name="generic",
            description="Two settings per side in the xz-plane",
            alice=(E_X, E_Z),
            bob=(diagonal, anti_diagonal),
        ))

        # Contains the CHSH-optimal choice a in {0, 90}, b in {45, 135} degrees
        self.register(SettingsPreset(
            name="equatorial",
            description="Four equatorial settings per side at 0, 45, 90 and 135 degrees",
            alice=equatorial,
            bob=equatorial,
            hidden_u=(E_Z,),
            hidden_v=(-E_Z,),
        ))

        self.register(SettingsPreset(
            name="pr_box",
            description="PR-box settings spanning the xy-plane on both sides",
            alice=(E_X, E_Y),
            bob=(E_X, E_Y),
            hidden_u=(E_Z,),
            hidden_v=(E_Z,),
        ))

        self.register(SettingsPreset(
            name="deterministic",
            description="Two distinct Alice settings, one Bob setting",
            alice=(E_X, E_Y),
            bob=(E_X,),
        ))

        # Three orthogonal great circles plus a generic direction; the first four
        # settings per side are the equatorial preset
        spread = equatorial + (
            _polar(45.0, 0.0), E_Z, _polar(135.0, 0.0),
            _polar(45.0, 90.0), _polar(135.0, 90.0),
            UnitVector3.from_components(1.0, 1.0, 1.0),
        )
        self.register(SettingsPreset(
            name="spread",
            description="Ten well-spread settings per side on three orthogonal great circles",
            alice=spread,
            bob=spread,
        ))

    def register(self, preset: SettingsPreset):
        if not preset.alice or not preset.bob:
            raise InvalidArgumentError(f"Preset {preset.name!r} needs settings for both parties")
        self.presets[preset.name] = preset

    def load_presets_from_file(self, filepath: str):
        """Load additional presets from a YAML file"""
        path = Path(filepath)
        if not path.exists():
            logger.debug("Presets file not found", path=filepath)
            return

        try:
            with open(path, "r", encoding="utf-8") as f:
                data = yaml.safe_load(f)
        except (yaml.YAMLError, UnicodeDecodeError) as e:
            raise CorrelationFormatError(f"{filepath}: not a valid presets file ({e})") from e

        if not data or "presets" not in data:
            return

        for position, entry in enumerate(data["presets"] or []):
            try:
                preset = SettingsPreset(
                    name=entry["name"],
                    description=entry.get("description", ""),
                    alice=_parse_vectors(entry.get("alice")),
                    bob=_parse_vectors(entry.get("bob")),
                    hidden_u=_parse_vectors(entry.get("hidden_u")),
                    hidden_v=_parse_vectors(entry.get("hidden_v")),
                )
            except (KeyError, TypeError, AttributeError, ValueError) as e:
                raise CorrelationFormatError(f"{filepath}: preset entry {position} is malformed ({e!r})") from e
            self.register(preset)
        logger.info("Loaded presets", count=len(data["presets"] or []), path=filepath)

    def get(self, name: str) -> SettingsPreset:
        try:
            return self.presets[name]
        except KeyError:
            raise InvalidArgumentError(
                f"Unknown preset {name!r}; available: {', '.join(sorted(self.presets))}"
            ) from None

    def names(self) -> List[str]:
        return sorted(self.presets)

"""
config - run configuration: defaults, key = value files, YAML, overrides.
"""

from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Any, Dict, Mapping, Tuple, Union

try:
    import yaml
except ImportError:
    yaml = None

from spectral.bands import DEFAULT_EDGES, BandSpec
from tensor.errors import ConfigError

TOGGLES = ("bin", "bca", "mfa", "mbfm", "fsf", "iseb")
ALIASES = {"lambda": "lam", "lr": "learning_rate", "offset": "texture_freq_offset"}
_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    image_size: int = 64
    band_edges: Tuple[float, ...] = DEFAULT_EDGES
    lam: float = 0.1
    learning_rate: float = 1e-4
    epochs: int = 200
    batch_size: int = 12
    weight_decay: float = 0.01
    prompt: str = "blend-class"
    texture_freq_offset: float = 0.2
    bin: bool = True
    bca: bool = True
    mfa: bool = True
    mbfm: bool = True
    fsf: bool = True
    iseb: bool = True

    def __post_init__(self):
        object.__setattr__(self, "band_edges", BandSpec(tuple(self.band_edges)).edges)
        if self.image_size < 32 or self.image_size % 32:
            raise ConfigError(f"image_size must be a positive multiple of 32, got {self.image_size}.")
        if self.learning_rate < 0 or self.weight_decay < 0:
            raise ConfigError("learning_rate and weight_decay must be non-negative.")
        if self.batch_size < 1 or self.epochs < 0:
            raise ConfigError("batch_size must be >= 1 and epochs >= 0.")
        if self.lam < 0:
            raise ConfigError(f"lambda must be non-negative, got {self.lam}.")

    @property
    def band_spec(self) -> BandSpec:
        return BandSpec(self.band_edges)

    def toggles(self) -> Dict[str, bool]:
        return {name: getattr(self, name) for name in TOGGLES}

    def with_toggles(self, **toggles: bool) -> "RunConfig":
        unknown = set(toggles) - set(TOGGLES)
        if unknown:
            raise ConfigError(f"Unknown module toggle(s): {', '.join(sorted(unknown))}")
        return replace(self, **toggles)

    def updated(self, values: Mapping[str, Any]) -> "RunConfig":
        """A copy with `values` (raw strings allowed) applied over this config."""
        return replace(self, **_coerce_all(values))

    def as_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["band_edges"] = list(self.band_edges)
        return data

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "RunConfig":
        return cls().updated(data)


def _coerce(name: str, kind: Any, value: Any) -> Any:
    if name == "band_edges":
        if isinstance(value, str):
            return BandSpec.parse(value).edges
        return tuple(float(v) for v in value)
    if kind is bool or kind == "bool":
        if isinstance(value, bool):
            return value
        text = str(value).strip().lower()
        if text in _TRUE:
            return True
        if text in _FALSE:
            return False
        raise ConfigError(f"'{name}' expects a boolean, got {value!r}")
    if kind is int or kind == "int":
        return int(value)
    if kind is float or kind == "float":
        return float(value)
    return str(value)


def _coerce_all(values: Mapping[str, Any]) -> Dict[str, Any]:
    known = {f.name: f.type for f in fields(RunConfig)}
    out = {}
    for key, value in values.items():
        name = ALIASES.get(key.replace("-", "_"), key.replace("-", "_"))
        if name not in known:
            raise ConfigError(f"Unknown config key: '{key}'")
        try:
            out[name] = _coerce(name, known[name], value)
        except (TypeError, ValueError) as e:
            if isinstance(e, ConfigError):
                raise
            raise ConfigError(f"Invalid value for '{key}': {value!r}") from e
    return out


def parse_key_values(text: str) -> Dict[str, str]:
    """Parse 'key = value' lines; '#' starts a comment, blank lines are skipped."""
    values = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"Line {number}: expected 'key = value', got {raw!r}")
        values[key.strip()] = value.strip()
    return values


def load_config(path: Union[str, Path], base: RunConfig = RunConfig()) -> RunConfig:
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() in (".yml", ".yaml"):
        if not yaml:
            raise ConfigError("PyYAML is not installed. Please install it with 'pip install PyYAML' to read YAML configs.")
        data = yaml.safe_load(text) or {}
        if not isinstance(data, dict):
            raise ConfigError(f"YAML config {path} must be a mapping.")
    else:
        data = parse_key_values(text)
    return base.updated(data)

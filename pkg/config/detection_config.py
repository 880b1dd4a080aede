from dataclasses import dataclass, asdict, fields
import os

import ujson

from core.errors import InvalidParameter, SchemaError

CONFIG_FILE = "detection_config.json"

MAX_HIERARCHY_LEVEL = 6


@dataclass
class DetectionConfig:
    tol: float = 1e-10                 # linear-algebra validation tolerance
    det_rel_tol: float = 1e-12         # scaled by max(1, ||H||_inf^(m+1))
    imag_tol: float = 1e-10            # moments with a larger |Im| are non-real
    entry_tol: float = 1e-10           # entry oracle tolerance
    overlap_floor: float = 1e-8        # weak values / reconstruction
    degeneracy_rel_tol: float = 1e-9   # eigenvalue merging
    merge_rel_tol: float = 1e-9        # work atom merging
    m_max: int = 3

    def __post_init__(self):
        if not 1 <= int(self.m_max) <= MAX_HIERARCHY_LEVEL:
            raise InvalidParameter(f"m_max must lie in [1, {MAX_HIERARCHY_LEVEL}], got {self.m_max}")
        self.m_max = int(self.m_max)

    def det_tolerance(self, norm_inf: float, level: int) -> float:
        """Scale-aware determinant threshold for a level-m Hankel matrix."""
        return self.det_rel_tol * max(1.0, norm_inf ** (level + 1))

    def with_overrides(self, **overrides) -> "DetectionConfig":
        """Return a copy with every non-None override applied."""
        values = asdict(self)
        values.update({k: v for k, v in overrides.items() if v is not None})
        return DetectionConfig(**values)


def load_detection_config(file_path: str = CONFIG_FILE) -> DetectionConfig:
    """Load tolerances from a JSON file, falling back to defaults."""
    if not os.path.exists(file_path):
        return DetectionConfig()

    try:
        with open(file_path, 'r', encoding='utf-8') as f:
            data = ujson.load(f)
    except ValueError as e:
        raise SchemaError("/", f"malformed config file {file_path}: {e}") from e
    if not isinstance(data, dict):
        raise SchemaError("/", f"config file {file_path} must hold an object")

    known = {f.name for f in fields(DetectionConfig)}
    values = {k: v for k, v in data.items() if k in known}
    for key, value in values.items():
        _check_config_value(key, value)
    return DetectionConfig(**values)


def _check_config_value(key: str, value):
    if isinstance(value, bool):
        raise SchemaError(f"/{key}", "expected a number, got a boolean")
    if key == "m_max":
        if not isinstance(value, int):
            raise SchemaError(f"/{key}", f"expected an integer, got {value!r}")
    elif not isinstance(value, (int, float)):
        raise SchemaError(f"/{key}", f"expected a number, got {value!r}")


def save_detection_config(config: DetectionConfig, file_path: str = CONFIG_FILE):
    """Save tolerances to a JSON file."""
    with open(file_path, 'w', encoding='utf-8') as f:
        ujson.dump(asdict(config), f, indent=4)

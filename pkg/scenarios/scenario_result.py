from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from config.detection_config import DetectionConfig
from core.errors import InvalidParameter
from core.utils.serialization import encode_complex, encode_complex_array

PAPER_TABLE = "paper-table"
PAPER_FORMULA = "paper-formula"
DERIVED_ORACLE = "derived-oracle"
PROVENANCES = (PAPER_TABLE, PAPER_FORMULA, DERIVED_ORACLE)


@dataclass(frozen=True)
class ExpectedValue:
    value: Any
    provenance: str
    tolerance: float = 1e-12

    def __post_init__(self):
        if self.provenance not in PROVENANCES:
            raise InvalidParameter(f"unknown provenance '{self.provenance}'")

    def matches(self, computed) -> bool:
        if isinstance(self.value, str) or isinstance(computed, str):
            return self.value == computed
        expected = np.asarray(self.value)
        computed = np.asarray(computed)
        if expected.shape != computed.shape:
            return False
        return bool(np.max(np.abs(expected - computed), initial=0.0) <= self.tolerance)


def encode_value(value):
    if isinstance(value, str) or value is None:
        return value
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return int(value)
    array = np.asarray(value)
    if np.iscomplexobj(array):
        return encode_complex(array.item()) if array.ndim == 0 else encode_complex_array(array)
    return float(array) if array.ndim == 0 else array.astype(float).tolist()


@dataclass(frozen=True)
class ScenarioResult:
    """Inputs of a worked example, its expected values, and the production pipeline that recomputes them."""
    name: str
    parameters: dict
    inputs: dict
    expected: dict
    pipeline: Callable = field(repr=False, compare=False)

    def evaluate(self, config: DetectionConfig | None = None) -> dict:
        return self.pipeline(self.inputs, config or DetectionConfig())

    def check(self, config: DetectionConfig | None = None):
        """Return (computed, rows) where each row compares one expected quantity."""
        computed = self.evaluate(config)
        rows = []
        for quantity, expected in self.expected.items():
            value = computed.get(quantity)
            rows.append({
                "quantity": quantity,
                "expected": encode_value(expected.value),
                "computed": encode_value(value),
                "provenance": expected.provenance,
                "tolerance": expected.tolerance,
                "ok": value is not None and expected.matches(value),
            })
        return computed, rows

"""
Pure state (|00> + 2|01>)/sqrt(5): the first Hankel level is exactly
silent while the second one detects the negative entries.
"""
import numpy as np

from config.detection_config import DetectionConfig
from core.kd_distribution import kd_distribution, mhq, negativity
from core.linalg import computational_basis, validate_basis, validate_density
from core.moments import detect_kd_nonpositivity, moments
from scenarios.scenario_result import (
    DERIVED_ORACLE,
    PAPER_FORMULA,
    PAPER_TABLE,
    ExpectedValue,
    ScenarioResult,
)

ZERO = np.array([1, 0])
ONE = np.array([0, 1])
PLUS = np.array([1, 1]) / np.sqrt(2)
MINUS = np.array([1, -1]) / np.sqrt(2)

KD_TABLE = np.array([
    [0.3, -0.1, 0.0, 0.0],
    [0.6, 0.2, 0.0, 0.0],
    [0.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, 0.0],
])
MOMENTS = np.array([1.0, 0.5, 0.25, 0.1394, 0.0805])
DET_H2 = -2.0736e-4


def zero_one_sign_basis():
    """|0+>, |0->, |1+>, |1->."""
    columns = [np.kron(ZERO, PLUS), np.kron(ZERO, MINUS), np.kron(ONE, PLUS), np.kron(ONE, MINUS)]
    return validate_basis(np.column_stack(columns), "z x sign")


def example2_state():
    psi = np.array([1, 2, 0, 0]) / np.sqrt(5)
    return validate_density(np.outer(psi, psi))


def _pipeline(inputs: dict, config: DetectionConfig) -> dict:
    rho, basis_a, basis_f = inputs["rho"], inputs["basis_a"], inputs["basis_f"]
    table = kd_distribution(rho, basis_a, basis_f)
    report = detect_kd_nonpositivity(rho, basis_a, basis_f, config.with_overrides(m_max=max(config.m_max, 2)))
    return {
        "kd_entries": table.entries,
        "moments": moments(table, 5).values,
        "det_h1": report.determinant(1),
        "det_h2": report.determinant(2),
        "negativity": negativity(mhq(table)),
        "verdict": report.label,
        "detection": report,
    }


class Example2Scenario:
    SCENARIO_ID = 2
    DEFAULTS = {}

    def build(self) -> ScenarioResult:
        expected = {
            "kd_entries": ExpectedValue(KD_TABLE, PAPER_TABLE),
            "moments": ExpectedValue(MOMENTS, DERIVED_ORACLE),
            "det_h1": ExpectedValue(0.0, PAPER_FORMULA),
            "det_h2": ExpectedValue(DET_H2, PAPER_FORMULA),
            "negativity": ExpectedValue(0.2, DERIVED_ORACLE),
            "verdict": ExpectedValue("Detected(2)", PAPER_FORMULA),
        }
        inputs = {
            "rho": example2_state(),
            "basis_a": computational_basis(4),
            "basis_f": zero_one_sign_basis(),
        }
        return ScenarioResult("example2", {}, inputs, expected, _pipeline)


def example2() -> ScenarioResult:
    return Example2Scenario().build()

"""
Two-qubit Werner-like state against the computational basis and the
product |+-> basis; the KD table turns negative once p > 1/3 and the
first Hankel level sees it.
"""
import numpy as np

from config.detection_config import DetectionConfig
from core.errors import ParameterOutOfRange
from core.kd_distribution import kd_distribution, marginals
from core.linalg import computational_basis, validate_basis, validate_density
from core.moments import detect_kd_nonpositivity, moments
from scenarios.scenario_result import (
    DERIVED_ORACLE,
    PAPER_FORMULA,
    PAPER_TABLE,
    ExpectedValue,
    ScenarioResult,
)

PLUS = np.array([1, 1]) / np.sqrt(2)
MINUS = np.array([1, -1]) / np.sqrt(2)


def product_sign_basis():
    """|++>, |-+>, |+->, |--> with the first factor on qubit 1."""
    columns = [np.kron(PLUS, PLUS), np.kron(MINUS, PLUS), np.kron(PLUS, MINUS), np.kron(MINUS, MINUS)]
    return validate_basis(np.column_stack(columns), "sign x sign")


def werner_like_state(p: float):
    psi = np.array([1, 1, 1, -1]) / 2
    return validate_density(p * np.outer(psi, psi) + (1 - p) / 4 * np.eye(4))


def expected_table(p: float) -> np.ndarray:
    table = np.full((4, 4), (1 + p) / 16)
    for i in range(4):
        table[i, 3 - i] = (1 - 3 * p) / 16
    return table


def level_one_gap(p: float) -> float:
    """q2^2 - q3 in closed form."""
    return 9 * p ** 4 / 256 + 3 * p ** 3 / 128 - 3 * p ** 2 / 256


def _pipeline(inputs: dict, config: DetectionConfig) -> dict:
    rho, basis_a, basis_f = inputs["rho"], inputs["basis_a"], inputs["basis_f"]
    table = kd_distribution(rho, basis_a, basis_f)
    q = moments(table, 3)
    row, col = marginals(table, config.tol)
    report = detect_kd_nonpositivity(rho, basis_a, basis_f, config)
    return {
        "kd_entries": table.entries,
        "q2_squared_minus_q3": q.q(2).real ** 2 - q.q(3).real,
        "row_marginals": row,
        "col_marginals": col,
        "verdict": report.label,
        "detection": report,
    }


class Example1Scenario:
    SCENARIO_ID = 1
    DEFAULTS = {"p": 0.6}

    def build(self, p: float = 0.6) -> ScenarioResult:
        if not 0.0 <= p <= 1.0:
            raise ParameterOutOfRange(f"mixing weight p must lie in [0, 1], got {p}")

        expected = {
            "kd_entries": ExpectedValue(expected_table(p), PAPER_TABLE),
            "q2_squared_minus_q3": ExpectedValue(level_one_gap(p), PAPER_FORMULA),
            "row_marginals": ExpectedValue(np.full(4, 0.25), DERIVED_ORACLE),
            "col_marginals": ExpectedValue(np.full(4, 0.25), DERIVED_ORACLE),
            "verdict": ExpectedValue("Detected(1)" if p > 1 / 3 else "NotDetected", PAPER_FORMULA),
        }
        inputs = {
            "rho": werner_like_state(p),
            "basis_a": computational_basis(4),
            "basis_f": product_sign_basis(),
        }
        return ScenarioResult("example1", {"p": p}, inputs, expected, _pipeline)


def example1(p: float = 0.6) -> ScenarioResult:
    return Example1Scenario().build(p)

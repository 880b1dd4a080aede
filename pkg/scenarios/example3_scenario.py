"""
Qubit coherence witnessed through the extended KD table over the chain
(computational, B(beta), computational), where B(beta) is unbiased to the
computational basis.
"""
import math

import numpy as np

from config.detection_config import DetectionConfig
from core.errors import ParameterOutOfRange
from core.kd_distribution import extended_kd, l1_coherence, total_nonpositivity
from core.linalg import computational_basis, validate_basis, validate_density
from core.moments import detect_coherence
from scenarios.scenario_result import DERIVED_ORACLE, PAPER_FORMULA, ExpectedValue, ScenarioResult

PHASE_TOL = 1e-12


def qubit_state(theta: float, alpha: float):
    """cos(theta/2)|0> + sin(theta/2) e^{i alpha}|1>."""
    psi = np.array([math.cos(theta / 2), math.sin(theta / 2) * np.exp(1j * alpha)])
    return validate_density(np.outer(psi, psi.conj()))


def unbiased_basis(beta: float):
    """b_1 = (|0> + e^{i beta}|1>)/sqrt(2), b_2 = (|0> - e^{i beta}|1>)/sqrt(2)."""
    phase = np.exp(1j * beta)
    return validate_basis(np.array([[1, 1], [phase, -phase]]) / np.sqrt(2), f"B({beta:.6g})")


def expected_chain_table(theta: float, alpha: float, beta: float) -> np.ndarray:
    """Entry (i, k, j) of the (A, B, A) table from the closed forms."""
    table = np.zeros((2, 2, 2), dtype=np.complex128)
    cross = math.sin(theta) / 4
    for k, sign in enumerate((1, -1)):
        table[0, k, 0] = math.cos(theta / 2) ** 2 / 2
        table[1, k, 1] = math.sin(theta / 2) ** 2 / 2
        table[0, k, 1] = sign * np.exp(-1j * (alpha - beta)) * cross
        table[1, k, 0] = sign * np.exp(1j * (alpha - beta)) * cross
    return table


def _phase_offset(alpha: float, beta: float) -> float:
    """alpha - beta reduced to [0, 2 pi)."""
    return (alpha - beta) % (2 * math.pi)


def _close_to(offset: float, target: float) -> bool:
    gap = abs(offset - target)
    return min(gap, 2 * math.pi - gap) < PHASE_TOL


def _pipeline(inputs: dict, config: DetectionConfig) -> dict:
    rho, basis_a, basis_b = inputs["rho"], inputs["basis_a"], inputs["basis_b"]
    table = extended_kd(rho, (basis_a, basis_b, basis_a))
    report = detect_coherence(rho, basis_a, basis_b, config.with_overrides(m_max=max(config.m_max, 2)))
    return {
        "extended_entries": table.entries,
        "l1_coherence": l1_coherence(rho, basis_a),
        "total_nonpositivity": total_nonpositivity(table),
        "det_h1": report.determinant(1),
        "det_h2": report.determinant(2),
        "verdict": report.label,
        "detection": report,
    }


class Example3Scenario:
    SCENARIO_ID = 3
    DEFAULTS = {"theta": math.pi / 2, "alpha": 0.0, "beta": 0.0}

    def build(self, theta: float = math.pi / 2, alpha: float = 0.0, beta: float = 0.0) -> ScenarioResult:
        if not 0.0 <= theta <= math.pi:
            raise ParameterOutOfRange(f"theta must lie in [0, pi], got {theta}")
        for name, value in (("alpha", alpha), ("beta", beta)):
            if not 0.0 <= value <= 2 * math.pi:
                raise ParameterOutOfRange(f"{name} must lie in [0, 2 pi], got {value}")

        coherence = abs(math.sin(theta))
        spread = math.sin(theta) ** 2
        expected = {
            "extended_entries": ExpectedValue(expected_chain_table(theta, alpha, beta), PAPER_FORMULA),
            "l1_coherence": ExpectedValue(coherence, PAPER_FORMULA),
            "total_nonpositivity": ExpectedValue(coherence, DERIVED_ORACLE),
        }

        offset = _phase_offset(alpha, beta)
        interior = 0.0 < theta < math.pi and coherence > 1e-12
        if not interior:
            expected["verdict"] = ExpectedValue("NotDetected", DERIVED_ORACLE)
        elif _close_to(offset, 0.0):
            expected["det_h1"] = ExpectedValue(-3 * spread / 16, DERIVED_ORACLE)
            expected["verdict"] = ExpectedValue("Detected(1)", PAPER_FORMULA)
        elif _close_to(offset, math.pi / 2):
            q = spread / 16
            expected["det_h1"] = ExpectedValue(spread * (5 - 4 * spread) / 16, DERIVED_ORACLE)
            expected["det_h2"] = ExpectedValue(-q ** 2 * (1 - 12 * q), DERIVED_ORACLE)
            expected["verdict"] = ExpectedValue("Detected(2)", PAPER_FORMULA)

        inputs = {
            "rho": qubit_state(theta, alpha),
            "basis_a": computational_basis(2),
            "basis_b": unbiased_basis(beta),
        }
        return ScenarioResult("example3", {"theta": theta, "alpha": alpha, "beta": beta}, inputs, expected, _pipeline)


def example3(theta: float = math.pi / 2, alpha: float = 0.0, beta: float = 0.0) -> ScenarioResult:
    return Example3Scenario().build(theta, alpha, beta)

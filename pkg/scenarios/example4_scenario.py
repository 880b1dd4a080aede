"""
Qubit driven by a field rotating about z, started in the maximally coherent
state of the initial Hamiltonian. The MHQ work table is checked against its
closed form and the second Hankel level against the negativity.
"""
import math

import numpy as np

from config.detection_config import DetectionConfig
from core.kd_distribution import MHQDistribution, mhq, negativity
from core.moments import DetectionReport, detect_work_nonclassicality, hierarchy_detect, moments
from core.work import mean_work, rotating_qubit_scenario, work_distribution, work_quasiprob
from scenarios.scenario_result import DERIVED_ORACLE, PAPER_FORMULA, ExpectedValue, ScenarioResult

VERDICT_LEVEL = 2


def closed_form_det_h2(table: np.ndarray) -> float:
    """det H_2 from direct power sums of the closed-form entries."""
    entries = np.asarray(table, dtype=float).ravel()
    power_sums = [float(np.sum(entries ** n)) for n in range(1, 6)]
    hankel = np.array([[power_sums[i + j] for j in range(3)] for i in range(3)])
    return float(np.linalg.det(hankel))


def closed_form_verdict(table: np.ndarray) -> str:
    """Hierarchy verdict up to level 2 on the closed-form table."""
    report = hierarchy_detect(moments(MHQDistribution(table), 2 * VERDICT_LEVEL + 1), VERDICT_LEVEL)
    return report.label


def _pipeline(inputs: dict, config: DetectionConfig) -> dict:
    proc = inputs["process"]
    table = mhq(work_quasiprob(proc))
    report = detect_work_nonclassicality(table, config.with_overrides(m_max=max(config.m_max, 2)))
    distribution = work_distribution(table, proc.energies_initial, proc.energies_final,
                                     merge_rel_tol=config.merge_rel_tol, tol=config.tol)
    return {
        "mhq_entries": table.entries,
        "negativity": negativity(table),
        "det_h2": report.determinant(2),
        "mean_work": mean_work(proc),
        "work_first_moment": distribution.mean(),
        "verdict": report.label if report.min_detection_level <= VERDICT_LEVEL else DetectionReport.NOT_DETECTED,
        "work_distribution": distribution,
        "detection": report,
    }


class Example4Scenario:
    SCENARIO_ID = 4
    DEFAULTS = {"omega": 1.0, "rabi": 2.0, "t": math.pi / 2}
    # det H_2 at the defaults, quoted to four significant figures
    DEFAULT_DET_H2 = -2.0736e-4

    def _expected_det_h2(self, omega: float, rabi: float, t: float, closed_form: np.ndarray) -> ExpectedValue:
        at_defaults = all(math.isclose(value, self.DEFAULTS[key])
                          for key, value in {"omega": omega, "rabi": rabi, "t": t}.items())
        if at_defaults:
            return ExpectedValue(self.DEFAULT_DET_H2, PAPER_FORMULA, 1e-10)
        return ExpectedValue(closed_form_det_h2(closed_form), DERIVED_ORACLE, 1e-10)

    def build(self, omega: float = 1.0, rabi: float = 2.0, t: float = math.pi / 2) -> ScenarioResult:
        proc, closed_form = rotating_qubit_scenario(omega, rabi, t, 0.5, 0.5)
        gap = math.hypot(omega, rabi)
        energies = np.array([-gap / 2, gap / 2])
        work = energies[None, :] - energies[:, None]
        closed_negativity = float(np.sum(np.abs(closed_form)) - 1.0)

        expected = {
            "mhq_entries": ExpectedValue(closed_form, PAPER_FORMULA, 1e-10),
            "negativity": ExpectedValue(closed_negativity, DERIVED_ORACLE, 1e-10),
            "det_h2": self._expected_det_h2(omega, rabi, t, closed_form),
            "work_first_moment": ExpectedValue(float(np.sum(closed_form * work)), DERIVED_ORACLE, 1e-10),
            "verdict": ExpectedValue(closed_form_verdict(closed_form), DERIVED_ORACLE),
        }

        inputs = {"process": proc}
        return ScenarioResult("example4", {"omega": omega, "rabi": rabi, "t": t}, inputs, expected, _pipeline)


def example4(omega: float = 1.0, rabi: float = 2.0, t: float = math.pi / 2) -> ScenarioResult:
    return Example4Scenario().build(omega, rabi, t)

"""
Moment sequences of quasiprobability tables and the Hankel-determinant
hierarchy built on them.

For a positive table every Hankel matrix [H_m]_ij = q_{i+j+1} is positive
semidefinite, so a negative determinant at any level certifies that the table
has a negative or non-real entry. A positive table also has real moments, so
non-real moments are a certificate on their own. The converse does not hold:
NotDetected never means the table is positive.
"""
import logging
from dataclasses import dataclass, field, replace
from typing import ClassVar

import numpy as np

from config.detection_config import DetectionConfig
from core.errors import InsufficientMoments, InvalidParameter, NotMUB, NotNormalized
from core.kd_distribution import (
    MHQDistribution,
    OracleVerdict,
    entry_nonpositivity_oracle,
    extended_kd,
    kd_distribution,
    l1_coherence,
    negativity,
)
from core.linalg import mub_check
from core.quantum_types import DensityMatrix, OrthonormalBasis, frozen_array
from core.utils.serialization import encode_complex_array

logger = logging.getLogger(__name__)

NORMALIZATION_TOL = 1e-8


@dataclass(frozen=True)
class MomentVector:
    """values[n - 1] holds the n-th power sum."""
    values: np.ndarray
    source: str = ""

    def __post_init__(self):
        object.__setattr__(self, 'values', frozen_array(self.values, "moments", ndim=1))
        if self.values.size == 0:
            raise InvalidParameter("a moment vector needs at least the first moment")
        if abs(self.values[0] - 1.0) > NORMALIZATION_TOL:
            raise NotNormalized(f"first moment is {self.values[0]:.12g}, the source table is not normalized")

    def __len__(self) -> int:
        return self.values.shape[0]

    def q(self, n: int) -> complex:
        return complex(self.values[n - 1])


@dataclass(frozen=True)
class HankelReport:
    level: int
    matrix: np.ndarray
    determinant: float
    imaginary_residue: float

    @property
    def norm_inf(self) -> float:
        return float(np.linalg.norm(self.matrix, np.inf))

    def to_dict(self) -> dict:
        return {
            "level": self.level,
            "determinant": self.determinant,
            "imaginary_residue": self.imaginary_residue,
            "matrix": self.matrix.tolist(),
        }


@dataclass(frozen=True)
class DetectionReport:
    verdict: str
    level: int | None
    reports: tuple
    tolerances: dict
    source: str = ""
    oracle_verdict: OracleVerdict | None = None
    quantities: dict = field(default_factory=dict)
    moment_vector: MomentVector | None = None

    DETECTED: ClassVar[str] = "Detected"
    NOT_DETECTED: ClassVar[str] = "NotDetected"
    NON_REAL_MOMENTS: ClassVar[str] = "NonRealMoments"

    @property
    def certifies_nonpositivity(self) -> bool:
        return self.verdict in (self.DETECTED, self.NON_REAL_MOMENTS)

    @property
    def sound(self) -> bool:
        """False only when a certificate contradicts a Positive oracle."""
        if self.oracle_verdict is None or not self.certifies_nonpositivity:
            return True
        return not self.oracle_verdict.is_positive

    @property
    def label(self) -> str:
        """Detected(m), NotDetected or NonRealMoments."""
        if self.verdict == self.DETECTED:
            return f"{self.DETECTED}({self.level})"
        return self.verdict

    @property
    def min_detection_level(self) -> int:
        """m when detected at level m, 0 when not detected, -1 for non-real moments."""
        if self.verdict == self.DETECTED:
            return self.level
        return -1 if self.verdict == self.NON_REAL_MOMENTS else 0

    def determinant(self, level: int) -> float:
        return self.reports[level - 1].determinant

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "level": self.level,
            "source": self.source,
            "determinants": {str(r.level): r.determinant for r in self.reports},
            "hankel": [r.to_dict() for r in self.reports],
            "oracle": self.oracle_verdict.to_dict() if self.oracle_verdict else None,
            "moments": moments_to_dict(self.moment_vector) if self.moment_vector is not None else None,
            "quantities": dict(self.quantities),
            "tolerances": dict(self.tolerances),
            "summary": self.summary(),
        }

    def summary(self) -> str:
        oracle = f"; oracle {self.oracle_verdict.kind}" if self.oracle_verdict else ""
        if self.verdict == self.DETECTED:
            return (f"{self.source} nonpositivity detected at level {self.level} "
                    f"(det H_{self.level} = {self.determinant(self.level):.6e}){oracle}")
        if self.verdict == self.NON_REAL_MOMENTS:
            return f"{self.source} nonpositivity certified by non-real moments{oracle}"
        return (f"{self.source} not detected up to level {len(self.reports)} "
                f"(not detected does not mean positive){oracle}")


def moments(table, n_max: int) -> MomentVector:
    """Power sums sum(entry^n) for n = 1..n_max over every entry of `table`."""
    if n_max < 1:
        raise InvalidParameter(f"number of moments must be positive, got {n_max}")
    flat = np.asarray(table.entries, dtype=np.complex128).ravel()
    values = np.empty(n_max, dtype=np.complex128)
    power = flat.copy()
    for n in range(n_max):
        values[n] = power.sum()
        power = power * flat
    return MomentVector(values, getattr(table, 'SOURCE', ""))


def hankel(moment_vector: MomentVector, level: int) -> HankelReport:
    if level < 1:
        raise InvalidParameter(f"Hankel level must be positive, got {level}")
    needed = 2 * level + 1
    if len(moment_vector) < needed:
        raise InsufficientMoments(f"level {level} needs {needed} moments, got {len(moment_vector)}")

    used = moment_vector.values[:needed]
    index = np.add.outer(np.arange(level + 1), np.arange(level + 1))
    matrix = used.real[index]
    return HankelReport(
        level=level,
        matrix=matrix,
        determinant=float(np.linalg.det(matrix)),
        imaginary_residue=float(np.max(np.abs(used.imag))),
    )


def hierarchy_detect(moment_vector: MomentVector, m_max: int = 3, det_rel_tol: float = 1e-12,
                     imag_tol: float = 1e-10) -> DetectionReport:
    """
    Scan levels 1..m_max and stop at the first negative determinant.

    A level counts as detected when det H_m < -det_rel_tol * max(1, ||H_m||_inf^(m+1)).
    Every level is still evaluated so reports carry the full sequence.
    """
    if m_max < 1:
        raise InvalidParameter(f"m_max must be positive, got {m_max}")
    needed = 2 * m_max + 1
    if len(moment_vector) < needed:
        raise InsufficientMoments(f"m_max = {m_max} needs {needed} moments, got {len(moment_vector)}")

    reports = tuple(hankel(moment_vector, m) for m in range(1, m_max + 1))
    config = DetectionConfig(det_rel_tol=det_rel_tol, imag_tol=imag_tol, m_max=m_max)
    tolerances = {"m_max": m_max, "det_rel_tol": det_rel_tol, "imag_tol": imag_tol}

    residue = float(np.max(np.abs(moment_vector.values[:needed].imag)))
    if residue > imag_tol:
        logger.debug(f"Moments carry an imaginary part of {residue:.3e}")
        return DetectionReport(DetectionReport.NON_REAL_MOMENTS, None, reports, tolerances, moment_vector.source,
                               moment_vector=moment_vector)

    for report in reports:
        if report.determinant < -config.det_tolerance(report.norm_inf, report.level):
            return DetectionReport(DetectionReport.DETECTED, report.level, reports, tolerances,
                                   moment_vector.source, moment_vector=moment_vector)

    return DetectionReport(DetectionReport.NOT_DETECTED, None, reports, tolerances, moment_vector.source,
                           moment_vector=moment_vector)


def _run_hierarchy(table, config: DetectionConfig, quantities: dict) -> DetectionReport:
    moment_vector = moments(table, 2 * config.m_max + 1)
    report = hierarchy_detect(moment_vector, config.m_max, config.det_rel_tol, config.imag_tol)
    oracle = entry_nonpositivity_oracle(table, config.entry_tol)
    tolerances = {**report.tolerances, "entry_tol": config.entry_tol, "tol": config.tol}
    report = replace(report, oracle_verdict=oracle, quantities=quantities, tolerances=tolerances)

    if not report.sound:
        logger.error(f"Soundness violation: {report.verdict} on a table the entry oracle calls Positive")
    return report


def detect_kd_nonpositivity(rho: DensityMatrix, basis_a: OrthonormalBasis, basis_f: OrthonormalBasis,
                            config: DetectionConfig | None = None, m_max: int | None = None) -> DetectionReport:
    config = (config or DetectionConfig()).with_overrides(m_max=m_max)
    table = kd_distribution(rho, basis_a, basis_f)
    return _run_hierarchy(table, config, {})


def detect_coherence(rho: DensityMatrix, basis_a: OrthonormalBasis, basis_b: OrthonormalBasis,
                     config: DetectionConfig | None = None, m_max: int | None = None) -> DetectionReport:
    """Hierarchy on the extended table over the chain (A, B, A); B must be unbiased to A."""
    config = (config or DetectionConfig()).with_overrides(m_max=m_max)
    if not mub_check(basis_a, basis_b, config.tol):
        raise NotMUB(f"basis '{basis_b.label}' is not mutually unbiased with '{basis_a.label}'")

    table = extended_kd(rho, (basis_a, basis_b, basis_a))
    coherence = l1_coherence(rho, basis_a)
    report = _run_hierarchy(table, config, {"l1_coherence": coherence})

    if report.certifies_nonpositivity and coherence <= config.tol:
        logger.error(f"Coherence certified for a state with l1 coherence {coherence:.3e}")
    return report


def detect_work_nonclassicality(mhq_table: MHQDistribution, config: DetectionConfig | None = None,
                                m_max: int | None = None) -> DetectionReport:
    config = (config or DetectionConfig()).with_overrides(m_max=m_max)
    work_negativity = negativity(mhq_table)
    report = _run_hierarchy(mhq_table, config, {"negativity": work_negativity})

    if report.certifies_nonpositivity and work_negativity <= config.tol:
        logger.error(f"Nonclassical work certified with negativity {work_negativity:.3e}")
    return report


def moments_to_dict(moment_vector: MomentVector) -> dict:
    return {"source": moment_vector.source, "values": encode_complex_array(moment_vector.values)}

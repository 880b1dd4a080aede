"""
Work statistics of a closed quantum process rho -> U rho U^dagger between
the initial and final Hamiltonians: two-point-measurement joint
probabilities, the KD work quasiprobability, work distributions and the
rotating-field qubit.
"""
import logging
import math
from dataclasses import dataclass
from typing import ClassVar

import numpy as np

from core.errors import (
    DecompositionMismatch,
    DimensionMismatch,
    InvalidBlochParameters,
    InvalidParameter,
    NotNormalized,
)
from core.kd_distribution import KDDistribution, kd_distribution
from core.linalg import (
    DEFAULT_TOL,
    DEGENERACY_REL_TOL,
    IDENTITY2,
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    basis_from_projectors,
    hermitian_eigendecomposition,
    validate_density,
    validate_unitary,
)
from core.quantum_types import DensityMatrix, HermitianObservable, OrthonormalBasis, frozen_array

logger = logging.getLogger(__name__)

MERGE_REL_TOL = 1e-9
NORMALIZATION_TOL = 1e-8


@dataclass(frozen=True)
class WorkProcess:
    rho: DensityMatrix
    h_initial: HermitianObservable
    h_final: HermitianObservable
    unitary: np.ndarray
    energies_initial: np.ndarray
    projectors_initial: tuple
    energies_final: np.ndarray
    projectors_final: tuple
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        dims = {self.rho.dim, self.h_initial.dim, self.h_final.dim}
        if len(dims) != 1:
            raise DimensionMismatch(f"state and Hamiltonians have dimensions {sorted(dims)}")
        object.__setattr__(self, 'unitary', validate_unitary(self.unitary, self.tol))
        if self.unitary.shape[0] != self.rho.dim:
            raise DimensionMismatch(f"unitary of shape {self.unitary.shape} for dimension {self.rho.dim}")

        for name in ('initial', 'final'):
            energies = frozen_array(getattr(self, f'energies_{name}'), f"{name} energies", dtype=np.float64, ndim=1)
            projectors = tuple(frozen_array(p, f"{name} projector", ndim=2)
                               for p in getattr(self, f'projectors_{name}'))
            if len(projectors) != len(energies):
                raise DimensionMismatch(f"{len(energies)} {name} energies but {len(projectors)} projectors")
            object.__setattr__(self, f'energies_{name}', energies)
            object.__setattr__(self, f'projectors_{name}', projectors)
            self._check_reconstruction(getattr(self, f'h_{name}'), energies, projectors, name)

    def _check_reconstruction(self, hamiltonian, energies, projectors, name):
        rebuilt = sum(e * p for e, p in zip(energies, projectors))
        scale = max(1.0, float(np.max(np.abs(hamiltonian.entries))))
        defect = float(np.max(np.abs(rebuilt - hamiltonian.entries)))
        if defect > max(self.tol, 1e-9) * scale:
            raise DecompositionMismatch(f"{name} spectral decomposition misses the Hamiltonian by {defect:.3e}")

    @classmethod
    def from_hamiltonians(cls, rho: DensityMatrix, h_initial: HermitianObservable, h_final: HermitianObservable,
                          unitary, tol: float = DEFAULT_TOL, degeneracy_rel_tol: float = DEGENERACY_REL_TOL):
        energies_i, projectors_i = hermitian_eigendecomposition(h_initial, tol, degeneracy_rel_tol)
        energies_f, projectors_f = hermitian_eigendecomposition(h_final, tol, degeneracy_rel_tol)
        return cls(rho, h_initial, h_final, unitary, energies_i, tuple(projectors_i),
                   energies_f, tuple(projectors_f), tol)

    @property
    def dim(self) -> int:
        return self.rho.dim

    def evolved_state(self) -> np.ndarray:
        return self.unitary @ self.rho.entries @ self.unitary.conj().T


@dataclass(frozen=True)
class WorkDistribution:
    """Atoms (w, weight) sorted by w; weights may be negative for quasiprobabilities."""
    atoms: tuple
    convention: str = "final-minus-initial"

    FINAL_MINUS_INITIAL: ClassVar[str] = "final-minus-initial"
    INITIAL_MINUS_FINAL: ClassVar[str] = "initial-minus-final"
    CSV_HEADER: ClassVar[tuple] = ("w", "weight")

    def __post_init__(self):
        atoms = tuple((float(w), float(weight)) for w, weight in self.atoms)
        object.__setattr__(self, 'atoms', atoms)
        total = sum(weight for _, weight in atoms)
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise NotNormalized(f"work distribution weights sum to {total:.12g}")

    @property
    def work_values(self) -> np.ndarray:
        return np.array([w for w, _ in self.atoms])

    @property
    def weights(self) -> np.ndarray:
        return np.array([weight for _, weight in self.atoms])

    def mean(self) -> float:
        return float(np.dot(self.work_values, self.weights))

    def to_rows(self) -> list:
        return [[w, weight] for w, weight in self.atoms]

    def to_dict(self) -> dict:
        return {"convention": self.convention, "atoms": [{"w": w, "weight": weight} for w, weight in self.atoms]}


def tpm_joint(proc: WorkProcess) -> np.ndarray:
    """p_ij = Tr[U^dagger P_j(T) U P_i rho P_i]."""
    u = proc.unitary
    joint = np.empty((len(proc.projectors_initial), len(proc.projectors_final)))
    for i, p_i in enumerate(proc.projectors_initial):
        collapsed = u @ (p_i @ proc.rho.entries @ p_i) @ u.conj().T
        for j, p_j in enumerate(proc.projectors_final):
            joint[i, j] = np.trace(p_j @ collapsed).real
    return joint


def energy_bases(proc: WorkProcess):
    """Initial energy basis and the Heisenberg-evolved final one, U^dagger |E_j(T)>."""
    basis_initial = basis_from_projectors(proc.projectors_initial, "H_initial", proc.tol)
    basis_final = basis_from_projectors(proc.projectors_final, "H_final", proc.tol)
    evolved = OrthonormalBasis(proc.unitary.conj().T @ basis_final.vectors, "U^dagger H_final U")
    return basis_initial, evolved


def work_quasiprob(proc: WorkProcess) -> KDDistribution:
    """Q_ij = Tr[U^dagger P_j(T) U P_i rho]; rank-1 energy projectors only."""
    basis_initial, evolved_final = energy_bases(proc)
    return kd_distribution(proc.rho, basis_initial, evolved_final)


def work_distribution(table, energies_initial, energies_final,
                      convention: str = WorkDistribution.FINAL_MINUS_INITIAL,
                      merge_rel_tol: float = MERGE_REL_TOL, tol: float = DEFAULT_TOL) -> WorkDistribution:
    """
    Place weight Q_ij at W_ij = E_j(T) - E_i(0), merging work values closer
    than merge_rel_tol * max(1, max|E|). The initial-minus-final convention
    flips every atom.
    """
    entries = np.asarray(getattr(table, 'entries', table))
    if entries.size == 0:
        raise InvalidParameter("a work distribution needs at least one initial and one final energy")
    if np.iscomplexobj(entries):
        residue = float(np.max(np.abs(entries.imag)))
        if residue > tol:
            raise InvalidParameter(f"work weights must be real, got imaginary part {residue:.3e}")
        entries = entries.real
    energies_initial = np.asarray(energies_initial, dtype=float)
    energies_final = np.asarray(energies_final, dtype=float)
    if entries.shape != (len(energies_initial), len(energies_final)):
        raise DimensionMismatch(f"table of shape {entries.shape} for {len(energies_initial)}x{len(energies_final)} energies")

    if convention == WorkDistribution.FINAL_MINUS_INITIAL:
        work = energies_final[None, :] - energies_initial[:, None]
    elif convention == WorkDistribution.INITIAL_MINUS_FINAL:
        work = energies_initial[:, None] - energies_final[None, :]
    else:
        raise InvalidParameter(f"unknown work sign convention '{convention}'")

    scale = max(1.0, float(np.max(np.abs(np.concatenate([energies_initial, energies_final])))))
    order = np.argsort(work.ravel(), kind='stable')
    values = work.ravel()[order]
    weights = entries.ravel()[order]

    atoms = []
    group_w, group_weight, anchor = [values[0]], weights[0], values[0]
    for w, weight in zip(values[1:], weights[1:]):
        if w - anchor <= merge_rel_tol * scale:
            group_w.append(w)
            group_weight += weight
        else:
            atoms.append((float(np.mean(group_w)), float(group_weight)))
            group_w, group_weight, anchor = [w], weight, w
    atoms.append((float(np.mean(group_w)), float(group_weight)))

    # atoms carrying exactly zero weight are not part of the support
    return WorkDistribution(tuple(a for a in atoms if a[1] != 0.0), convention)


def tpm_work_distribution(proc: WorkProcess, convention: str = WorkDistribution.FINAL_MINUS_INITIAL,
                          merge_rel_tol: float = MERGE_REL_TOL) -> WorkDistribution:
    return work_distribution(tpm_joint(proc), proc.energies_initial, proc.energies_final,
                             convention, merge_rel_tol, proc.tol)


def mean_work(proc: WorkProcess) -> float:
    """<W> = Tr[H(T) U rho U^dagger] - Tr[H(0) rho]."""
    final = np.trace(proc.h_final.entries @ proc.evolved_state())
    initial = np.trace(proc.h_initial.entries @ proc.rho.entries)
    return float((final - initial).real)


def _rotating_gap(omega: float, rabi: float) -> float:
    if not (math.isfinite(omega) and math.isfinite(rabi)):
        raise InvalidParameter("field parameters must be finite")
    if omega == 0 and rabi == 0:
        raise InvalidParameter("omega and Omega cannot both vanish")
    return math.hypot(omega, rabi)


def rotating_hamiltonian(omega: float, rabi: float, t: float) -> HermitianObservable:
    """H(t) = [Omega (cos wt X + sin wt Y) + w Z] / 2."""
    return HermitianObservable(0.5 * (rabi * (math.cos(omega * t) * PAULI_X + math.sin(omega * t) * PAULI_Y)
                                      + omega * PAULI_Z))


def rotating_unitary(omega: float, rabi: float, t: float) -> np.ndarray:
    """U(t) = exp(-i w Z t/2) exp(-i Omega X t/2)."""
    frame = math.cos(omega * t / 2) * IDENTITY2 - 1j * math.sin(omega * t / 2) * PAULI_Z
    drive = math.cos(rabi * t / 2) * IDENTITY2 - 1j * math.sin(rabi * t / 2) * PAULI_X
    return frame @ drive


def rotating_energies(omega: float, rabi: float) -> np.ndarray:
    gap = _rotating_gap(omega, rabi)
    return np.array([-gap / 2, gap / 2])


def rotating_projectors(omega: float, rabi: float, t: float) -> tuple:
    """Ground (index 0) and excited projectors of H(t)."""
    gap = _rotating_gap(omega, rabi)
    field_axis = (rabi * (PAULI_X * math.cos(omega * t) + PAULI_Y * math.sin(omega * t)) + omega * PAULI_Z) / gap
    return (0.5 * (IDENTITY2 - field_axis), 0.5 * (IDENTITY2 + field_axis))


def rotating_initial_state(omega: float, rabi: float, population: float, coherence: float,
                           tol: float = DEFAULT_TOL) -> DensityMatrix:
    """rho = G P_0(0) + (1 - G) P_1(0) + xi (w X - Omega Z) / Delta."""
    if not 0.0 <= population <= 1.0:
        raise InvalidBlochParameters(f"ground population must lie in [0, 1], got {population}")
    if coherence ** 2 > population * (1.0 - population) + tol:
        raise InvalidBlochParameters(
            f"|xi| = {abs(coherence):.6g} exceeds sqrt(G(1 - G)) = {math.sqrt(population * (1 - population)):.6g}")
    gap = _rotating_gap(omega, rabi)
    ground, excited = rotating_projectors(omega, rabi, 0.0)
    rho = population * ground + (1.0 - population) * excited + coherence * (omega * PAULI_X - rabi * PAULI_Z) / gap
    return validate_density(rho, tol)


def rotating_closed_form_mhq(omega: float, rabi: float, t: float) -> np.ndarray:
    """MHQ table of the maximally coherent start (G = xi = 1/2)."""
    gap_sq = 4 * (omega ** 2 + rabi ** 2)
    c = math.cos(rabi * t)
    return np.array([
        [omega ** 2 - omega * rabi + 2 * rabi ** 2 + omega * (omega + rabi) * c, omega * (omega + rabi) * (1 - c)],
        [omega * (omega - rabi) * (1 - c), omega ** 2 + omega * rabi + 2 * rabi ** 2 + omega * (omega - rabi) * c],
    ]) / gap_sq


def rotating_qubit_scenario(omega: float, rabi: float, t: float, population: float = 0.5, coherence: float = 0.5,
                            tol: float = DEFAULT_TOL):
    """
    Qubit in a field rotating about z, driven from time 0 to t.

    Spectra come from the closed forms. The closed-form MHQ table is
    returned only for the maximally coherent start, otherwise None.
    """
    rho = rotating_initial_state(omega, rabi, population, coherence, tol)
    energies = rotating_energies(omega, rabi)
    proc = WorkProcess(
        rho=rho,
        h_initial=rotating_hamiltonian(omega, rabi, 0.0),
        h_final=rotating_hamiltonian(omega, rabi, t),
        unitary=rotating_unitary(omega, rabi, t),
        energies_initial=energies,
        projectors_initial=rotating_projectors(omega, rabi, 0.0),
        energies_final=energies,
        projectors_final=rotating_projectors(omega, rabi, t),
        tol=tol,
    )

    closed_form = None
    if math.isclose(population, 0.5, abs_tol=1e-12) and math.isclose(coherence, 0.5, abs_tol=1e-12):
        closed_form = rotating_closed_form_mhq(omega, rabi, t)
    logger.debug(f"Rotating qubit at omega={omega}, Omega={rabi}, t={t}, G={population}, xi={coherence}")
    return proc, closed_form

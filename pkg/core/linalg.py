"""
Small dense complex linear algebra: validation of states, observables and
bases, Hermitian spectral decomposition with degeneracy grouping, and
mutually-unbiased-basis helpers.

All functions are pure; inputs are never modified.
"""
import logging

import numpy as np

from core.errors import (
    ConvergenceFailure,
    DegenerateSpectrum,
    DimensionMismatch,
    InvalidParameter,
    NotHermitian,
    NotNormalized,
    NotOrthonormal,
    NotPSD,
    NotUnitary,
    TraceNotOne,
)
from core.quantum_types import (
    DensityMatrix,
    HermitianObservable,
    OrthonormalBasis,
    StateVector,
    frozen_array,
)

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-10
DEGENERACY_REL_TOL = 1e-9
SMALL_OVERLAP_WARNING = 1e-8

IDENTITY2 = np.eye(2, dtype=np.complex128)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)


def _hermiticity_defect(matrix: np.ndarray) -> float:
    return float(np.max(np.abs(matrix - matrix.conj().T)))


def validate_density(entries, tol: float = DEFAULT_TOL) -> DensityMatrix:
    """Return a DensityMatrix after checking Hermiticity, unit trace and PSD."""
    rho = DensityMatrix(entries)
    matrix = rho.entries

    defect = _hermiticity_defect(matrix)
    if defect > tol:
        raise NotHermitian(f"density matrix is not Hermitian: max|rho - rho^dagger| = {defect:.3e} > {tol:.1e}")

    trace = np.trace(matrix)
    if abs(trace - 1.0) > tol:
        raise TraceNotOne(f"density matrix trace is {trace.real:.12g}{trace.imag:+.3e}j, off by {abs(trace - 1.0):.3e}")

    smallest = float(np.linalg.eigvalsh(matrix)[0])
    if smallest < -tol:
        raise NotPSD(f"density matrix has eigenvalue {smallest:.6g} < -{tol:.1e}")

    return rho


def validate_observable(entries, tol: float = DEFAULT_TOL) -> HermitianObservable:
    observable = HermitianObservable(entries)
    defect = _hermiticity_defect(observable.entries)
    if defect > tol:
        raise NotHermitian(f"observable is not Hermitian: max|H - H^dagger| = {defect:.3e} > {tol:.1e}")
    return observable


def validate_state_vector(amplitudes, tol: float = DEFAULT_TOL) -> StateVector:
    state = StateVector(amplitudes)
    norm = float(np.sum(np.abs(state.amplitudes) ** 2))
    if abs(norm - 1.0) > tol:
        raise NotNormalized(f"state vector has squared norm {norm:.12g}")
    return state


def validate_basis(vectors, label: str = "", tol: float = DEFAULT_TOL) -> OrthonormalBasis:
    """Return an OrthonormalBasis whose columns are `vectors`' columns."""
    basis = OrthonormalBasis(vectors, label)
    gram = basis.vectors.conj().T @ basis.vectors
    defect = float(np.max(np.abs(gram - np.eye(basis.dim))))
    if defect > tol:
        raise NotOrthonormal(f"basis '{label}' is not orthonormal: max|<v_i|v_j> - delta_ij| = {defect:.3e}")
    return basis


def basis_from_states(states, label: str = "", tol: float = DEFAULT_TOL) -> OrthonormalBasis:
    """Build a basis from a list of vectors given as rows (the JSON layout)."""
    rows = np.array(states, dtype=np.complex128)
    if rows.ndim != 2:
        raise DimensionMismatch(f"basis '{label}' must be a list of vectors, got shape {rows.shape}")
    return validate_basis(rows.T, label, tol)


def validate_unitary(matrix, tol: float = DEFAULT_TOL) -> np.ndarray:
    unitary = frozen_array(matrix, "unitary", ndim=2)
    rows, cols = unitary.shape
    if rows != cols:
        raise DimensionMismatch(f"unitary must be square, got shape {unitary.shape}")
    defect = float(np.max(np.abs(unitary.conj().T @ unitary - np.eye(rows))))
    if defect > tol:
        raise NotUnitary(f"max|U^dagger U - I| = {defect:.3e} > {tol:.1e}")
    return unitary


def hermitian_eigendecomposition(observable: HermitianObservable, tol: float = DEFAULT_TOL,
                                 degeneracy_rel_tol: float = DEGENERACY_REL_TOL):
    """
    Spectral decomposition H = sum_g E_g P_g.

    Eigenvalues are returned ascending; eigenvalues closer than
    `degeneracy_rel_tol * max(1, |E|)` share one projector.
    """
    matrix = observable.entries
    defect = _hermiticity_defect(matrix)
    if defect > tol:
        raise NotHermitian(f"observable is not Hermitian: max|H - H^dagger| = {defect:.3e} > {tol:.1e}")

    try:
        values, vectors = np.linalg.eigh(matrix)
    except np.linalg.LinAlgError as e:
        raise ConvergenceFailure(f"Hermitian eigensolver did not converge: {e}") from e

    groups = [[0]]
    for k in range(1, len(values)):
        anchor = values[groups[-1][0]]
        if values[k] - anchor <= degeneracy_rel_tol * max(1.0, abs(anchor)):
            groups[-1].append(k)
        else:
            groups.append([k])

    eigenvalues = np.array([values[g].mean() for g in groups])
    projectors = []
    for g in groups:
        block = vectors[:, g]
        projectors.append(block @ block.conj().T)

    if any(len(g) > 1 for g in groups):
        logger.debug(f"Merged degenerate eigenvalues into ranks {[len(g) for g in groups]}")

    return eigenvalues, projectors


def basis_from_projectors(projectors, label: str = "", tol: float = DEFAULT_TOL) -> OrthonormalBasis:
    """Extract one unit vector per rank-1 projector, in projector order."""
    columns = []
    for k, projector in enumerate(projectors):
        rank = float(np.trace(projector).real)
        if abs(rank - 1.0) > 1e-6:
            raise DegenerateSpectrum(f"projector {k} of '{label}' has rank {rank:.3f}; only rank-1 projectors define a KD basis")
        pivot = int(np.argmax(np.linalg.norm(projector, axis=0)))
        column = projector[:, pivot]
        columns.append(column / np.linalg.norm(column))
    return validate_basis(np.column_stack(columns), label, max(tol, 1e-9))


def mub_check(basis_a: OrthonormalBasis, basis_b: OrthonormalBasis, tol: float = DEFAULT_TOL) -> bool:
    """True iff |<a_i|b_k>|^2 = 1/d for every pair."""
    if basis_a.dim != basis_b.dim:
        raise DimensionMismatch(f"bases have dimensions {basis_a.dim} and {basis_b.dim}")
    overlaps = np.abs(basis_a.vectors.conj().T @ basis_b.vectors) ** 2
    return bool(np.all(np.abs(overlaps - 1.0 / basis_a.dim) <= tol))


def min_overlap(basis_a: OrthonormalBasis, basis_f: OrthonormalBasis) -> float:
    if basis_a.dim != basis_f.dim:
        raise DimensionMismatch(f"bases have dimensions {basis_a.dim} and {basis_f.dim}")
    return float(np.min(np.abs(basis_f.vectors.conj().T @ basis_a.vectors)))


def computational_basis(d: int, label: str = "computational") -> OrthonormalBasis:
    if d < 1:
        raise InvalidParameter(f"dimension must be positive, got {d}")
    return OrthonormalBasis(np.eye(d, dtype=np.complex128), label)


def fourier_basis(d: int) -> OrthonormalBasis:
    """Discrete Fourier basis b_k[j] = exp(2 pi i jk/d)/sqrt(d)."""
    if d < 1:
        raise InvalidParameter(f"dimension must be positive, got {d}")
    j, k = np.meshgrid(np.arange(d), np.arange(d), indexing='ij')
    vectors = np.exp(2j * np.pi * j * k / d) / np.sqrt(d)
    return OrthonormalBasis(vectors, f"fourier-{d}")


def _random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    ginibre = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(ginibre)
    # fix column phases so the draw does not depend on the QR sign convention
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


def random_state_and_bases(d: int, seed: int):
    """Deterministic (rho, A, F) for property tests."""
    if d < 2:
        raise InvalidParameter(f"random inputs need d >= 2, got {d}")
    rng = np.random.default_rng(seed)

    ginibre = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = ginibre @ ginibre.conj().T
    rho = rho / np.trace(rho).real
    rho = 0.5 * (rho + rho.conj().T)

    basis_a = OrthonormalBasis(_random_unitary(d, rng), f"random-a-{seed}")
    basis_f = OrthonormalBasis(_random_unitary(d, rng), f"random-f-{seed}")

    smallest = min_overlap(basis_a, basis_f)
    if smallest < SMALL_OVERLAP_WARNING:
        logger.warning(f"Seed {seed} (d={d}) produced a basis overlap of {smallest:.3e}")

    return validate_density(rho), basis_a, basis_f


def random_observable(d: int, seed: int) -> HermitianObservable:
    rng = np.random.default_rng(seed)
    matrix = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return HermitianObservable(0.5 * (matrix + matrix.conj().T))

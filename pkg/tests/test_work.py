import math

import numpy as np
import pytest

from core.errors import (
    DecompositionMismatch,
    DegenerateSpectrum,
    DimensionMismatch,
    InvalidBlochParameters,
    InvalidParameter,
    NotNormalized,
    NotUnitary,
)
from core.kd_distribution import mhq, negativity
from core.linalg import (
    PAULI_X,
    PAULI_Z,
    hermitian_eigendecomposition,
    random_observable,
    random_state_and_bases,
    validate_density,
)
from core.moments import detect_work_nonclassicality
from core.quantum_types import HermitianObservable
from core.work import (
    WorkDistribution,
    WorkProcess,
    mean_work,
    rotating_closed_form_mhq,
    rotating_hamiltonian,
    rotating_qubit_scenario,
    rotating_unitary,
    tpm_joint,
    tpm_work_distribution,
    work_distribution,
    work_quasiprob,
)

ROOT5 = math.sqrt(5)


@pytest.fixture
def quarter_turn():
    proc, closed_form = rotating_qubit_scenario(1.0, 2.0, math.pi / 2)
    return proc, closed_form


def test_rotating_qubit_mhq_table(quarter_turn):
    proc, closed_form = quarter_turn
    table = mhq(work_quasiprob(proc))

    expected = np.array([[0.2, 0.3], [-0.1, 0.6]])
    assert np.max(np.abs(closed_form - expected)) < 1e-15
    assert np.max(np.abs(table.entries - expected)) < 1e-10
    assert negativity(table) == pytest.approx(0.2, abs=1e-10)


def test_rotating_qubit_second_level_detects(quarter_turn):
    proc, _ = quarter_turn
    report = detect_work_nonclassicality(mhq(work_quasiprob(proc)))

    assert report.label == "Detected(2)"
    assert report.determinant(2) == pytest.approx(-2.0736e-4, abs=1e-10)
    assert report.quantities["negativity"] == pytest.approx(0.2, abs=1e-10)


def test_rotating_qubit_work_atoms(quarter_turn):
    proc, _ = quarter_turn
    distribution = work_distribution(mhq(work_quasiprob(proc)), proc.energies_initial, proc.energies_final)

    assert len(distribution.atoms) == 3
    assert distribution.work_values == pytest.approx([-ROOT5, 0.0, ROOT5], abs=1e-12)
    assert distribution.weights == pytest.approx([-0.1, 0.8, 0.3], abs=1e-10)
    assert distribution.mean() == pytest.approx(0.4 * ROOT5, abs=1e-10)


def test_sign_convention_flips_the_atoms(quarter_turn):
    proc, _ = quarter_turn
    table = mhq(work_quasiprob(proc))
    flipped = work_distribution(table, proc.energies_initial, proc.energies_final,
                                WorkDistribution.INITIAL_MINUS_FINAL)

    assert flipped.convention == "initial-minus-final"
    assert flipped.work_values == pytest.approx([-ROOT5, 0.0, ROOT5], abs=1e-12)
    assert flipped.weights == pytest.approx([0.3, 0.8, -0.1], abs=1e-10)


def test_first_moment_matches_mean_work(quarter_turn):
    proc, _ = quarter_turn
    distribution = work_distribution(mhq(work_quasiprob(proc)), proc.energies_initial, proc.energies_final)

    assert mean_work(proc) == pytest.approx(distribution.mean(), abs=1e-10)


@pytest.mark.parametrize("omega, rabi, t", [(1.0, 0.5, 0.3), (0.7, 3.0, 2.0), (2.0, 1.0, math.pi)])
def test_closed_form_matches_numerics(omega, rabi, t):
    proc, closed_form = rotating_qubit_scenario(omega, rabi, t)

    assert np.max(np.abs(mhq(work_quasiprob(proc)).entries - closed_form)) < 1e-10
    assert np.max(np.abs(closed_form - rotating_closed_form_mhq(omega, rabi, t))) == 0.0


def test_closed_form_is_only_given_for_maximal_coherence():
    _, closed_form = rotating_qubit_scenario(1.0, 2.0, 1.0, population=0.8, coherence=0.1)
    assert closed_form is None


def test_incoherent_start_reduces_to_two_point_measurement():
    proc, _ = rotating_qubit_scenario(1.0, 2.0, math.pi / 2, population=0.7, coherence=0.0)
    table = mhq(work_quasiprob(proc))
    joint = tpm_joint(proc)

    assert np.max(np.abs(table.entries - joint)) < 1e-12
    assert negativity(table) == pytest.approx(0.0, abs=1e-12)
    assert detect_work_nonclassicality(table).verdict == "NotDetected"


def test_two_point_joint_is_a_probability_table(quarter_turn):
    proc, _ = quarter_turn
    joint = tpm_joint(proc)

    assert np.all(joint >= -1e-15)
    assert joint.sum() == pytest.approx(1.0, abs=1e-12)
    assert joint.sum(axis=1) == pytest.approx([0.5, 0.5], abs=1e-12)
    assert tpm_work_distribution(proc).weights.sum() == pytest.approx(1.0, abs=1e-12)


def test_trivial_process_has_a_single_atom():
    rho = validate_density([[0.7, 0.2], [0.2, 0.3]])
    hamiltonian = HermitianObservable(PAULI_X)
    proc = WorkProcess.from_hamiltonians(rho, hamiltonian, hamiltonian, np.eye(2))
    distribution = work_distribution(mhq(work_quasiprob(proc)), proc.energies_initial, proc.energies_final)

    assert len(distribution.atoms) == 1
    assert distribution.atoms[0][0] == 0.0
    assert distribution.atoms[0][1] == pytest.approx(1.0, abs=1e-12)
    assert mean_work(proc) == pytest.approx(0.0, abs=1e-12)


def test_close_work_values_are_merged():
    distribution = work_distribution(np.array([[0.4, 0.6]]), [0.0], [1.0, 1.0 + 1e-12])

    assert len(distribution.atoms) == 1
    assert distribution.atoms[0][1] == pytest.approx(1.0)


def test_complex_weights_are_rejected():
    with pytest.raises(InvalidParameter):
        work_distribution(np.array([[0.5 + 0.1j, 0.5 - 0.1j]]), [0.0], [1.0, 2.0])


def test_unknown_convention_is_rejected(quarter_turn):
    proc, _ = quarter_turn
    with pytest.raises(InvalidParameter):
        work_distribution(mhq(work_quasiprob(proc)), proc.energies_initial, proc.energies_final, "sideways")


def test_table_shape_must_match_energies():
    with pytest.raises(DimensionMismatch):
        work_distribution(np.array([[0.5, 0.5]]), [0.0, 1.0], [1.0, 2.0])


def test_unnormalized_atoms_are_rejected():
    with pytest.raises(NotNormalized):
        WorkDistribution(((0.0, 0.5), (1.0, 0.4)))


def test_degenerate_hamiltonian_has_no_kd_work_table():
    rho = validate_density(np.eye(2) / 2)
    flat = HermitianObservable(np.eye(2))
    proc = WorkProcess.from_hamiltonians(rho, flat, HermitianObservable(PAULI_Z), np.eye(2))

    with pytest.raises(DegenerateSpectrum):
        work_quasiprob(proc)
    assert tpm_joint(proc).shape == (1, 2)


def test_process_needs_a_unitary():
    rho = validate_density(np.eye(2) / 2)
    hamiltonian = HermitianObservable(PAULI_Z)
    with pytest.raises(NotUnitary):
        WorkProcess.from_hamiltonians(rho, hamiltonian, hamiltonian, [[1, 1], [0, 1]])


def test_rotating_unitary_is_unitary():
    u = rotating_unitary(1.3, 0.4, 2.2)
    assert np.max(np.abs(u.conj().T @ u - np.eye(2))) < 1e-14


def test_rotating_hamiltonian_starts_along_x_and_z():
    h = rotating_hamiltonian(1.0, 2.0, 0.0)
    assert np.max(np.abs(h.entries - 0.5 * (2.0 * PAULI_X + 1.0 * PAULI_Z))) < 1e-15


def test_bloch_parameters_are_checked():
    with pytest.raises(InvalidBlochParameters):
        rotating_qubit_scenario(1.0, 2.0, 1.0, population=0.5, coherence=0.6)
    with pytest.raises(InvalidBlochParameters):
        rotating_qubit_scenario(1.0, 2.0, 1.0, population=1.2, coherence=0.0)


def test_field_must_not_vanish():
    with pytest.raises(InvalidParameter):
        rotating_qubit_scenario(0.0, 0.0, 1.0)


def test_closed_form_and_mean_work_on_random_fields():
    rng = np.random.default_rng(2024)
    for omega, rabi, t in rng.uniform(1e-3, 5.0, size=(100, 3)):
        proc, closed_form = rotating_qubit_scenario(omega, rabi, t)
        table = mhq(work_quasiprob(proc))
        distribution = work_distribution(table, proc.energies_initial, proc.energies_final)

        assert np.max(np.abs(table.entries - closed_form)) < 1e-10
        assert abs(mean_work(proc) - distribution.mean()) < 1e-12


def test_two_point_mean_differs_under_coherence(quarter_turn):
    proc, _ = quarter_turn
    assert abs(tpm_work_distribution(proc).mean() - mean_work(proc)) > 1e-3


def test_process_of_zero_duration_is_diagonal():
    proc, closed_form = rotating_qubit_scenario(1.0, 2.0, 0.0)
    table = mhq(work_quasiprob(proc))

    assert np.max(np.abs(closed_form - np.diag([0.5, 0.5]))) < 1e-15
    assert np.max(np.abs(table.entries - np.diag([0.5, 0.5]))) < 1e-12


def test_two_point_final_marginal_loses_the_coherence(quarter_turn):
    proc, _ = quarter_turn
    evolved = proc.evolved_state()
    direct = np.array([np.trace(p_j @ evolved).real for p_j in proc.projectors_final])

    assert np.max(np.abs(tpm_joint(proc).sum(axis=0) - direct)) > 1e-3
    assert mhq(work_quasiprob(proc)).entries.sum(axis=0) == pytest.approx(direct, abs=1e-10)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_mean_work_from_ground_state_stays_in_spectral_range(d):
    for seed in range(10):
        h_initial = random_observable(d, seed)
        h_final = random_observable(d, seed + 500)
        _, basis, _ = random_state_and_bases(d, seed)
        energies_i, projectors_i = hermitian_eigendecomposition(h_initial)
        energies_f, _ = hermitian_eigendecomposition(h_final)
        rho = validate_density(projectors_i[0])

        proc = WorkProcess.from_hamiltonians(rho, h_initial, h_final, basis.vectors)
        work = mean_work(proc)
        assert energies_f[0] - energies_i[0] - 1e-10 <= work <= energies_f[-1] - energies_i[0] + 1e-10


def test_empty_table_has_no_work_distribution():
    with pytest.raises(InvalidParameter):
        work_distribution(np.zeros((0, 0)), [], [])


def test_energies_that_miss_the_hamiltonian_are_rejected():
    rho = validate_density(np.eye(2) / 2)
    hamiltonian = HermitianObservable(PAULI_Z)
    energies, projectors = hermitian_eigendecomposition(hamiltonian)

    with pytest.raises(DecompositionMismatch):
        WorkProcess(rho, hamiltonian, hamiltonian, np.eye(2), energies[::-1], tuple(projectors),
                    energies, tuple(projectors))


def test_work_distribution_rows(quarter_turn):
    proc, _ = quarter_turn
    distribution = work_distribution(mhq(work_quasiprob(proc)), proc.energies_initial, proc.energies_final)
    rows = distribution.to_rows()

    assert WorkDistribution.CSV_HEADER == ("w", "weight")
    assert [row[0] for row in rows] == pytest.approx([-ROOT5, 0.0, ROOT5], abs=1e-12)
    assert [row[1] for row in rows] == pytest.approx([-0.1, 0.8, 0.3], abs=1e-10)

import math

import numpy as np
import pytest

from core.errors import ChainTooShort, DimensionMismatch, InvalidParameter, MarginalNotReal, NotNormalized, ZeroOverlap
from core.kd_distribution import (
    ExtendedKD,
    KDDistribution,
    MHQDistribution,
    OracleVerdict,
    entry_nonpositivity_oracle,
    expectation_via_kd,
    extended_kd,
    kd_distribution,
    l1_coherence,
    marginals,
    mhq,
    negativity,
    reconstruct_state,
    total_nonpositivity,
    weak_values,
)
from core.linalg import PAULI_Z, computational_basis, fourier_basis, random_observable, random_state_and_bases
from core.quantum_types import HermitianObservable
from scenarios.example2_scenario import KD_TABLE, example2_state, zero_one_sign_basis
from scenarios.example3_scenario import expected_chain_table, qubit_state, unbiased_basis


def test_example2_table():
    table = kd_distribution(example2_state(), computational_basis(4), zero_one_sign_basis())

    assert np.max(np.abs(table.entries - KD_TABLE)) < 1e-12
    assert table.entries[0, 1].real == pytest.approx(-0.1, abs=1e-12)
    assert table.dims == (4, 4)


def test_table_sums_to_one():
    for seed in range(50):
        rho, basis_a, basis_f = random_state_and_bases(3, seed)
        assert abs(kd_distribution(rho, basis_a, basis_f).entries.sum() - 1) < 1e-10


def test_marginals_are_born_probabilities():
    rho, basis_a, basis_f = random_state_and_bases(4, 11)
    row, col = marginals(kd_distribution(rho, basis_a, basis_f))

    born_a = [np.vdot(basis_a.vectors[:, i], rho.entries @ basis_a.vectors[:, i]).real for i in range(4)]
    born_f = [np.vdot(basis_f.vectors[:, j], rho.entries @ basis_f.vectors[:, j]).real for j in range(4)]
    assert np.max(np.abs(row - born_a)) < 1e-10
    assert np.max(np.abs(col - born_f)) < 1e-10


def test_marginal_with_imaginary_part_is_rejected():
    entries = np.array([[0.5, 0.1j], [0.0, 0.5 - 0.1j]])
    with pytest.raises(MarginalNotReal):
        marginals(KDDistribution(entries))


def test_same_basis_table_is_diagonal_and_positive():
    rho, basis_a, _ = random_state_and_bases(3, 5)
    table = kd_distribution(rho, basis_a, basis_a)

    off_diagonal = table.entries - np.diag(np.diag(table.entries))
    assert np.all(off_diagonal == 0)
    assert np.all(np.diag(table.entries).real >= 0)
    assert entry_nonpositivity_oracle(table).is_positive


def test_dimension_mismatch_is_rejected():
    with pytest.raises(DimensionMismatch):
        kd_distribution(example2_state(), computational_basis(2), fourier_basis(2))


def test_unnormalized_table_is_rejected():
    with pytest.raises(NotNormalized):
        KDDistribution(np.full((2, 2), 0.3))


def test_two_basis_chain_matches_kd_table():
    rho, basis_a, basis_f = random_state_and_bases(3, 2)
    chain = extended_kd(rho, (basis_a, basis_f))

    assert chain.chain_length == 2
    assert np.max(np.abs(chain.entries - kd_distribution(rho, basis_a, basis_f).entries)) < 1e-12


def test_example3_chain_table():
    theta, alpha, beta = math.pi / 3, 0.7, 0.2
    chain = extended_kd(qubit_state(theta, alpha), (computational_basis(2), unbiased_basis(beta), computational_basis(2)))

    assert chain.dims == (2, 2, 2)
    assert np.max(np.abs(chain.entries - expected_chain_table(theta, alpha, beta))) < 1e-12


def test_summing_out_the_middle_basis_leaves_populations():
    rho, basis_a, basis_b = random_state_and_bases(3, 9)
    chain = extended_kd(rho, (basis_a, basis_b, basis_a))

    collapsed = chain.entries.sum(axis=1)
    populations = np.diag(basis_a.vectors.conj().T @ rho.entries @ basis_a.vectors)
    assert np.max(np.abs(collapsed - np.diag(populations))) < 1e-10


def test_longer_chains_stay_normalized():
    rho, basis_a, basis_f = random_state_and_bases(2, 4)
    chain = extended_kd(rho, (basis_a, basis_f, basis_a, basis_f, basis_a))

    assert chain.chain_length == 5
    assert abs(chain.entries.sum() - 1) < 1e-10


def test_chain_needs_two_bases():
    rho, basis_a, _ = random_state_and_bases(2, 0)
    with pytest.raises(ChainTooShort):
        extended_kd(rho, (basis_a,))
    with pytest.raises(ChainTooShort):
        ExtendedKD(np.array([1.0]))


def test_mhq_keeps_real_parts():
    table = mhq(kd_distribution(example2_state(), computational_basis(4), zero_one_sign_basis()))

    assert isinstance(table, MHQDistribution)
    assert table.entries.dtype == np.float64
    assert negativity(table) == pytest.approx(0.2, abs=1e-12)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_reconstruction_recovers_the_state(d):
    for seed in range(20):
        rho, basis_a, basis_f = random_state_and_bases(d, seed)
        rebuilt = reconstruct_state(kd_distribution(rho, basis_a, basis_f), basis_a, basis_f)
        assert np.max(np.abs(rebuilt.entries - rho.entries)) < 1e-8


def test_reconstruction_with_orthogonal_pairs_fails():
    basis_a, basis_f = computational_basis(4), zero_one_sign_basis()
    table = kd_distribution(example2_state(), basis_a, basis_f)

    with pytest.raises(ZeroOverlap) as excinfo:
        reconstruct_state(table, basis_a, basis_f)
    assert (excinfo.value.i, excinfo.value.j) == (2, 0)


def test_same_basis_reconstruction_keeps_the_diagonal(caplog):
    rho, basis_a, _ = random_state_and_bases(2, 3)
    rebuilt = reconstruct_state(kd_distribution(rho, basis_a, basis_a), basis_a, basis_a)

    in_basis = basis_a.vectors.conj().T @ rebuilt.entries @ basis_a.vectors
    expected = np.diag(np.diag(basis_a.vectors.conj().T @ rho.entries @ basis_a.vectors))
    assert np.max(np.abs(in_basis - expected)) < 1e-12
    assert "diagonal" in caplog.text


def test_strict_same_basis_reconstruction_raises():
    rho, basis_a, _ = random_state_and_bases(2, 3)
    table = kd_distribution(rho, basis_a, basis_a)

    with pytest.raises(InvalidParameter):
        reconstruct_state(table, basis_a, basis_a, strict=True)


def test_strict_reconstruction_round_trips_distinct_bases():
    rho, basis_a, basis_f = random_state_and_bases(3, 5)
    rebuilt = reconstruct_state(kd_distribution(rho, basis_a, basis_f), basis_a, basis_f, strict=True)

    assert np.max(np.abs(rebuilt.entries - rho.entries)) < 1e-10


def test_weak_values_recover_expectations():
    for seed in range(20):
        rho, basis_a, basis_f = random_state_and_bases(3, seed)
        observable = random_observable(3, seed + 100)
        weak = weak_values(observable, basis_a, basis_f)
        table = kd_distribution(rho, basis_a, basis_f)

        direct = np.trace(observable.entries @ rho.entries)
        assert abs(expectation_via_kd(observable, table, weak) - direct) < 1e-10


def test_weak_values_need_nonzero_overlaps():
    with pytest.raises(ZeroOverlap):
        weak_values(HermitianObservable(PAULI_Z), computational_basis(2), computational_basis(2))


def test_oracle_on_negative_real_table():
    table = kd_distribution(example2_state(), computational_basis(4), zero_one_sign_basis())
    verdict = entry_nonpositivity_oracle(table)

    assert verdict.kind == OracleVerdict.NEGATIVE_REAL
    assert len(verdict.witnesses) == 1
    index, value = verdict.witnesses[0]
    assert index == (0, 1)
    assert value.real == pytest.approx(-0.1, abs=1e-12)


def test_oracle_on_non_real_table():
    chain = extended_kd(qubit_state(math.pi / 2, math.pi / 2),
                        (computational_basis(2), unbiased_basis(0.0), computational_basis(2)))
    verdict = entry_nonpositivity_oracle(chain)

    assert verdict.kind == OracleVerdict.NON_REAL
    assert len(verdict.witnesses) == 4
    assert verdict.to_dict()["kind"] == "NonReal"


def test_oracle_on_positive_table():
    assert entry_nonpositivity_oracle(MHQDistribution(np.array([[0.1, 0.2], [0.3, 0.4]]))).is_positive


def test_total_nonpositivity_equals_coherence_for_qubit_chain():
    theta = 1.1
    rho = qubit_state(theta, 0.4)
    chain = extended_kd(rho, (computational_basis(2), unbiased_basis(0.0), computational_basis(2)))

    assert total_nonpositivity(chain) == pytest.approx(abs(math.sin(theta)), abs=1e-12)
    assert l1_coherence(rho, computational_basis(2)) == pytest.approx(abs(math.sin(theta)), abs=1e-12)


def test_table_dict_layout():
    table = kd_distribution(example2_state(), computational_basis(4), zero_one_sign_basis())
    encoded = table.to_dict()

    assert encoded["source"] == "KD"
    assert encoded["bases"] == ["computational", "z x sign"]
    assert encoded["entries"][0][1] == pytest.approx([-0.1, 0.0], abs=1e-12)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_fourier_chain_nonpositivity_equals_l1_coherence(d):
    basis_a, basis_b = computational_basis(d), fourier_basis(d)
    for seed in range(5):
        rho, _, _ = random_state_and_bases(d, seed)
        table = extended_kd(rho, (basis_a, basis_b, basis_a))

        assert total_nonpositivity(table) == pytest.approx(l1_coherence(rho, basis_a), abs=1e-10)

"""
Kirkwood-Dirac family of quasiprobability tables.

Storage convention: for a KD table built from bases A and F, `entries[i, j]`
is Q_ij = <f_j|a_i><a_i|rho|f_j>, rows indexed by A and columns by F. An
extended table over a chain (v1, ..., vk) stores Tr(P_k ... P_1 rho) at
index (i1, ..., ik), so the first basis of the chain is the innermost
projector. For the chain (A, B, A) the entry at (i, k, j) is
<a_j|b_k><b_k|a_i><a_i|rho|a_j>.
"""
import logging
from dataclasses import dataclass, field
from typing import ClassVar

import numpy as np

from core.errors import (
    ChainTooShort,
    DimensionMismatch,
    InvalidParameter,
    MarginalNotReal,
    NotNormalized,
    ZeroOverlap,
)
from core.linalg import DEFAULT_TOL
from core.quantum_types import DensityMatrix, HermitianObservable, OrthonormalBasis, frozen_array
from core.utils.serialization import encode_complex, encode_complex_array, encode_real_array

logger = logging.getLogger(__name__)

OVERLAP_FLOOR = 1e-8
NORMALIZATION_TOL = 1e-8
_INDEX_LETTERS = "abcdefghijklmnopqrstuvwxyz"


def _check_normalized(entries: np.ndarray, name: str):
    total = complex(np.sum(entries))
    if abs(total - 1.0) > NORMALIZATION_TOL:
        raise NotNormalized(f"{name} entries sum to {total.real:.12g}{total.imag:+.3e}j, expected 1")


@dataclass(frozen=True)
class KDDistribution:
    entries: np.ndarray
    basis_a_label: str = ""
    basis_f_label: str = ""
    SOURCE: ClassVar[str] = "KD"

    def __post_init__(self):
        object.__setattr__(self, 'entries', frozen_array(self.entries, "KD table", ndim=2))
        _check_normalized(self.entries, "KD table")

    @property
    def dims(self) -> tuple:
        return self.entries.shape

    def to_dict(self) -> dict:
        return {
            "source": self.SOURCE,
            "bases": [self.basis_a_label, self.basis_f_label],
            "entries": encode_complex_array(self.entries),
        }


@dataclass(frozen=True)
class ExtendedKD:
    entries: np.ndarray
    labels: tuple = field(default=())
    SOURCE: ClassVar[str] = "ExtendedKD"

    def __post_init__(self):
        object.__setattr__(self, 'entries', frozen_array(self.entries, "extended KD table"))
        object.__setattr__(self, 'labels', tuple(self.labels))
        if self.entries.ndim < 2:
            raise ChainTooShort(f"extended KD table needs at least 2 axes, got {self.entries.ndim}")
        _check_normalized(self.entries, "extended KD table")

    @property
    def chain_length(self) -> int:
        return self.entries.ndim

    @property
    def dims(self) -> tuple:
        return self.entries.shape

    def to_dict(self) -> dict:
        return {
            "source": self.SOURCE,
            "bases": list(self.labels),
            "entries": encode_complex_array(self.entries),
        }


@dataclass(frozen=True)
class MHQDistribution:
    entries: np.ndarray
    basis_a_label: str = ""
    basis_f_label: str = ""
    SOURCE: ClassVar[str] = "MHQ"

    def __post_init__(self):
        object.__setattr__(self, 'entries', frozen_array(self.entries, "MHQ table", dtype=np.float64, ndim=2))
        _check_normalized(self.entries, "MHQ table")

    @property
    def dims(self) -> tuple:
        return self.entries.shape

    def to_dict(self) -> dict:
        return {
            "source": self.SOURCE,
            "bases": [self.basis_a_label, self.basis_f_label],
            "entries": encode_real_array(self.entries),
        }


@dataclass(frozen=True)
class OracleVerdict:
    """Entry-level ground truth: Positive, NegativeReal or NonReal."""
    kind: str
    witnesses: tuple = ()

    POSITIVE: ClassVar[str] = "Positive"
    NEGATIVE_REAL: ClassVar[str] = "NegativeReal"
    NON_REAL: ClassVar[str] = "NonReal"

    @property
    def is_positive(self) -> bool:
        return self.kind == self.POSITIVE

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "witnesses": [{"index": list(index), "value": encode_complex(value)} for index, value in self.witnesses],
        }


def _require_same_dim(*bases: OrthonormalBasis, rho: DensityMatrix | None = None):
    dims = {basis.dim for basis in bases}
    if rho is not None:
        dims.add(rho.dim)
    if len(dims) != 1:
        raise DimensionMismatch(f"state and bases have inconsistent dimensions {sorted(dims)}")


def _overlaps(later: OrthonormalBasis, earlier: OrthonormalBasis) -> np.ndarray:
    """Matrix of <later_j|earlier_i> indexed [j, i]; exact identity for equal bases."""
    if later.same_vectors(earlier):
        return np.eye(later.dim, dtype=np.complex128)
    return later.vectors.conj().T @ earlier.vectors


def kd_distribution(rho: DensityMatrix, basis_a: OrthonormalBasis, basis_f: OrthonormalBasis) -> KDDistribution:
    _require_same_dim(basis_a, basis_f, rho=rho)
    overlap = _overlaps(basis_f, basis_a)
    rho_af = basis_a.vectors.conj().T @ rho.entries @ basis_f.vectors
    entries = overlap.T * rho_af
    logger.debug(f"Built {entries.shape[0]}x{entries.shape[1]} KD table over ('{basis_a.label}', '{basis_f.label}')")
    return KDDistribution(entries, basis_a.label, basis_f.label)


def extended_kd(rho: DensityMatrix, chain) -> ExtendedKD:
    chain = list(chain)
    if len(chain) < 2:
        raise ChainTooShort(f"an extended KD chain needs at least 2 bases, got {len(chain)}")
    if len(chain) > len(_INDEX_LETTERS):
        raise InvalidParameter(f"chain length {len(chain)} exceeds the supported {len(_INDEX_LETTERS)}")
    _require_same_dim(*chain, rho=rho)

    letters = _INDEX_LETTERS[:len(chain)]
    operands = [chain[0].vectors.conj().T @ rho.entries @ chain[-1].vectors]
    subscripts = [letters[0] + letters[-1]]
    for r in range(1, len(chain)):
        operands.append(_overlaps(chain[r], chain[r - 1]))
        subscripts.append(letters[r] + letters[r - 1])

    entries = np.einsum(",".join(subscripts) + "->" + letters, *operands)
    return ExtendedKD(entries, tuple(basis.label for basis in chain))


def mhq(kd: KDDistribution) -> MHQDistribution:
    return MHQDistribution(kd.entries.real.copy(), kd.basis_a_label, kd.basis_f_label)


def marginals(kd: KDDistribution, tol: float = DEFAULT_TOL):
    """Row and column sums; both must be real."""
    row = kd.entries.sum(axis=1)
    col = kd.entries.sum(axis=0)
    residue = max(float(np.max(np.abs(row.imag))), float(np.max(np.abs(col.imag))))
    if residue > tol:
        raise MarginalNotReal(f"KD marginal has imaginary part {residue:.3e} > {tol:.1e}")
    return row.real.copy(), col.real.copy()


def _checked_overlaps(basis_a: OrthonormalBasis, basis_f: OrthonormalBasis, overlap_floor: float) -> np.ndarray:
    overlap = _overlaps(basis_f, basis_a)
    magnitudes = np.abs(overlap)
    j, i = np.unravel_index(int(np.argmin(magnitudes)), magnitudes.shape)
    if magnitudes[j, i] < overlap_floor:
        raise ZeroOverlap(int(i), int(j), float(magnitudes[j, i]), overlap_floor)
    return overlap


def reconstruct_state(kd: KDDistribution, basis_a: OrthonormalBasis, basis_f: OrthonormalBasis,
                      overlap_floor: float = OVERLAP_FLOOR, strict: bool = False) -> DensityMatrix:
    """
    Invert the KD map: rho = sum_ij |a_i><f_j| Q_ij / <f_j|a_i>.

    A same-basis table only holds the populations, so the result is rho
    dephased in A. With strict=True that case raises InvalidParameter instead.
    """
    _require_same_dim(basis_a, basis_f)
    if kd.dims != (basis_a.dim, basis_f.dim):
        raise DimensionMismatch(f"KD table of shape {kd.dims} does not match bases of dimension {basis_a.dim}")

    if basis_a.same_vectors(basis_f):
        if strict:
            raise InvalidParameter("a same-basis KD table does not determine the coherences of rho")
        logger.warning("Reconstructing from a same-basis KD table keeps only the diagonal of rho")
        populations = np.diag(kd.entries)
        return DensityMatrix((basis_a.vectors * populations) @ basis_a.vectors.conj().T)

    overlap = _checked_overlaps(basis_a, basis_f, overlap_floor)
    coefficients = kd.entries / overlap.T
    return DensityMatrix(basis_a.vectors @ coefficients @ basis_f.vectors.conj().T)


def weak_values(observable: HermitianObservable, basis_a: OrthonormalBasis, basis_f: OrthonormalBasis,
                overlap_floor: float = OVERLAP_FLOOR) -> np.ndarray:
    """O^w_ij = <f_j|O|a_i> / <f_j|a_i>, indexed [i, j]."""
    _require_same_dim(basis_a, basis_f)
    if observable.dim != basis_a.dim:
        raise DimensionMismatch(f"observable has dimension {observable.dim}, bases {basis_a.dim}")
    overlap = _checked_overlaps(basis_a, basis_f, overlap_floor)
    numerators = basis_f.vectors.conj().T @ observable.entries @ basis_a.vectors
    return (numerators / overlap).T


def expectation_via_kd(observable: HermitianObservable, kd: KDDistribution, weak: np.ndarray) -> complex:
    """Tr(O rho) recovered as sum_ij Q_ij O^w_ij."""
    weak = np.asarray(weak)
    if weak.shape != kd.dims or observable.dim != kd.dims[0]:
        raise DimensionMismatch(f"weak values {weak.shape} and KD table {kd.dims} do not match")
    return complex(np.sum(kd.entries * weak))


def entry_nonpositivity_oracle(table, tol: float = DEFAULT_TOL) -> OracleVerdict:
    """Ground truth by inspection; any non-real entry makes the verdict NonReal."""
    entries = np.asarray(table.entries, dtype=np.complex128)
    non_real = np.abs(entries.imag) > tol
    negative = entries.real < -tol
    offending = non_real | negative

    if not offending.any():
        return OracleVerdict(OracleVerdict.POSITIVE)

    witnesses = tuple(
        (tuple(int(k) for k in index), complex(entries[index]))
        for index in zip(*np.nonzero(offending))
    )
    kind = OracleVerdict.NON_REAL if non_real.any() else OracleVerdict.NEGATIVE_REAL
    return OracleVerdict(kind, witnesses)


def total_nonpositivity(table) -> float:
    """sum |entries| - 1 for any table."""
    return float(np.sum(np.abs(table.entries)) - 1.0)


def negativity(mhq_table: MHQDistribution) -> float:
    return float(np.sum(np.abs(mhq_table.entries)) - 1.0)


def l1_coherence(rho: DensityMatrix, basis: OrthonormalBasis) -> float:
    _require_same_dim(basis, rho=rho)
    in_basis = basis.vectors.conj().T @ rho.entries @ basis.vectors
    magnitudes = np.abs(in_basis)
    return float(np.sum(magnitudes) - np.sum(np.diag(magnitudes)))

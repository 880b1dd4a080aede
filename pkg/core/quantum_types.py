from dataclasses import dataclass, field

import numpy as np

from core.errors import DimensionMismatch, NonFiniteValue


def frozen_array(values, name: str, dtype=np.complex128, ndim: int | None = None) -> np.ndarray:
    """Copy `values` into a read-only finite array."""
    array = np.array(values, dtype=dtype)
    if ndim is not None and array.ndim != ndim:
        raise DimensionMismatch(f"{name} must be {ndim}-dimensional, got shape {array.shape}")
    if not np.all(np.isfinite(array)):
        raise NonFiniteValue(f"{name} contains NaN or Inf")
    array.setflags(write=False)
    return array


def _square(array: np.ndarray, name: str) -> int:
    rows, cols = array.shape
    if rows != cols or rows == 0:
        raise DimensionMismatch(f"{name} must be a non-empty square matrix, got shape {array.shape}")
    return rows


@dataclass(frozen=True)
class StateVector:
    amplitudes: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'amplitudes', frozen_array(self.amplitudes, "amplitudes", ndim=1))
        if self.amplitudes.size == 0:
            raise DimensionMismatch("state vector must have at least one amplitude")

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def projector(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())


@dataclass(frozen=True)
class DensityMatrix:
    entries: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'entries', frozen_array(self.entries, "density matrix", ndim=2))
        _square(self.entries, "density matrix")

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class HermitianObservable:
    entries: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'entries', frozen_array(self.entries, "observable", ndim=2))
        _square(self.entries, "observable")

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class OrthonormalBasis:
    """Ordered orthonormal basis; column k of `vectors` is |v_k>."""
    vectors: np.ndarray
    label: str = field(default="")

    def __post_init__(self):
        object.__setattr__(self, 'vectors', frozen_array(self.vectors, f"basis '{self.label}'", ndim=2))
        _square(self.vectors, f"basis '{self.label}'")

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    def __len__(self) -> int:
        return self.vectors.shape[1]

    def vector(self, k: int) -> StateVector:
        return StateVector(self.vectors[:, k])

    def projector(self, k: int) -> np.ndarray:
        column = self.vectors[:, k]
        return np.outer(column, column.conj())

    def same_vectors(self, other: "OrthonormalBasis") -> bool:
        return self.vectors.shape == other.vectors.shape and np.array_equal(self.vectors, other.vectors)

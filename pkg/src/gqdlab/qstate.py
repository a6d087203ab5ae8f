"""Dense density matrices of qubit registers and the entropic primitives built on them.

Qubit 0 is the leftmost tensor factor (big-endian basis labels) everywhere in gqdlab.
All entropies are in bits.
"""

import math
from typing import Iterable, Sequence, Union

import numpy as np
from scipy.special import xlogy

from .core.exceptions import PartitionError, StateValidationError
from .core.models import QubitSubset


VALIDATION_TOL = 1e-10
LN2 = math.log(2.0)


def hermitize(matrix: np.ndarray) -> np.ndarray:
    """Return (M + M^dagger) / 2."""
    return (matrix + matrix.conj().T) / 2


def _register_size(dim: int) -> int:
    if dim < 2 or dim & (dim - 1):
        raise StateValidationError(f"Dimension {dim} is not a power of two >= 2")
    return dim.bit_length() - 1


def spectrum(matrix: np.ndarray) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix with noise in [-1e-10, 0) clamped to zero."""
    deviation = float(np.max(np.abs(matrix - matrix.conj().T))) if matrix.size else 0.0
    if deviation > VALIDATION_TOL:
        raise StateValidationError(f"Matrix is not Hermitian (max deviation {deviation:.3e})")
    eigenvalues = np.linalg.eigvalsh(hermitize(matrix))
    lowest = float(eigenvalues[0])
    if lowest < -VALIDATION_TOL:
        raise StateValidationError(f"Negative eigenvalue {lowest:.3e}")
    return np.clip(eigenvalues, 0.0, None)


def shannon_entropy(probabilities: np.ndarray) -> float:
    """-sum p log2 p with 0 log 0 = 0."""
    p = np.clip(np.asarray(probabilities, dtype=float).ravel(), 0.0, None)
    return float(-np.sum(xlogy(p, p)) / LN2)


class DensityMatrix:
    """Hermitian, positive semidefinite, unit-trace operator on an n-qubit register.

    The wrapped array is stored Hermitized and read-only, so instances can be
    shared between threads.
    """

    __slots__ = ("_matrix", "_n_qubits")

    def __init__(self, matrix: np.ndarray, validate: bool = True):
        array = np.array(matrix, dtype=complex)
        if array.ndim != 2 or array.shape[0] != array.shape[1]:
            raise StateValidationError(f"Expected a square matrix, got shape {array.shape}")
        n_qubits = _register_size(array.shape[0])
        if validate:
            self._validate(array)
        array = hermitize(array)
        array.flags.writeable = False
        self._matrix = array
        self._n_qubits = n_qubits

    @staticmethod
    def _validate(array: np.ndarray) -> None:
        trace = complex(np.trace(array))
        if abs(trace - 1.0) > VALIDATION_TOL:
            raise StateValidationError(f"Trace {trace.real:.12g} differs from 1")
        spectrum(array)

    @classmethod
    def from_pure(cls, vector: Sequence[complex]) -> "DensityMatrix":
        """Rank-one projector onto a (normalized) state vector."""
        psi = np.asarray(vector, dtype=complex).ravel()
        norm = np.linalg.norm(psi)
        if norm == 0:
            raise StateValidationError("Zero vector has no density matrix")
        psi = psi / norm
        return cls(np.outer(psi, psi.conj()))

    @classmethod
    def maximally_mixed(cls, n_qubits: int) -> "DensityMatrix":
        dim = 2 ** n_qubits
        return cls(np.eye(dim) / dim)

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def n_qubits(self) -> int:
        return self._n_qubits

    @property
    def dim(self) -> int:
        return self._matrix.shape[0]

    def eigenvalues(self) -> np.ndarray:
        return spectrum(self._matrix)

    def purity(self) -> float:
        return float(np.real(np.trace(self._matrix @ self._matrix)))

    def __repr__(self) -> str:
        return f"DensityMatrix(n_qubits={self._n_qubits})"


def _keep_list(keep: Union[QubitSubset, Iterable[int]], n_qubits: int) -> list:
    qubits = list(keep.indices) if isinstance(keep, QubitSubset) else [int(q) for q in keep]
    if not qubits:
        raise PartitionError("Cannot keep an empty set of qubits")
    if len(set(qubits)) != len(qubits):
        raise PartitionError(f"Duplicate qubits in {qubits}")
    bad = [q for q in qubits if q < 0 or q >= n_qubits]
    if bad:
        raise PartitionError(f"Qubits {bad} out of range for a {n_qubits}-qubit register")
    return qubits


def reduce_matrix(matrix: np.ndarray, n_qubits: int, keep: Sequence[int]) -> np.ndarray:
    """Partial trace of a raw 2^n x 2^n array onto `keep`, in the order given."""
    keep = list(keep)
    if len(keep) == n_qubits and keep == list(range(n_qubits)):
        return matrix
    traced = [q for q in range(n_qubits) if q not in keep]
    order = keep + traced
    tensor = matrix.reshape((2,) * (2 * n_qubits))
    tensor = tensor.transpose(order + [q + n_qubits for q in order])
    d_keep = 2 ** len(keep)
    d_traced = 2 ** len(traced)
    tensor = tensor.reshape(d_keep, d_traced, d_keep, d_traced)
    return np.einsum("ajbj->ab", tensor)


def partial_trace(rho: DensityMatrix, keep: Union[QubitSubset, Iterable[int]]) -> DensityMatrix:
    """Reduced state on `keep`; qubit order of the result follows `keep`."""
    qubits = _keep_list(keep, rho.n_qubits)
    return DensityMatrix(reduce_matrix(rho.matrix, rho.n_qubits, qubits), validate=False)


def matrix_entropy(matrix: np.ndarray) -> float:
    """Von Neumann entropy in bits of a raw Hermitian PSD array."""
    eigenvalues = spectrum(matrix)
    return float(-np.sum(xlogy(eigenvalues, eigenvalues)) / LN2)


def von_neumann_entropy(rho: Union[DensityMatrix, np.ndarray]) -> float:
    """S(rho) = -sum lambda log2 lambda."""
    matrix = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    return matrix_entropy(matrix)

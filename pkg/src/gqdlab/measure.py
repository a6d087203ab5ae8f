"""Parametrized single-qubit projective bases and the product dephasing channel."""

from functools import reduce
from typing import List, Sequence, Tuple

import numpy as np

from .core.exceptions import MeasurementError
from .core.models import AngleSet
from .qstate import DensityMatrix


IDENTITY = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def site_rotation(theta: float, phi: float) -> np.ndarray:
    """R(theta, phi) = cos(theta) I + i sin(theta) (cos(phi) sigma_y + sin(phi) sigma_x)."""
    return (np.cos(theta) * IDENTITY
            + 1j * np.sin(theta) * (np.cos(phi) * SIGMA_Y + np.sin(phi) * SIGMA_X))


def rotations_from_vector(vector: np.ndarray) -> np.ndarray:
    """Stack of site rotations, shape (m, 2, 2), from (theta_0, phi_0, theta_1, ...)."""
    thetas = np.asarray(vector[0::2], dtype=float)
    phis = np.asarray(vector[1::2], dtype=float)
    c = np.cos(thetas)
    s = np.sin(thetas)
    out = np.empty((len(thetas), 2, 2), dtype=complex)
    out[:, 0, 0] = c
    out[:, 0, 1] = s * np.exp(1j * phis)
    out[:, 1, 0] = -s * np.exp(-1j * phis)
    out[:, 1, 1] = c
    return out


def site_basis(theta: float, phi: float) -> Tuple[np.ndarray, np.ndarray]:
    """The projector pair {R|0><0|R^dagger, R|1><1|R^dagger}."""
    rotation = site_rotation(theta, phi)
    ket0 = rotation[:, 0]
    ket1 = rotation[:, 1]
    return np.outer(ket0, ket0.conj()), np.outer(ket1, ket1.conj())


def site_rotations(angles: AngleSet) -> List[np.ndarray]:
    return [site_rotation(theta, phi) for theta, phi in angles.pairs]


def product_rotation(angles: AngleSet) -> np.ndarray:
    """Full register rotation R = R_0 (x) R_1 (x) ... (qubit 0 leftmost)."""
    return reduce(np.kron, site_rotations(angles))


def rotated_diagonal(matrix: np.ndarray, rotations: Sequence[np.ndarray]) -> np.ndarray:
    """Diagonal of R^dagger M R for a product rotation, contracted site by site.

    The result is the joint outcome distribution of the product measurement.
    """
    n = len(rotations)
    tensor = matrix.reshape((2,) * (2 * n))
    for site, rotation in enumerate(rotations):
        tensor = np.moveaxis(np.tensordot(rotation.conj().T, tensor, axes=([1], [site])), 0, site)
        tensor = np.moveaxis(np.tensordot(tensor, rotation, axes=([n + site], [0])), -1, n + site)
    dim = 2 ** n
    return np.clip(np.real(np.diagonal(tensor.reshape(dim, dim))), 0.0, None)


def _check_length(rho: DensityMatrix, angles: AngleSet) -> None:
    if angles.n_qubits != rho.n_qubits:
        raise MeasurementError(
            f"AngleSet has {angles.n_qubits} qubits, state has {rho.n_qubits}")


def dephase(rho: DensityMatrix, angles: AngleSet) -> DensityMatrix:
    """Non-selective product measurement: R diag(R^dagger rho R) R^dagger."""
    _check_length(rho, angles)
    rotation = product_rotation(angles)
    rotated = rotation.conj().T @ rho.matrix @ rotation
    dephased = rotation @ np.diag(np.diag(rotated)) @ rotation.conj().T
    return DensityMatrix(dephased, validate=False)


def outcome_distribution(rho: DensityMatrix, angles: AngleSet) -> np.ndarray:
    """Probabilities of the 2^n product-measurement outcomes."""
    _check_length(rho, angles)
    return rotated_diagonal(rho.matrix, site_rotations(angles))

"""Shared test helpers: random states, unitaries, and dense kron oracles."""

import numpy as np
import pytest

from dmvqem.circuits import DensityMatrix

I2 = np.eye(2)
PAULI_1Q = {
    "I": I2,
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def kron_all(mats) -> np.ndarray:
    out = np.array([[1.0 + 0j]])
    for m in mats:
        out = np.kron(out, m)
    return out


def dense_pauli(letters: str) -> np.ndarray:
    """Independent Kronecker oracle: leftmost letter acts on the MSB qubit."""
    return kron_all(PAULI_1Q[ch] for ch in letters)


def random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Haar-ish unitary from QR of a complex Ginibre matrix."""
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_density_matrix(
    rng: np.random.Generator, n_qubits: int, rank: int | None = None
) -> DensityMatrix:
    """Random mixed state from a Ginibre factor of the given rank."""
    dim = 1 << n_qubits
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    mat = g @ g.conj().T
    return DensityMatrix(mat / np.trace(mat).real)


def haar_state(rng: np.random.Generator, dim: int) -> np.ndarray:
    vec = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return vec / np.linalg.norm(vec)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260814)

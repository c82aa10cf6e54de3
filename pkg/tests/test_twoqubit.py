"""Two-qubit unitary synthesis: KAK split, ZYZ angles, and gate emission."""

import numpy as np
import pytest

from dmvqem.circuits import Gate, QuantumCircuit, circuit_unitary, gate_matrix
from dmvqem.twoqubit import (
    kak_decompose,
    synthesize_two_qubit,
    zyz_angles,
    zyz_gates,
)

from conftest import dense_pauli, random_unitary

CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)
SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)


def phase_distance(u: np.ndarray, v: np.ndarray) -> float:
    """Operator distance after aligning global phase."""
    overlap = np.trace(v.conj().T @ u)
    if abs(overlap) < 1e-12:
        return float(np.max(np.abs(u - v)))
    aligned = u * np.conj(overlap / abs(overlap))
    return float(np.max(np.abs(aligned - v)))


def compose(gates) -> np.ndarray:
    return circuit_unitary(
        QuantumCircuit(n_qubits=2, gates=tuple(gates), n_parameters=0)
    )


# --- single-qubit ZYZ --------------------------------------------------------


def test_zyz_rebuilds_random_unitaries(rng):
    for _ in range(30):
        u = random_unitary(rng, 2)
        phase, a, b, c = zyz_angles(u)
        rz_a = gate_matrix(Gate("RZ", (0,), angle=a))
        ry_b = gate_matrix(Gate("RY", (0,), angle=b))
        rz_c = gate_matrix(Gate("RZ", (0,), angle=c))
        rebuilt = np.exp(1j * phase) * (rz_a @ ry_b @ rz_c)
        assert np.max(np.abs(rebuilt - u)) < 1e-10


def test_zyz_gates_compose_to_input(rng):
    for _ in range(20):
        u = random_unitary(rng, 2)
        gates = zyz_gates(u, qubit=1)
        full = circuit_unitary(
            QuantumCircuit(n_qubits=2, gates=tuple(gates), n_parameters=0)
        )
        assert phase_distance(full, np.kron(np.eye(2), u)) < 1e-10


def test_zyz_handles_diagonal_and_antidiagonal():
    for u in (np.eye(2, dtype=complex), dense_pauli("Z"), dense_pauli("X"), dense_pauli("Y")):
        phase, a, b, c = zyz_angles(u)
        rz_a = gate_matrix(Gate("RZ", (0,), angle=a))
        ry_b = gate_matrix(Gate("RY", (0,), angle=b))
        rz_c = gate_matrix(Gate("RZ", (0,), angle=c))
        rebuilt = np.exp(1j * phase) * (rz_a @ ry_b @ rz_c)
        assert np.max(np.abs(rebuilt - u)) < 1e-12


# --- KAK ----------------------------------------------------------------------


def test_kak_rebuild_matches_input(rng):
    for _ in range(25):
        u = random_unitary(rng, 4)
        kak = kak_decompose(u)
        assert np.max(np.abs(kak.rebuild() - u)) < 1e-9


def test_kak_on_clifford_corners(rng):
    for u in (np.eye(4, dtype=complex), CNOT, SWAP, np.kron(dense_pauli("X"), np.eye(2))):
        kak = kak_decompose(u)
        assert np.max(np.abs(kak.rebuild() - u)) < 1e-9


def test_kak_core_coordinates_are_canonical(rng):
    # Interaction coordinates come out ascending in [0, pi/2) and are a
    # deterministic function of the unitary (same input, same split).
    for _ in range(10):
        u = random_unitary(rng, 4)
        kak = kak_decompose(u)
        coords = np.array([kak.a, kak.b, kak.c])
        assert np.all(coords[:-1] <= coords[1:] + 1e-12)
        assert np.all(coords >= -1e-12) and np.all(coords < np.pi / 2 + 1e-9)
        again = kak_decompose(u)
        assert (kak.a, kak.b, kak.c) == (again.a, again.b, again.c)


def test_kak_rejects_non_unitary_and_wrong_shape():
    from dmvqem.errors import DomainError

    with pytest.raises(DomainError):
        kak_decompose(np.ones((4, 4), dtype=complex))
    with pytest.raises(DomainError):
        kak_decompose(np.eye(2, dtype=complex))


# --- full synthesis -------------------------------------------------------------


def test_synthesis_matches_unitary(rng):
    for _ in range(25):
        u = random_unitary(rng, 4)
        gates = synthesize_two_qubit(u)
        assert phase_distance(compose(gates), u) < 1e-9


def test_synthesis_gate_budget(rng):
    # Generic two-qubit unitaries need at most three entangling gates.
    for _ in range(10):
        u = random_unitary(rng, 4)
        gates = synthesize_two_qubit(u)
        cnots = sum(1 for g in gates if g.arity == 2)
        assert cnots <= 3
        for g in gates:
            assert g.kind in {"RZ", "RY", "RX", "U1", "CNOT"}


def test_synthesis_special_cases():
    for u in (np.eye(4, dtype=complex), CNOT, SWAP):
        gates = synthesize_two_qubit(u)
        assert phase_distance(compose(gates), u) < 1e-9


def test_synthesis_respects_target_qubits(rng):
    u = random_unitary(rng, 4)
    gates = synthesize_two_qubit(u, qubits=(1, 2))
    full = circuit_unitary(
        QuantumCircuit(n_qubits=3, gates=tuple(gates), n_parameters=0)
    )
    want = np.kron(np.eye(2), u)
    assert phase_distance(full, want) < 1e-9


def test_synthesis_rejects_non_unitary():
    with pytest.raises(Exception):
        synthesize_two_qubit(np.ones((4, 4), dtype=complex))

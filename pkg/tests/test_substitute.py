"""Two-copy substitute transform: block table, unitarity, index permutation,
measurement rotations, and the swap observable."""

import itertools
import json

import numpy as np
import pytest

from dmvqem.circuits import QuantumCircuit, circuit_unitary
from dmvqem.errors import DomainError
from dmvqem.pauli import PauliString, PauliSum, parse_pauli, to_dense
from dmvqem.substitute import (
    block_table,
    dense_substitute_halves,
    dump_transform,
    halves_to_interleaved_sources,
    interleaved_to_halves_sources,
    permute_qubits,
    rotation_circuit,
    substitute_block,
    substitute_operator,
    swap_observable,
    transform_hamiltonian,
)

from conftest import dense_pauli, random_density_matrix

PAIRS = ["".join(p) for p in itertools.product("IXYZ", repeat=2)]
SWAP4 = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)


def permuted_image(a: np.ndarray) -> np.ndarray:
    """Index-reshuffle oracle in the halves layout.

    out[(i,l),(j,k)] = a[(i,j),(k,l)] where the first half of the qubits
    carries (i, j) row indices and the second half (k, l) column indices.
    """
    half = int(round(np.sqrt(a.shape[0])))
    t = a.reshape(half, half, half, half)
    return np.transpose(t, (0, 3, 1, 2)).reshape(a.shape)


def expansion(block_matrix: np.ndarray) -> dict[str, complex]:
    """Coefficients of a 4x4 matrix over the two-qubit Pauli basis."""
    out = {}
    for label in PAIRS:
        coeff = np.trace(dense_pauli(label).conj().T @ block_matrix) / 4.0
        if abs(coeff) > 1e-13:
            out[label] = complex(coeff)
    return out


def eigenvalue_multiset(values) -> list[complex]:
    return sorted(
        (complex(round(v.real, 9), round(v.imag, 9)) for v in values),
        key=lambda z: (z.real, z.imag),
    )


# --- block table -----------------------------------------------------------


def test_block_identity_pair_is_swap_mixture():
    block = substitute_block(parse_pauli("II"))
    want = {"II": 0.5, "XX": 0.5, "YY": 0.5, "ZZ": 0.5}
    got = expansion(block.matrix)
    assert got.keys() == want.keys()
    for label, coeff in want.items():
        assert got[label] == pytest.approx(coeff, abs=1e-12)
    assert np.allclose(block.matrix, SWAP4, atol=1e-12)
    assert eigenvalue_multiset(block.eigenvalues) == eigenvalue_multiset(
        [1, 1, 1, -1]
    )


def test_block_double_z_pair():
    block = substitute_block(parse_pauli("ZZ"))
    want = {"II": 0.5, "XX": -0.5, "YY": -0.5, "ZZ": 0.5}
    got = expansion(block.matrix)
    assert got.keys() == want.keys()
    for label, coeff in want.items():
        assert got[label] == pytest.approx(coeff, abs=1e-12)
    assert eigenvalue_multiset(block.eigenvalues) == eigenvalue_multiset(
        [1, -1, 1, 1]
    )


def test_block_ix_pair_is_non_hermitian():
    block = substitute_block(parse_pauli("IX"))
    want = {"IX": 0.5, "XI": 0.5, "YZ": 0.5j, "ZY": -0.5j}
    got = expansion(block.matrix)
    assert got.keys() == want.keys()
    for label, coeff in want.items():
        assert got[label] == pytest.approx(coeff, abs=1e-12)
    assert eigenvalue_multiset(block.eigenvalues) == eigenvalue_multiset(
        [-1, 1j, -1j, 1]
    )


def test_block_table_complete_and_cached():
    table = block_table()
    assert set(table.keys()) == set(PAIRS)
    assert block_table() is table  # precomputed once, shared read-only


def test_all_blocks_unitary():
    for label, block in block_table().items():
        gram = block.matrix @ block.matrix.conj().T
        assert np.max(np.abs(gram - np.eye(4))) < 1e-12, label


def test_all_blocks_match_permutation_oracle():
    for label, block in block_table().items():
        assert np.allclose(
            block.matrix, permuted_image(dense_pauli(label)), atol=1e-12
        ), label


def test_all_blocks_unit_modulus_quartic_eigenvalues():
    roots = np.array([1, -1, 1j, -1j])
    for label, block in block_table().items():
        for ev in block.eigenvalues:
            assert abs(abs(ev) - 1.0) < 1e-12, label
            assert np.min(np.abs(roots - ev)) < 1e-9, label


def test_all_blocks_diagonalizer_matches_in_order():
    for label, block in block_table().items():
        v = block.diagonalizer
        assert np.max(np.abs(v @ v.conj().T - np.eye(4))) < 1e-12, label
        diag = v @ block.matrix @ v.conj().T
        off = diag - np.diag(np.diag(diag))
        assert np.max(np.abs(off)) < 1e-10, label
        assert np.allclose(np.diag(diag), block.eigenvalues, atol=1e-10), label


def test_hermiticity_split_by_pair_letters():
    # Equal-letter pairs give Hermitian blocks; mixed pairs do not and their
    # spectra pick up a +-i pair.
    for label, block in block_table().items():
        hermitian = np.allclose(block.matrix, block.matrix.conj().T, atol=1e-12)
        if label[0] == label[1]:
            assert hermitian, label
        else:
            assert not hermitian, label
            imag = [ev for ev in block.eigenvalues if abs(ev.imag) > 0.5]
            assert len(imag) == 2, label


def test_blocks_pairwise_trace_orthogonal():
    table = block_table()
    for a in PAIRS:
        for b in PAIRS:
            inner = np.trace(table[a].matrix.conj().T @ table[b].matrix)
            want = 4.0 if a == b else 0.0
            assert abs(inner - want) < 1e-12, (a, b)


def test_block_requires_two_qubits():
    with pytest.raises(DomainError):
        substitute_block(parse_pauli("XYZ"))


# --- whole-operator transform ----------------------------------------------


def test_identity_operator_is_swap_product():
    op = substitute_operator(parse_pauli("IIII"))
    assert np.allclose(op.dense_interleaved(), np.kron(SWAP4, SWAP4), atol=1e-12)
    assert np.allclose(
        op.dense_halves(), permuted_image(np.eye(16)), atol=1e-12
    )


def test_operator_pairs_qubit_j_with_n_plus_j():
    # "XZXZ" pairs (letter 0, letter 2) = XX and (letter 1, letter 3) = ZZ.
    op = substitute_operator(parse_pauli("XZXZ"))
    table = block_table()
    assert np.allclose(op.blocks[0].matrix, table["XX"].matrix, atol=1e-14)
    assert np.allclose(op.blocks[1].matrix, table["ZZ"].matrix, atol=1e-14)


def test_operator_matches_permutation_oracle(rng):
    for n_half in (1, 2, 3):
        for _ in range(6):
            letters = "".join(rng.choice(list("IXYZ"), size=2 * n_half))
            op = substitute_operator(parse_pauli(letters))
            assert np.allclose(
                op.dense_halves(), permuted_image(dense_pauli(letters)), atol=1e-12
            ), letters


def test_operator_tensor_structure(rng):
    # Blocks factor per pair: block j comes from (letters[j], letters[n+j]).
    for _ in range(10):
        letters = "".join(rng.choice(list("IXYZ"), size=6))
        op = substitute_operator(parse_pauli(letters))
        for j in range(3):
            pair = letters[j] + letters[3 + j]
            assert np.allclose(
                op.blocks[j].matrix, block_table()[pair].matrix, atol=1e-14
            )


def test_operator_rejects_odd_length():
    with pytest.raises(DomainError):
        substitute_operator(parse_pauli("XYZ"))


def test_transform_keeps_coefficients():
    h = PauliSum([(0.3, "II"), (0.7, "XX")])
    ssum = transform_hamiltonian(h)
    by_pair = {
        term[1].blocks[0].source_pair.letters: term[0] for term in ssum.terms
    }
    assert by_pair == {"II": pytest.approx(0.3), "XX": pytest.approx(0.7)}


def test_transform_single_term():
    ssum = transform_hamiltonian(PauliSum([(1.0, "ZZ")]))
    assert len(ssum.terms) == 1
    coeff, op = ssum.terms[0]
    assert coeff == pytest.approx(1.0)
    assert np.allclose(op.dense_halves(), block_table()["ZZ"].matrix, atol=1e-14)


def test_transform_rejects_odd_qubits():
    with pytest.raises(DomainError):
        transform_hamiltonian(PauliSum([(1.0, "XYZ")]))


def test_transform_exhaustive_index_identity(rng):
    """<il|transformed|jk> equals <ij|source|kl> for every index quadruple."""
    for n_half in (1, 2):
        d = 1 << n_half
        terms = [
            (float(rng.normal()), "".join(rng.choice(list("IXYZ"), size=2 * n_half)))
            for _ in range(5)
        ]
        h = PauliSum(terms)
        ha = to_dense(h)
        hb = dense_substitute_halves(h)
        for i in range(d):
            for j in range(d):
                for k in range(d):
                    for l in range(d):
                        got = hb[i * d + l, j * d + k]
                        want = ha[i * d + j, k * d + l]
                        assert abs(got - want) < 1e-12


# --- measurement rotations ---------------------------------------------------


def compose_gates(gates) -> np.ndarray:
    return circuit_unitary(
        QuantumCircuit(n_qubits=2, gates=tuple(gates), n_parameters=0)
    )


def test_rotation_circuits_reproduce_diagonalizers():
    for label, block in block_table().items():
        u = compose_gates(rotation_circuit(block))
        # match up to global phase
        overlap = np.trace(block.diagonalizer.conj().T @ u) / 4.0
        assert abs(abs(overlap) - 1.0) < 1e-10, label
        aligned = u * np.conj(overlap / abs(overlap))
        assert np.max(np.abs(aligned - block.diagonalizer)) < 1e-10, label


def test_rotation_circuits_diagonalize_blocks():
    for label, block in block_table().items():
        u = compose_gates(rotation_circuit(block))
        diag = u @ block.matrix @ u.conj().T
        off = diag - np.diag(np.diag(diag))
        assert np.max(np.abs(off)) < 1e-10, label
        assert np.allclose(np.diag(diag), block.eigenvalues, atol=1e-10), label


def test_rotation_gate_inventory():
    allowed = {"RZ", "RY", "RX", "CNOT", "U1"}
    for block in block_table().values():
        for gate in rotation_circuit(block):
            assert gate.kind in allowed


# --- swap observable ---------------------------------------------------------


def swap_expectation(n: int, rho: np.ndarray, sigma: np.ndarray) -> complex:
    dense = swap_observable(n).dense_halves()
    return complex(np.trace(dense @ np.kron(rho, sigma)))


def test_swap_on_identical_pure_states():
    rho = np.diag([1.0, 0.0]).astype(complex)
    assert swap_expectation(1, rho, rho) == pytest.approx(1.0)


def test_swap_on_orthogonal_pure_states():
    rho = np.diag([1.0, 0.0]).astype(complex)
    sigma = np.diag([0.0, 1.0]).astype(complex)
    assert swap_expectation(1, rho, sigma) == pytest.approx(0.0, abs=1e-14)


def test_swap_measures_overlap(rng):
    for _ in range(5):
        rho = random_density_matrix(rng, 2).data
        sigma = random_density_matrix(rng, 2).data
        want = np.trace(rho @ sigma)
        assert swap_expectation(2, rho, sigma) == pytest.approx(
            complex(want), abs=1e-10
        )


def test_swap_requires_positive_width():
    with pytest.raises(DomainError):
        swap_observable(0)


# --- layout permutations ------------------------------------------------------


def test_layout_permutations_invert(rng):
    for n in (1, 2, 3):
        dim = 1 << (2 * n)
        mat = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        there = permute_qubits(mat, halves_to_interleaved_sources(n))
        back = permute_qubits(there, interleaved_to_halves_sources(n))
        assert np.allclose(back, mat, atol=1e-14)


def test_permute_qubits_matches_kron_reorder():
    # Exchanging the two qubits of A (x) B yields B (x) A.
    a = np.array([[1, 2], [3, 4]], dtype=complex)
    b = np.array([[0, 1j], [-1j, 5]], dtype=complex)
    swapped = permute_qubits(np.kron(a, b), [1, 0])
    assert np.allclose(swapped, np.kron(b, a), atol=1e-14)


# --- dump format ---------------------------------------------------------------


def test_dump_transform_is_json_ready():
    h = PauliSum([(0.5, "ZZ"), (-0.25, "XY")])
    doc = dump_transform(h)
    assert doc["qubits_per_copy"] == 1
    assert len(doc["terms"]) == 2
    for term in doc["terms"]:
        assert set(term.keys()) == {"coeff", "blocks"}
        for block in term["blocks"]:
            assert set(block.keys()) == {"pair", "eigenvalues", "rotations"}
            assert len(block["eigenvalues"]) == 4
            for rot in block["rotations"]:
                assert set(rot.keys()) == {"gate", "qubits", "angle"}
    json.dumps(doc)  # round-trips through JSON without custom encoders


def test_dense_substitute_capacity():
    h = PauliSum([(1.0, "Z" * 14)])
    with pytest.raises(DomainError):
        dense_substitute_halves(h)

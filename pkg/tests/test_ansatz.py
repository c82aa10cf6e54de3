"""Ansatz construction: fermionic mapping, Pauli-rotation compilation, the
low-rank coefficient ansatz, and the spin-preserving excitation ansatz."""

import numpy as np
import pytest
from scipy.linalg import expm

from dmvqem.ansatz import (
    ComplexPauliSum,
    FermionicTerm,
    SchmidtAnsatzSpec,
    UCCSDSpec,
    build_schmidt,
    build_ucc_spin_symmetric,
    compile_pauli_rotation,
    jordan_wigner,
)
from dmvqem.circuits import (
    NoiseModel,
    QuantumCircuit,
    circuit_unitary,
    partial_trace,
    purity,
    run_circuit,
    run_statevector,
)
from dmvqem.errors import DomainError
from dmvqem.pauli import parse_pauli

from conftest import dense_pauli

OFF = NoiseModel(0.0)


def dense_cps(op: ComplexPauliSum) -> np.ndarray:
    dim = 1 << op.n_qubits
    out = np.zeros((dim, dim), dtype=complex)
    for letters, weight in op.items():
        out += weight * dense_pauli(letters)
    return out


def dense_create(mode: int, n_modes: int) -> np.ndarray:
    """Ladder-operator oracle under the occupation-number ordering: a
    creation on the given mode with the standard sign string."""
    lower = np.array([[0, 0], [1, 0]], dtype=complex)  # |1><0|
    z = np.array([[1, 0], [0, -1]], dtype=complex)
    mats = []
    for m in range(n_modes):
        if m < mode:
            mats.append(z)
        elif m == mode:
            mats.append(lower)
        else:
            mats.append(np.eye(2))
    out = np.eye(1, dtype=complex)
    for m in mats:
        out = np.kron(out, m)
    return out


def number_operator(mode: int, n_modes: int) -> np.ndarray:
    c = dense_create(mode, n_modes)
    return c @ c.conj().T


# --- fermionic mapping ------------------------------------------------------


def test_mapping_first_up_mode():
    img = jordan_wigner(FermionicTerm(((0, True),)), n_modes=4)
    want = {"XIII": 0.5, "YIII": -0.5j}
    got = dict(img.items())
    assert got.keys() == want.keys()
    for label, weight in want.items():
        assert got[label] == pytest.approx(weight, abs=1e-14)


def test_mapping_first_down_mode_crosses_up_register():
    img = jordan_wigner(FermionicTerm(((2, True),)), n_modes=4)
    want = {"ZZXI": 0.5, "ZZYI": -0.5j}
    got = dict(img.items())
    assert got.keys() == want.keys()
    for label, weight in want.items():
        assert got[label] == pytest.approx(weight, abs=1e-14)


def test_mapping_number_operator():
    img = jordan_wigner(FermionicTerm(((1, True), (1, False))), n_modes=4)
    got = dict(img.items())
    assert got["IIII"] == pytest.approx(0.5)
    assert got["IZII"] == pytest.approx(-0.5)


def test_mapping_matches_dense_ladder_oracle(rng):
    for _ in range(10):
        n_modes = 4
        length = int(rng.integers(1, 4))
        ops = tuple(
            (int(rng.integers(n_modes)), bool(rng.integers(2))) for _ in range(length)
        )
        img = jordan_wigner(FermionicTerm(ops), n_modes=n_modes)
        want = np.eye(1 << n_modes, dtype=complex)
        for mode, creates in ops:
            c = dense_create(mode, n_modes)
            want = want @ (c if creates else c.conj().T)
        assert np.max(np.abs(dense_cps(img) - want)) < 1e-12


def test_mapping_anticommutation(rng):
    # {a_i, a_j^dag} = delta_ij and {a_i, a_j} = 0 on 4 modes
    n_modes = 4
    dim = 1 << n_modes
    create = [dense_create(m, n_modes) for m in range(n_modes)]
    annihilate = [c.conj().T for c in create]
    for i in range(n_modes):
        for j in range(n_modes):
            anti = annihilate[i] @ create[j] + create[j] @ annihilate[i]
            want = np.eye(dim) if i == j else np.zeros((dim, dim))
            assert np.max(np.abs(anti - want)) < 1e-12
            anti2 = annihilate[i] @ annihilate[j] + annihilate[j] @ annihilate[i]
            assert np.max(np.abs(anti2)) < 1e-12


def test_mapping_rejects_out_of_range():
    with pytest.raises(DomainError):
        jordan_wigner(FermionicTerm(((4, True),)), n_modes=4)


# --- Pauli rotation compilation ------------------------------------------------


def compose(gates, n_qubits: int, params=None) -> np.ndarray:
    n_params = 0 if params is None else len(params)
    circuit = QuantumCircuit(n_qubits=n_qubits, gates=tuple(gates), n_parameters=n_params)
    return circuit_unitary(circuit, params)


def test_rotation_single_z_is_one_gate():
    gates = compile_pauli_rotation(parse_pauli("Z"), 0)
    assert len(gates) == 1
    assert gates[0].kind == "RZ" and gates[0].parameter_index == 0


def test_rotation_staircase_structure():
    gates = compile_pauli_rotation(parse_pauli("ZZZZ"), 0)
    kinds = [g.kind for g in gates]
    assert kinds == ["CNOT", "CNOT", "CNOT", "RZ", "CNOT", "CNOT", "CNOT"]


def test_rotation_matches_matrix_exponential(rng):
    worst = 0.0
    for _ in range(50):
        n = int(rng.integers(1, 5))
        letters = "".join(rng.choice(list("IXYZ"), size=n))
        if set(letters) == {"I"}:
            letters = letters[:-1] + "X"
        theta = float(rng.uniform(-2 * np.pi, 2 * np.pi))
        gates = compile_pauli_rotation(parse_pauli(letters), 0)
        got = compose(gates, n, np.array([theta]))
        want = expm(-0.5j * theta * dense_pauli(letters))
        worst = max(worst, float(np.max(np.abs(got - want))))
    assert worst < 1e-10


def test_rotation_scale_factor(rng):
    theta = 0.7
    gates = compile_pauli_rotation(parse_pauli("XY"), 0, scale=-2.0)
    got = compose(gates, 2, np.array([theta]))
    want = expm(-0.5j * (-2.0 * theta) * dense_pauli("XY"))
    assert np.max(np.abs(got - want)) < 1e-10


def test_rotation_rejects_identity():
    with pytest.raises(DomainError):
        compile_pauli_rotation(parse_pauli("III"), 0)


# --- low-rank coefficient ansatz -------------------------------------------------


def test_schmidt_zero_links_always_pure(rng):
    spec = SchmidtAnsatzSpec(n=3, links=0, dist_depth=1, mix_depth=1)
    circuit = build_schmidt(spec)
    assert circuit.n_qubits == 3
    for _ in range(10):
        params = rng.uniform(-np.pi, np.pi, size=circuit.n_parameters)
        rho = run_circuit(circuit, params, OFF)
        assert purity(rho) == pytest.approx(1.0, abs=1e-12)


def test_schmidt_single_link_quarter_turn_is_maximally_mixed():
    # distributor RY(pi/2) plus one bridge makes the reduced state I/2
    spec = SchmidtAnsatzSpec(n=1, links=1, dist_depth=1, mix_depth=0)
    circuit = build_schmidt(spec)
    assert circuit.n_qubits == 2
    params = np.zeros(circuit.n_parameters)
    params[0] = np.pi / 2
    full = run_circuit(circuit, params, OFF)
    rho = partial_trace(full, keep=(0,))
    assert np.allclose(rho.data, np.eye(2) / 2, atol=1e-12)


def test_schmidt_purity_and_rank_bounds(rng):
    spec = SchmidtAnsatzSpec(n=3, links=2, dist_depth=1, mix_depth=1)
    circuit = build_schmidt(spec)
    assert circuit.n_qubits == 5
    for _ in range(50):
        params = rng.uniform(-np.pi, np.pi, size=circuit.n_parameters)
        vec = run_statevector(circuit, params)
        # Schmidt rank across (upper 3 | lower 2) is at most 2^links
        mat = vec.reshape(8, 4)
        singular = np.linalg.svd(mat, compute_uv=False)
        assert np.sum(singular > 1e-9) <= 4
        rho = partial_trace(run_circuit(circuit, params, OFF), keep=(0, 1, 2))
        assert purity(rho) >= 0.25 - 1e-12


def test_schmidt_rejects_links_above_n():
    with pytest.raises(DomainError):
        SchmidtAnsatzSpec(n=2, links=3, dist_depth=1, mix_depth=1)


def test_schmidt_parameter_budget():
    spec = SchmidtAnsatzSpec(n=3, links=2, dist_depth=2, mix_depth=2)
    circuit = build_schmidt(spec)
    # distributor: dist_depth * links real rotations; mixer: mix_depth * 3n
    assert circuit.n_parameters == 2 * 2 + 2 * 9


# --- spin-preserving excitation ansatz ---------------------------------------------


def test_ucc_spec_full_counts():
    spec = UCCSDSpec.full(2, 1)
    assert spec.n_parameters == 3
    circuit, reference = build_ucc_spin_symmetric(spec)
    assert reference == "1010"
    assert circuit.n_qubits == 4


def test_ucc_zero_angles_give_reference_state():
    spec = UCCSDSpec.full(2, 1)
    circuit, reference = build_ucc_spin_symmetric(spec)
    vec = run_statevector(circuit, np.zeros(circuit.n_parameters), initial_state=reference)
    want = np.zeros(16, dtype=complex)
    want[int(reference, 2)] = 1.0
    assert np.max(np.abs(vec - want)) < 1e-12


def test_ucc_generator_products_match_exponentials(rng):
    # each compiled factor equals the exponential of its mapped generator
    for ops in (((1, True),), ((1, True), (3, True), (2, False), (0, False))):
        term = FermionicTerm(ops)
        img = jordan_wigner(term, n_modes=4)
        anti = img - img.dagger()  # antihermitian generator t - t^dag
        theta = float(rng.uniform(-1.5, 1.5))
        want = expm(theta * dense_cps(anti))
        gates = []
        for letters, weight in anti.items():
            if abs(weight.imag) < 1e-14:
                continue
            gates.extend(
                compile_pauli_rotation(
                    parse_pauli(letters), 0, scale=-2.0 * weight.imag
                )
            )
        got = compose(gates, 4, np.array([theta]))
        assert np.max(np.abs(got - want)) < 1e-10


def test_ucc_conserves_spin_sector_counts(rng):
    spec = UCCSDSpec.full(2, 1)
    circuit, reference = build_ucc_spin_symmetric(spec)
    n_up = number_operator(0, 4) + number_operator(1, 4)
    n_down = number_operator(2, 4) + number_operator(3, 4)
    for _ in range(20):
        params = rng.uniform(-np.pi, np.pi, size=circuit.n_parameters)
        vec = run_statevector(circuit, params, initial_state=reference)
        up = np.real(vec.conj() @ n_up @ vec)
        down = np.real(vec.conj() @ n_down @ vec)
        assert up == pytest.approx(1.0, abs=1e-10)
        assert down == pytest.approx(1.0, abs=1e-10)
        # variance zero: the state lives in one number sector per register
        up_var = np.real(vec.conj() @ (n_up @ n_up) @ vec) - up**2
        assert abs(up_var) < 1e-9


def test_ucc_commutes_with_sector_number_operators(rng):
    for n_orbitals in (2, 3):
        spec = UCCSDSpec.full(n_orbitals, 1)
        circuit, _ = build_ucc_spin_symmetric(spec)
        params = rng.uniform(-0.8, 0.8, size=circuit.n_parameters)
        u = circuit_unitary(circuit, params)
        modes = 2 * n_orbitals
        n_up = sum(number_operator(m, modes) for m in range(n_orbitals))
        n_down = sum(number_operator(m, modes) for m in range(n_orbitals, modes))
        for op in (n_up, n_down):
            comm = u @ op - op @ u
            assert np.max(np.abs(comm)) < 1e-9


def test_ucc_wrong_sector_projection_vanishes(rng):
    spec = UCCSDSpec.full(2, 1)
    circuit, reference = build_ucc_spin_symmetric(spec)
    # projector onto the (1 up, 1 down) sector of the 4-mode register
    dim = 16
    diag = np.zeros(dim)
    for idx in range(dim):
        bits = [(idx >> (3 - b)) & 1 for b in range(4)]
        if bits[0] + bits[1] == 1 and bits[2] + bits[3] == 1:
            diag[idx] = 1.0
    wrong = np.eye(dim) - np.diag(diag)
    for _ in range(20):
        params = rng.uniform(-np.pi, np.pi, size=circuit.n_parameters)
        vec = run_statevector(circuit, params, initial_state=reference)
        assert np.linalg.norm(wrong @ vec) < 1e-9


def test_ucc_sector_locking_aliases_parameters(rng):
    free = UCCSDSpec.full(2, 1, lock_spin_sectors=False)
    locked = UCCSDSpec.full(2, 1, lock_spin_sectors=True)
    c_free, ref = build_ucc_spin_symmetric(free)
    c_lock, _ = build_ucc_spin_symmetric(locked)
    assert c_free.n_parameters == 3
    assert c_lock.n_parameters == 2
    a, b = rng.uniform(-1.0, 1.0, size=2)
    v_lock = run_statevector(c_lock, np.array([a, b]), initial_state=ref)
    v_free = run_statevector(c_free, np.array([a, a, b]), initial_state=ref)
    assert np.max(np.abs(v_lock - v_free)) < 1e-12


def test_ucc_spec_validation():
    with pytest.raises(DomainError):
        UCCSDSpec.full(0, 0)
    with pytest.raises(DomainError):
        UCCSDSpec.full(2, 3)  # more electrons per sector than orbitals
    with pytest.raises(DomainError):
        UCCSDSpec(n_orbitals=3, electrons=1, singles_up=((0, 1),))
    with pytest.raises(DomainError):
        UCCSDSpec(
            n_orbitals=3,
            electrons=1,
            singles_up=((1, 0),),
            lock_spin_sectors=True,
        )

"""Kernel backend selection: the accelerated and fallback paths expose the
same names and produce bit-identical numbers."""

import os
import subprocess
import sys

import numpy as np

from dmvqem import kernels
from dmvqem._backend import HAS_NUMBA, backend_name

# A representative workload touching every dispatched kernel: a noisy
# circuit evolution plus one ensemble cost evaluation.  Printed as hex so
# byte equality across processes is unambiguous.
WORKLOAD = r"""
import numpy as np
from dmvqem._backend import backend_name
from dmvqem.ansatz import SchmidtAnsatzSpec, build_schmidt
from dmvqem.circuits import Gate, NoiseModel, QuantumCircuit, run_circuit
from dmvqem.pauli import PauliSum
from dmvqem.vqe import StatePreparation, VQEProblem, cost

print(backend_name())

gates = (
    Gate("H", (0,)),
    Gate("CNOT", (0, 1)),
    Gate("RY", (2,), parameter_index=0),
    Gate("CNOT", (1, 2)),
    Gate("RZ", (0,), parameter_index=1),
    Gate("SWAP", (0, 2)),
)
circuit = QuantumCircuit(n_qubits=3, gates=gates, n_parameters=2)
params = np.array([0.7, -1.2])
rho = run_circuit(circuit, params, NoiseModel(0.05))
print(np.ascontiguousarray(rho.data).tobytes().hex())

spec = SchmidtAnsatzSpec(n=2, links=1, dist_depth=1, mix_depth=1)
prep = build_schmidt(spec)
problem = VQEProblem(
    hamiltonian=PauliSum([(0.7, "ZZII"), (-0.4, "XXYY"), (0.2, "IZZI")]),
    preparations=tuple(
        StatePreparation(circuit=prep, keep=(0, 1)) for _ in range(2)
    ),
    noise=NoiseModel(1e-3),
)
x = np.linspace(-1.0, 1.0, problem.n_parameters)
print(repr(cost(problem, x)))
"""


def run_workload(disable_numba: bool) -> list[str]:
    env = dict(os.environ)
    env["DMVQEM_DISABLE_NUMBA"] = "1" if disable_numba else "0"
    proc = subprocess.run(
        [sys.executable, "-c", WORKLOAD],
        capture_output=True,
        text=True,
        env=env,
        check=True,
    )
    return proc.stdout.splitlines()


def test_accelerated_backend_active_by_default():
    assert HAS_NUMBA
    assert backend_name() == "numba"


def test_dispatch_exposes_both_flavors():
    for name in (
        "left_mul_1q",
        "right_mul_dag_1q",
        "left_mul_2q",
        "right_mul_dag_2q",
        "depolarize_1q",
        "depolarize_2q",
        "apply_vec_1q",
        "apply_vec_2q",
    ):
        assert hasattr(kernels, name)
        assert callable(getattr(kernels, f"_{name}_np"))
        assert callable(getattr(kernels, f"_{name}_nb"))


def test_env_flag_selects_fallback():
    lines = run_workload(disable_numba=True)
    assert lines[0] == "numpy"


def test_backends_are_bit_identical():
    fast = run_workload(disable_numba=False)
    slow = run_workload(disable_numba=True)
    assert fast[0] == "numba"
    assert slow[0] == "numpy"
    assert fast[1:] == slow[1:]


def test_numpy_flavor_matches_in_process(rng):
    # spot-check one kernel pair directly on random data
    rho = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    rho = np.ascontiguousarray(rho + rho.conj().T)
    u = np.linalg.qr(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))[0]
    u = np.ascontiguousarray(u)
    for qubit in range(3):
        a = kernels._left_mul_1q_nb(rho.copy(), u, qubit, 3)
        b = kernels._left_mul_1q_np(rho.copy(), u, qubit, 3)
        assert np.array_equal(a, b)
        c = kernels._depolarize_1q_nb(rho.copy(), 0.05, qubit, 3)
        d = kernels._depolarize_1q_np(rho.copy(), 0.05, qubit, 3)
        assert np.max(np.abs(c - d)) < 1e-15

"""Parameterized circuits and dense density-matrix simulation under noise.

Gates apply to a density matrix as rho -> U rho U^dag; after every gate the
uniform depolarizing channel acts on that gate's support with probability p
(one fault location per gate), applied exactly rather than trajectory-sampled.

The channel on k in {1, 2} qubits,
    rho -> (1 - p) rho + p / (4^k - 1) * sum over non-identity Paulis P rho P,
collapses to the closed form implemented in kernels:
    rho -> (1 - c) rho + c (I/2^k (x) Tr_support rho),  c = p 4^k / (4^k - 1).

Qubit 0 is the most significant bit; two-qubit gate matrices use the basis
(b_first, b_second) with the first listed qubit as the more significant pair
bit, so CNOT(control, target) has its control as the first index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from typing import Iterable, Sequence, Union

import numpy as np

from . import kernels
from .errors import CapacityError, DomainError
from .pauli import DENSE_LIMIT_DEFAULT

ROTATION_KINDS = frozenset({"RX", "RY", "RZ", "U1", "ORTHO_RY"})
FIXED_1Q_KINDS = frozenset({"H", "X", "Y", "Z"})
FIXED_2Q_KINDS = frozenset({"CNOT", "SWAP"})
GATE_KINDS = ROTATION_KINDS | FIXED_1Q_KINDS | FIXED_2Q_KINDS

_H = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=np.complex128) / math.sqrt(2.0)
_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128)
_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=np.complex128)
_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=np.complex128)
_CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=np.complex128
)
_SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=np.complex128
)


@dataclass(frozen=True)
class Gate:
    """One circuit gate.

    Rotation kinds resolve their angle as
        angle + scale * params[parameter_index]
    when parameter_index is set, otherwise use the literal angle. The scale
    hook lets one shared parameter drive several rotations with fixed signs
    (needed when a product of Pauli rotations shares one variational angle).
    ORTHO_RY is the same matrix as RY; the distinct kind marks gates that
    belong to a real-orthogonal block so such blocks stay identifiable in
    serialized circuits.
    """

    kind: str
    qubits: tuple[int, ...]
    angle: float = 0.0
    parameter_index: int | None = None
    scale: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in GATE_KINDS:
            raise DomainError(f"unknown gate kind {self.kind!r}")
        qubits = tuple(int(q) for q in self.qubits)
        object.__setattr__(self, "qubits", qubits)
        arity = 2 if self.kind in FIXED_2Q_KINDS else 1
        if len(qubits) != arity:
            raise DomainError(
                f"{self.kind} takes {arity} qubit(s), got {len(qubits)}"
            )
        if len(set(qubits)) != len(qubits):
            raise DomainError(f"{self.kind} qubits must be distinct, got {qubits}")
        if any(q < 0 for q in qubits):
            raise DomainError(f"negative qubit index in {qubits}")
        if self.kind not in ROTATION_KINDS:
            if self.parameter_index is not None:
                raise DomainError(f"{self.kind} cannot carry a parameter")
            if self.angle != 0.0:
                raise DomainError(f"{self.kind} takes no angle")
        if self.parameter_index is not None and self.parameter_index < 0:
            raise DomainError("parameter_index must be nonnegative")

    @property
    def arity(self) -> int:
        return len(self.qubits)

    def resolved_angle(self, params: np.ndarray | None) -> float:
        if self.parameter_index is None:
            return self.angle
        if params is None:
            raise DomainError("gate references a parameter but none were given")
        return self.angle + self.scale * float(params[self.parameter_index])


def _rx(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
    return np.array([[c, -1.0j * s], [-1.0j * s, c]], dtype=np.complex128)


def _ry(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
    return np.array([[c, -s], [s, c]], dtype=np.complex128)


def _rz(theta: float) -> np.ndarray:
    return np.array(
        [[np.exp(-0.5j * theta), 0.0], [0.0, np.exp(0.5j * theta)]],
        dtype=np.complex128,
    )


def _u1(theta: float) -> np.ndarray:
    return np.array([[1.0, 0.0], [0.0, np.exp(1.0j * theta)]], dtype=np.complex128)


def gate_matrix(gate: Gate, params: np.ndarray | None = None) -> np.ndarray:
    """Dense 2x2 or 4x4 unitary of one gate with parameters resolved."""
    kind = gate.kind
    if kind in ROTATION_KINDS:
        theta = gate.resolved_angle(params)
        if kind == "RX":
            return _rx(theta)
        if kind in ("RY", "ORTHO_RY"):
            return _ry(theta)
        if kind == "RZ":
            return _rz(theta)
        return _u1(theta)
    if kind == "H":
        return _H.copy()
    if kind == "X":
        return _X.copy()
    if kind == "Y":
        return _Y.copy()
    if kind == "Z":
        return _Z.copy()
    if kind == "CNOT":
        return _CNOT.copy()
    return _SWAP.copy()


@dataclass(frozen=True)
class QuantumCircuit:
    """An ordered gate list on a fixed register with a parameter vector slot."""

    n_qubits: int
    gates: tuple[Gate, ...]
    n_parameters: int = 0

    def __post_init__(self) -> None:
        if self.n_qubits < 1:
            raise DomainError(f"n_qubits must be positive, got {self.n_qubits}")
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            if any(q >= self.n_qubits for q in g.qubits):
                raise DomainError(
                    f"gate {g.kind} on {g.qubits} exceeds register of "
                    f"{self.n_qubits} qubits"
                )
            if g.parameter_index is not None and g.parameter_index >= self.n_parameters:
                raise DomainError(
                    f"parameter_index {g.parameter_index} outside vector of "
                    f"length {self.n_parameters}"
                )

    @property
    def gate_count(self) -> int:
        return len(self.gates)

    def extended(self, other: "QuantumCircuit") -> "QuantumCircuit":
        """Concatenate another circuit on the same register; parameter slots
        of the second circuit keep their indices (the vectors must already
        share one layout)."""
        if other.n_qubits != self.n_qubits:
            raise DomainError("cannot concatenate circuits of different width")
        return QuantumCircuit(
            self.n_qubits,
            self.gates + other.gates,
            max(self.n_parameters, other.n_parameters),
        )


@dataclass(frozen=True)
class NoiseModel:
    """Per-gate-location depolarizing strength; one location per gate."""

    p: float = 0.0
    enabled: bool = True

    def __post_init__(self) -> None:
        if not 0.0 <= self.p <= 1.0:
            raise DomainError(f"noise strength must lie in [0, 1], got {self.p}")

    @property
    def active(self) -> bool:
        return self.enabled and self.p > 0.0

    @classmethod
    def off(cls) -> "NoiseModel":
        return cls(p=0.0, enabled=False)


class DensityMatrix:
    """Dense unit-trace positive-semidefinite operator on n qubits.

    The backing array is frozen after validation so instances can be shared
    across concurrent estimation tasks.
    """

    __slots__ = ("n_qubits", "data")

    def __init__(self, data: np.ndarray, validate: bool = True) -> None:
        data = np.asarray(data, dtype=np.complex128)
        if data.ndim != 2 or data.shape[0] != data.shape[1]:
            raise DomainError(f"density matrix must be square, got {data.shape}")
        dim = data.shape[0]
        n = dim.bit_length() - 1
        if 1 << n != dim:
            raise DomainError(f"dimension {dim} is not a power of 2")
        if validate:
            herm = np.max(np.abs(data - data.conj().T))
            if herm > 1e-10:
                raise DomainError(f"matrix not Hermitian: max deviation {herm:.3e}")
            tr = data.trace()
            if abs(tr - 1.0) > 1e-10:
                raise DomainError(f"trace must be 1, got {tr}")
            low = float(np.min(np.linalg.eigvalsh(data)))
            if low < -1e-9:
                raise DomainError(f"negative eigenvalue {low:.3e}")
        data = data.copy()
        data.flags.writeable = False
        object.__setattr__(self, "n_qubits", n)
        object.__setattr__(self, "data", data)

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("DensityMatrix is immutable")

    @classmethod
    def basis_state(cls, n_qubits: int, index: Union[int, str]) -> "DensityMatrix":
        idx = _basis_index(n_qubits, index)
        dim = 1 << n_qubits
        data = np.zeros((dim, dim), dtype=np.complex128)
        data[idx, idx] = 1.0
        return cls(data, validate=False)

    @classmethod
    def from_statevector(cls, vec: np.ndarray) -> "DensityMatrix":
        vec = np.asarray(vec, dtype=np.complex128)
        nrm = np.linalg.norm(vec)
        if nrm < 1e-12:
            raise DomainError("zero statevector")
        vec = vec / nrm
        return cls(np.outer(vec, vec.conj()), validate=False)

    def expectation(self, observable: np.ndarray) -> complex:
        return complex(np.trace(observable @ self.data))


def _basis_index(n_qubits: int, index: Union[int, str]) -> int:
    if isinstance(index, str):
        if len(index) != n_qubits or any(ch not in "01" for ch in index):
            raise DomainError(f"bad basis label {index!r} for {n_qubits} qubits")
        return int(index, 2)
    idx = int(index)
    if not 0 <= idx < (1 << n_qubits):
        raise DomainError(f"basis index {idx} out of range for {n_qubits} qubits")
    return idx


def _check_capacity(n_qubits: int, dense_limit: int) -> None:
    if n_qubits > dense_limit:
        raise CapacityError(
            f"simulation needs {n_qubits} qubits, above the dense limit "
            f"{dense_limit}"
        )


def _apply_gate_density(rho: np.ndarray, gate: Gate, u: np.ndarray, n: int) -> None:
    if gate.arity == 1:
        q = gate.qubits[0]
        kernels.left_mul_1q(rho, u, q, n)
        kernels.right_mul_dag_1q(rho, u, q, n)
    else:
        q1, q2 = gate.qubits
        kernels.left_mul_2q(rho, u, q1, q2, n)
        kernels.right_mul_dag_2q(rho, u, q1, q2, n)


def run_circuit(
    circuit: QuantumCircuit,
    params: Sequence[float] | np.ndarray | None,
    noise: NoiseModel,
    initial_state: Union[int, str] = 0,
    dense_limit: int = DENSE_LIMIT_DEFAULT,
    validate: bool = True,
) -> DensityMatrix:
    """Deterministically evolve a basis state through the noisy circuit."""
    _check_capacity(circuit.n_qubits, dense_limit)
    params = _check_params(circuit, params)
    n = circuit.n_qubits
    dim = 1 << n
    rho = np.zeros((dim, dim), dtype=np.complex128)
    rho[_basis_index(n, initial_state), _basis_index(n, initial_state)] = 1.0
    for gate in circuit.gates:
        u = gate_matrix(gate, params)
        _apply_gate_density(rho, gate, u, n)
        if noise.active:
            if gate.arity == 1:
                kernels.depolarize_1q(rho, gate.qubits[0], n, noise.p)
            else:
                kernels.depolarize_2q(rho, gate.qubits[0], gate.qubits[1], n, noise.p)
    return DensityMatrix(rho, validate=validate)


def run_statevector(
    circuit: QuantumCircuit,
    params: Sequence[float] | np.ndarray | None,
    initial_state: Union[int, str] = 0,
    dense_limit: int = DENSE_LIMIT_DEFAULT,
) -> np.ndarray:
    """Noiseless pure-state reference path for the p = 0 cross-check."""
    _check_capacity(circuit.n_qubits, dense_limit)
    params = _check_params(circuit, params)
    n = circuit.n_qubits
    vec = np.zeros(1 << n, dtype=np.complex128)
    vec[_basis_index(n, initial_state)] = 1.0
    for gate in circuit.gates:
        u = gate_matrix(gate, params)
        if gate.arity == 1:
            kernels.apply_vec_1q(vec, u, gate.qubits[0], n)
        else:
            kernels.apply_vec_2q(vec, u, gate.qubits[0], gate.qubits[1], n)
    return vec


def circuit_unitary(
    circuit: QuantumCircuit,
    params: Sequence[float] | np.ndarray | None = None,
    dense_limit: int = DENSE_LIMIT_DEFAULT,
) -> np.ndarray:
    """Dense unitary of the whole circuit (gates composed left to right)."""
    _check_capacity(circuit.n_qubits, dense_limit)
    params = _check_params(circuit, params)
    n = circuit.n_qubits
    u_total = np.eye(1 << n, dtype=np.complex128)
    for gate in circuit.gates:
        u = gate_matrix(gate, params)
        if gate.arity == 1:
            kernels.left_mul_1q(u_total, u, gate.qubits[0], n)
        else:
            kernels.left_mul_2q(u_total, u, gate.qubits[0], gate.qubits[1], n)
    return u_total


def _check_params(
    circuit: QuantumCircuit, params: Sequence[float] | np.ndarray | None
) -> np.ndarray | None:
    if circuit.n_parameters == 0:
        return None if params is None else np.asarray(params, dtype=np.float64)
    if params is None:
        raise DomainError(
            f"circuit expects {circuit.n_parameters} parameters, got none"
        )
    arr = np.asarray(params, dtype=np.float64)
    if arr.shape != (circuit.n_parameters,):
        raise DomainError(
            f"circuit expects {circuit.n_parameters} parameters, got shape "
            f"{arr.shape}"
        )
    return arr


def fault_rate(circuit: QuantumCircuit, noise: NoiseModel) -> float:
    """Circuit fault rate: per-location strength times gate count.

    The strength is taken at its decimal face value (shortest float repr,
    which is how it appears in config files) and the product is rounded
    once, so a rate like 115 gates at 1e-3 is exactly 0.115 rather than
    one ulp off.
    """
    if not noise.active:
        return 0.0
    exact = Fraction(Decimal(repr(noise.p))) * circuit.gate_count
    return float(exact)


def partial_trace(rho: DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    """Reduced state on the kept qubits, in their original relative order."""
    n = rho.n_qubits
    keep_sorted = sorted(set(int(q) for q in keep))
    if not keep_sorted:
        raise DomainError("keep set must be nonempty")
    if keep_sorted[0] < 0 or keep_sorted[-1] >= n:
        raise DomainError(f"keep set {keep_sorted} out of range for {n} qubits")
    traced = [q for q in range(n) if q not in keep_sorted]
    t = rho.data.reshape((2,) * (2 * n))
    remaining = list(range(n))
    for q in sorted(traced, reverse=True):
        m = len(remaining)
        idx = remaining.index(q)
        t = np.trace(t, axis1=idx, axis2=m + idx)
        remaining.pop(idx)
    dim = 1 << len(keep_sorted)
    return DensityMatrix(t.reshape(dim, dim), validate=False)


def purity(rho: DensityMatrix) -> float:
    """Tr(rho^2), equal to the squared Frobenius norm for Hermitian input."""
    return float(np.vdot(rho.data, rho.data).real)

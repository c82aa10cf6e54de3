"""Variational circuit builders.

Two families: a Schmidt-structured ansatz that prepares an n-qubit mixed
state by entangling a small coefficient register with the upper system and
tracing it out, and a spin-symmetric unitary coupled-cluster ansatz for
electronic-structure problems, compiled to CNOT staircases around single
RZ rotations via the Jordan-Wigner mapping.

Fermionic-to-qubit images generally carry complex weights, so this module
keeps its own complex-weighted Pauli algebra; the real-coefficient
observable container in the pauli module is unaffected.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .circuits import Gate, QuantumCircuit
from .errors import DomainError, InternalCheckError
from .pauli import PauliString, parse_pauli

# Single-letter Pauli products: (left, right) -> (phase, result letter).
_LETTER_PRODUCT: dict[tuple[str, str], tuple[complex, str]] = {}
for _a in "IXYZ":
    _LETTER_PRODUCT[("I", _a)] = (1.0, _a)
    _LETTER_PRODUCT[(_a, "I")] = (1.0, _a)
    _LETTER_PRODUCT[(_a, _a)] = (1.0, "I")
for _a, _b, _c in (("X", "Y", "Z"), ("Y", "Z", "X"), ("Z", "X", "Y")):
    _LETTER_PRODUCT[(_a, _b)] = (1.0j, _c)
    _LETTER_PRODUCT[(_b, _a)] = (-1.0j, _c)

_WEIGHT_FLOOR = 1e-14


class ComplexPauliSum:
    """Complex-weighted sum of Pauli strings, closed under products.

    Used for fermionic-operator images, which are generally neither
    Hermitian nor real-weighted.
    """

    __slots__ = ("n_qubits", "terms")

    def __init__(self, n_qubits: int, terms: dict[str, complex] | None = None):
        if n_qubits < 1:
            raise DomainError(f"need at least one qubit, got {n_qubits}")
        cleaned: dict[str, complex] = {}
        for label, weight in (terms or {}).items():
            if len(label) != n_qubits:
                raise DomainError(
                    f"term {label!r} does not act on {n_qubits} qubits"
                )
            if abs(weight) > _WEIGHT_FLOOR:
                cleaned[label] = complex(weight)
        object.__setattr__(self, "n_qubits", n_qubits)
        object.__setattr__(self, "terms", cleaned)

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("ComplexPauliSum is immutable")

    @classmethod
    def identity(cls, n_qubits: int, weight: complex = 1.0) -> "ComplexPauliSum":
        return cls(n_qubits, {"I" * n_qubits: weight})

    def __add__(self, other: "ComplexPauliSum") -> "ComplexPauliSum":
        if other.n_qubits != self.n_qubits:
            raise DomainError("qubit count mismatch in sum")
        merged = dict(self.terms)
        for label, weight in other.terms.items():
            merged[label] = merged.get(label, 0.0) + weight
        return ComplexPauliSum(self.n_qubits, merged)

    def __sub__(self, other: "ComplexPauliSum") -> "ComplexPauliSum":
        return self + other.scaled(-1.0)

    def scaled(self, factor: complex) -> "ComplexPauliSum":
        return ComplexPauliSum(
            self.n_qubits, {k: v * factor for k, v in self.terms.items()}
        )

    def __matmul__(self, other: "ComplexPauliSum") -> "ComplexPauliSum":
        if other.n_qubits != self.n_qubits:
            raise DomainError("qubit count mismatch in product")
        out: dict[str, complex] = {}
        for left, wl in self.terms.items():
            for right, wr in other.terms.items():
                phase = 1.0 + 0.0j
                letters = []
                for a, b in zip(left, right):
                    p, c = _LETTER_PRODUCT[(a, b)]
                    phase *= p
                    letters.append(c)
                label = "".join(letters)
                out[label] = out.get(label, 0.0) + phase * wl * wr
        return ComplexPauliSum(self.n_qubits, out)

    def dagger(self) -> "ComplexPauliSum":
        return ComplexPauliSum(
            self.n_qubits, {k: v.conjugate() for k, v in self.terms.items()}
        )

    def items(self) -> Iterator[tuple[str, complex]]:
        return iter(sorted(self.terms.items()))


@dataclass(frozen=True)
class FermionicTerm:
    """Product of ladder operators; factors apply right to left to a ket.

    Each factor is (mode index, creates) under the mode ordering: spin-up
    orbitals 0..n-1 first, then spin-down orbitals n..2n-1.
    """

    factors: tuple[tuple[int, bool], ...]
    coefficient: complex = 1.0


def _ladder_image(mode: int, creates: bool, n_modes: int) -> ComplexPauliSum:
    """Jordan-Wigner image: parity string on earlier modes, X/iY on mode."""
    if not 0 <= mode < n_modes:
        raise DomainError(f"mode {mode} outside 0..{n_modes - 1}")
    prefix = "Z" * mode
    suffix = "I" * (n_modes - mode - 1)
    sign = -0.5j if creates else 0.5j
    return ComplexPauliSum(
        n_modes,
        {prefix + "X" + suffix: 0.5, prefix + "Y" + suffix: sign},
    )


def jordan_wigner(term: FermionicTerm, n_modes: int) -> ComplexPauliSum:
    """Qubit image of one ladder-operator product on n_modes modes."""
    result = ComplexPauliSum.identity(n_modes, term.coefficient)
    for mode, creates in term.factors:
        result = result @ _ladder_image(mode, creates, n_modes)
    return result


_BASIS_CHANGE = {
    "X": (("H", 0.0), ("H", 0.0)),
    "Y": (("RX", np.pi / 2), ("RX", -np.pi / 2)),
}


def compile_pauli_rotation(
    p: PauliString, theta_index: int, scale: float = 1.0
) -> list[Gate]:
    """Gates realizing exp(-i angle/2 * P) with angle = scale * theta.

    Non-identity letters rotate to the Z axis, a CNOT staircase folds the
    joint parity onto the last supported qubit, one RZ carries the
    parameter, and the staircase and basis changes unwind.
    """
    support = p.support()
    if not support:
        raise DomainError("rotation about the identity is a global phase")
    enter: list[Gate] = []
    leave: list[Gate] = []
    for q in support:
        letter = p.letter(q)
        if letter == "Z":
            continue
        (kind_in, angle_in), (kind_out, angle_out) = _BASIS_CHANGE[letter]
        enter.append(Gate(kind_in, (q,), angle=angle_in))
        leave.append(Gate(kind_out, (q,), angle=angle_out))
    stairs = [
        Gate("CNOT", (support[t], support[t + 1]))
        for t in range(len(support) - 1)
    ]
    core = Gate("RZ", (support[-1],), parameter_index=theta_index, scale=scale)
    return enter + stairs + [core] + list(reversed(stairs)) + list(reversed(leave))


@dataclass(frozen=True)
class SchmidtAnsatzSpec:
    """Shape of the Schmidt-structured preparation circuit.

    The circuit acts on n + links qubits: an orthogonal (real) block mixes
    the first `links` qubits, one CNOT per link copies their basis pattern
    onto the trailing register, and a general parameterized block acts on
    the upper n qubits.  Tracing out the trailing register leaves a state
    whose purity is at least 2^-links and whose rank is at most 2^links.
    """

    n: int
    links: int
    dist_depth: int = 1
    mix_depth: int = 1

    def __post_init__(self) -> None:
        if self.n < 1:
            raise DomainError(f"need at least one upper qubit, got {self.n}")
        if not 0 <= self.links <= self.n:
            raise DomainError(
                f"links must lie in [0, {self.n}], got {self.links}"
            )
        if self.dist_depth < 0 or self.mix_depth < 0:
            raise DomainError("layer depths cannot be negative")

    @property
    def total_qubits(self) -> int:
        return self.n + self.links

    @property
    def n_parameters(self) -> int:
        dist = self.links * self.dist_depth if self.links > 0 else 0
        return dist + 3 * self.n * self.mix_depth


def build_schmidt(spec: SchmidtAnsatzSpec) -> QuantumCircuit:
    """Coefficient register, copy links, then the upper-system mixer."""
    gates: list[Gate] = []
    index = 0
    for _ in range(spec.dist_depth):
        if spec.links == 0:
            break
        for q in range(spec.links):
            gates.append(Gate("ORTHO_RY", (q,), parameter_index=index))
            index += 1
        for q in range(spec.links - 1):
            gates.append(Gate("CNOT", (q, q + 1)))
    for q in range(spec.links):
        gates.append(Gate("CNOT", (q, spec.n + q)))
    for _ in range(spec.mix_depth):
        for q in range(spec.n):
            gates.append(Gate("RZ", (q,), parameter_index=index))
            gates.append(Gate("RY", (q,), parameter_index=index + 1))
            gates.append(Gate("RZ", (q,), parameter_index=index + 2))
            index += 3
        for q in range(spec.n - 1):
            gates.append(Gate("CNOT", (q, q + 1)))
    if index != spec.n_parameters:
        raise InternalCheckError(
            f"allocated {index} parameters, spec promises {spec.n_parameters}"
        )
    return QuantumCircuit(
        n_qubits=spec.total_qubits,
        gates=tuple(gates),
        n_parameters=spec.n_parameters,
    )


def _ordered_pairs(n: int) -> tuple[tuple[int, int], ...]:
    return tuple(
        (i, j) for i in range(n) for j in range(n) if i > j
    )


def _ordered_quads(n: int) -> tuple[tuple[int, int, int, int], ...]:
    return tuple(
        (i, j, k, l)
        for i in range(n)
        for j in range(n)
        for k in range(n)
        for l in range(n)
        if i > j > k > l
    )


def _mixed_quads(n: int) -> tuple[tuple[int, int, int, int], ...]:
    return tuple(
        (i, j, k, l)
        for i in range(n)
        for j in range(n)
        for k in range(n)
        for l in range(n)
        if i > l and j > k
    )


@dataclass(frozen=True)
class UCCSDSpec:
    """Excitation content of the spin-symmetric coupled-cluster circuit.

    Orbitals 0..n-1 carry spin up, n..2n-1 spin down, with `electrons`
    particles in each sector.  Index tuples follow the generator
    conventions: singles (i, j) move j -> i within one sector; same-sector
    doubles (i, j, k, l) move (k, l) -> (i, j); mixed doubles (i, j, k, l)
    move up l -> i and down k -> j.  When lock_spin_sectors is set, the
    spin-down singles and doubles reuse the spin-up parameter slots.
    """

    n_orbitals: int
    electrons: int
    singles_up: tuple[tuple[int, int], ...] = field(default=())
    singles_down: tuple[tuple[int, int], ...] = field(default=())
    doubles_mixed: tuple[tuple[int, int, int, int], ...] = field(default=())
    doubles_up: tuple[tuple[int, int, int, int], ...] = field(default=())
    doubles_down: tuple[tuple[int, int, int, int], ...] = field(default=())
    lock_spin_sectors: bool = False

    def __post_init__(self) -> None:
        if self.n_orbitals < 1:
            raise DomainError("need at least one spatial orbital")
        if not 0 <= self.electrons <= self.n_orbitals:
            raise DomainError(
                f"electrons per sector must lie in [0, {self.n_orbitals}], "
                f"got {self.electrons}"
            )
        n = self.n_orbitals
        for name in ("singles_up", "singles_down"):
            for i, j in getattr(self, name):
                if not (0 <= j < i < n):
                    raise DomainError(f"{name} pair ({i}, {j}) out of order")
        for name in ("doubles_up", "doubles_down"):
            for i, j, k, l in getattr(self, name):
                if not (0 <= l < k < j < i < n):
                    raise DomainError(
                        f"{name} tuple ({i}, {j}, {k}, {l}) out of order"
                    )
        for i, j, k, l in self.doubles_mixed:
            if not (0 <= l < i < n and 0 <= k < j < n):
                raise DomainError(
                    f"doubles_mixed tuple ({i}, {j}, {k}, {l}) out of order"
                )
        if self.lock_spin_sectors:
            if self.singles_down != self.singles_up:
                raise DomainError(
                    "locked sectors need identical up/down singles sets"
                )
            if self.doubles_down != self.doubles_up:
                raise DomainError(
                    "locked sectors need identical up/down doubles sets"
                )

    @classmethod
    def full(
        cls, n_orbitals: int, electrons: int, lock_spin_sectors: bool = False
    ) -> "UCCSDSpec":
        """Every generator the ansatz family admits, both sectors."""
        return cls(
            n_orbitals=n_orbitals,
            electrons=electrons,
            singles_up=_ordered_pairs(n_orbitals),
            singles_down=_ordered_pairs(n_orbitals),
            doubles_mixed=_mixed_quads(n_orbitals),
            doubles_up=_ordered_quads(n_orbitals),
            doubles_down=_ordered_quads(n_orbitals),
            lock_spin_sectors=lock_spin_sectors,
        )

    @property
    def n_parameters(self) -> int:
        independent = len(self.singles_up) + len(self.doubles_mixed) + len(
            self.doubles_up
        )
        if self.lock_spin_sectors:
            return independent
        return independent + len(self.singles_down) + len(self.doubles_down)


def _generator(term: FermionicTerm, n_modes: int) -> ComplexPauliSum:
    """Anti-Hermitian image of term minus its adjoint."""
    image = jordan_wigner(term, n_modes)
    return image - image.dagger()


def _rotation_gates(
    generator: ComplexPauliSum, theta_index: int
) -> list[Gate]:
    """One compiled rotation per Pauli term of exp(theta * generator).

    The terms of a single excitation generator commute, so the exponential
    factorizes exactly; each purely imaginary weight i*v becomes an RZ
    angle of -2*v*theta.
    """
    gates: list[Gate] = []
    for label, weight in generator.items():
        if abs(weight.real) > 1e-12:
            raise InternalCheckError(
                f"generator term {label} has real weight {weight.real:.3e}"
            )
        gates.extend(
            compile_pauli_rotation(
                parse_pauli(label), theta_index, scale=-2.0 * weight.imag
            )
        )
    return gates


def build_ucc_spin_symmetric(spec: UCCSDSpec) -> tuple[QuantumCircuit, str]:
    """Circuit and reference occupation for the spin-symmetric ansatz.

    Blocks appear in the order: up singles, down singles, mixed doubles,
    up doubles, down doubles; tuples inside each block in ascending
    lexicographic order.  The reference state fills the lowest `electrons`
    orbitals of each sector.
    """
    n = spec.n_orbitals
    modes = 2 * n
    gates: list[Gate] = []
    next_param = 0
    up_single_slot: dict[tuple[int, int], int] = {}
    up_double_slot: dict[tuple[int, int, int, int], int] = {}

    def allocate(key, shared: dict | None) -> int:
        nonlocal next_param
        if shared is not None and key in shared:
            return shared[key]
        slot = next_param
        next_param += 1
        return slot

    for i, j in sorted(spec.singles_up):
        slot = allocate((i, j), None)
        up_single_slot[(i, j)] = slot
        term = FermionicTerm(factors=((i, True), (j, False)))
        gates.extend(_rotation_gates(_generator(term, modes), slot))
    for i, j in sorted(spec.singles_down):
        shared = up_single_slot if spec.lock_spin_sectors else None
        slot = allocate((i, j), shared)
        term = FermionicTerm(factors=((n + i, True), (n + j, False)))
        gates.extend(_rotation_gates(_generator(term, modes), slot))
    for i, j, k, l in sorted(spec.doubles_mixed):
        slot = allocate((i, j, k, l), None)
        term = FermionicTerm(
            factors=((i, True), (n + j, True), (n + k, False), (l, False))
        )
        gates.extend(_rotation_gates(_generator(term, modes), slot))
    for i, j, k, l in sorted(spec.doubles_up):
        slot = allocate((i, j, k, l), None)
        up_double_slot[(i, j, k, l)] = slot
        term = FermionicTerm(
            factors=((i, True), (j, True), (k, False), (l, False))
        )
        gates.extend(_rotation_gates(_generator(term, modes), slot))
    for i, j, k, l in sorted(spec.doubles_down):
        shared = up_double_slot if spec.lock_spin_sectors else None
        slot = allocate((i, j, k, l), shared)
        term = FermionicTerm(
            factors=((n + i, True), (n + j, True), (n + k, False), (n + l, False))
        )
        gates.extend(_rotation_gates(_generator(term, modes), slot))

    if next_param != spec.n_parameters:
        raise InternalCheckError(
            f"allocated {next_param} parameters, spec promises "
            f"{spec.n_parameters}"
        )
    circuit = QuantumCircuit(
        n_qubits=modes, gates=tuple(gates), n_parameters=spec.n_parameters
    )
    occupied = "1" * spec.electrons + "0" * (n - spec.electrons)
    return circuit, occupied + occupied

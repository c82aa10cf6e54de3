"""Stabilizer codes as Hamiltonian sources.

A code is a commuting set of signed Pauli generators; its Hamiltonian is
minus the signed sum, so each fully constrained code has a unique ground
state at energy -n_qubits.  Signs cover codes produced by conjugating a
reference code with Clifford circuits, which can negate generators.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .pauli import PauliString, PauliSum, parse_pauli, to_dense


def _symplectic_rows(generators: tuple[PauliString, ...]) -> np.ndarray:
    """X|Z binary representation, one row per generator."""
    n = generators[0].n_qubits
    rows = np.zeros((len(generators), 2 * n), dtype=np.uint8)
    for r, g in enumerate(generators):
        for q, ch in enumerate(g.letters):
            if ch in ("X", "Y"):
                rows[r, q] = 1
            if ch in ("Z", "Y"):
                rows[r, n + q] = 1
    return rows


def _gf2_rank(rows: np.ndarray) -> int:
    m = rows.copy()
    rank = 0
    n_rows, n_cols = m.shape
    for col in range(n_cols):
        pivot = None
        for r in range(rank, n_rows):
            if m[r, col]:
                pivot = r
                break
        if pivot is None:
            continue
        m[[rank, pivot]] = m[[pivot, rank]]
        for r in range(n_rows):
            if r != rank and m[r, col]:
                m[r] ^= m[rank]
        rank += 1
        if rank == n_rows:
            break
    return rank


@dataclass(frozen=True)
class StabilizerCode:
    """Commuting signed Pauli generators on a fixed register."""

    n_qubits: int
    generators: tuple[PauliString, ...]
    signs: tuple[int, ...] = field(default=())

    def __post_init__(self) -> None:
        generators = tuple(self.generators)
        if not generators:
            raise DomainError("a code needs at least one generator")
        for g in generators:
            if g.n_qubits != self.n_qubits:
                raise DomainError(
                    f"generator {g.letters!r} does not act on "
                    f"{self.n_qubits} qubits"
                )
            if not g.support():
                raise DomainError("the identity cannot be a generator")
        signs = tuple(self.signs) if self.signs else (1,) * len(generators)
        if len(signs) != len(generators):
            raise DomainError("need one sign per generator")
        if any(s not in (-1, 1) for s in signs):
            raise DomainError("signs must be +1 or -1")
        for a in range(len(generators)):
            for b in range(a + 1, len(generators)):
                if not generators[a].commutes_with(generators[b]):
                    raise DomainError(
                        f"generators {generators[a].letters!r} and "
                        f"{generators[b].letters!r} anticommute"
                    )
        object.__setattr__(self, "generators", generators)
        object.__setattr__(self, "signs", signs)

    @property
    def independent(self) -> bool:
        rows = _symplectic_rows(self.generators)
        return _gf2_rank(rows) == len(self.generators)

    @property
    def unique_ground_state(self) -> bool:
        """Fully constrained codes pin down a single state."""
        return len(self.generators) == self.n_qubits and self.independent


def build_stabilizer_hamiltonian(code: StabilizerCode) -> PauliSum:
    """Minus the signed generator sum; ground energy -n when complete."""
    return PauliSum(
        [(-float(s), g) for s, g in zip(code.signs, code.generators)],
        n_qubits=code.n_qubits,
    )


def dense_ground_state(
    h: PauliSum, dense_limit: int = 12
) -> tuple[float, np.ndarray, float]:
    """Lowest eigenpair and spectral gap by dense diagonalization."""
    w, v = np.linalg.eigh(to_dense(h, dense_limit))
    return float(w[0]), v[:, 0], float(w[1] - w[0])


def permute_pauli_sum(h: PauliSum, perm: tuple[int, ...]) -> PauliSum:
    """Relabel qubits: the letter on qubit q moves to qubit perm[q]."""
    n = h.n_qubits
    if sorted(perm) != list(range(n)):
        raise DomainError(f"{perm} is not a permutation of 0..{n - 1}")
    terms = []
    for coeff, p in h.terms:
        letters = ["I"] * n
        for q, ch in enumerate(p.letters):
            letters[perm[q]] = ch
        terms.append((coeff, "".join(letters)))
    return PauliSum(terms, n_qubits=n)


def permute_state(vec: np.ndarray, perm: tuple[int, ...]) -> np.ndarray:
    """Reorder a state vector so amplitude bits follow the qubit move q -> perm[q]."""
    vec = np.asarray(vec, dtype=np.complex128).reshape(-1)
    n = vec.shape[0].bit_length() - 1
    if 1 << n != vec.shape[0]:
        raise DomainError("state length is not a power of two")
    if sorted(perm) != list(range(n)):
        raise DomainError(f"{perm} is not a permutation of 0..{n - 1}")
    t = vec.reshape((2,) * n)
    axes = [0] * n
    for q in range(n):
        axes[perm[q]] = q
    return np.ascontiguousarray(t.transpose(axes)).reshape(-1)


def save_stabilizer(code: StabilizerCode, path: str) -> None:
    payload = {
        "n_qubits": code.n_qubits,
        "generators": [
            {"letters": g.letters, "sign": s}
            for g, s in zip(code.generators, code.signs)
        ],
    }
    with open(path, "w", encoding="utf-8") as stream:
        json.dump(payload, stream, indent=2)
        stream.write("\n")


def load_stabilizer(path: str) -> StabilizerCode:
    try:
        with open(path, "r", encoding="utf-8") as stream:
            payload = json.load(stream)
    except FileNotFoundError:
        raise DomainError(f"stabilizer file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise DomainError(f"invalid JSON in {path}: {exc}") from exc
    try:
        n = int(payload["n_qubits"])
        entries = payload["generators"]
        generators = tuple(parse_pauli(e["letters"], n) for e in entries)
        signs = tuple(int(e.get("sign", 1)) for e in entries)
    except (KeyError, TypeError) as exc:
        raise DomainError(f"malformed stabilizer file {path}: {exc}") from exc
    return StabilizerCode(n_qubits=n, generators=generators, signs=signs)

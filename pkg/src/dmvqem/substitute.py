"""Index-permutation transform from observables to measurable unitaries.

A Hermitian Pauli sum on 2n qubits (n row qubits then n column qubits)
transforms term by term into a sum of unitary operators on two n-qubit
copies via the entry permutation

    <i l| Q |j k> = <i j| P |k l>,

which preserves tensor structure: the pair (letter j of the row half,
letter j of the column half) maps to a fixed 4x4 unitary block coupling
qubit j of copy 1 with qubit j of copy 2. Each block is normal with
spectrum inside {1, -1, i, -i}, so a single 2-qubit basis rotation per
block diagonalizes the whole term for measurement.

Two register layouts appear:
  halves      [copy1_0 .. copy1_{n-1}, copy2_0 .. copy2_{n-1}]
  interleaved [copy1_0, copy2_0, copy1_1, copy2_1, ...]
Blocks act on contiguous pairs in the interleaved layout; the fixed
permutation between layouts is owned by this module.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache, reduce
from typing import Sequence

import numpy as np

from .circuits import Gate
from .errors import DomainError, InternalCheckError
from .pauli import DENSE_LIMIT_DEFAULT, PauliString, PauliSum, to_dense
from .twoqubit import synthesize_two_qubit

# unit-modulus spectrum of every substitute block, in angle order
EIGENVALUE_CHOICES = (1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j)


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr, dtype=np.complex128)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class SubstituteBlock:
    """One 4x4 unitary block with its spectrum and diagonalizing rotation.

    diagonalizer V satisfies V matrix V^dag = diag(eigenvalues), entries
    matched in order.
    """

    source_pair: PauliString
    matrix: np.ndarray
    eigenvalues: tuple[complex, ...]
    diagonalizer: np.ndarray


@dataclass(frozen=True, eq=False)
class SubstituteOperator:
    """Tensor product of per-pair blocks for one transformed Pauli term."""

    blocks: tuple[SubstituteBlock, ...]

    @property
    def n(self) -> int:
        return len(self.blocks)

    def dense_interleaved(self) -> np.ndarray:
        return reduce(np.kron, (b.matrix for b in self.blocks))

    def dense_halves(self) -> np.ndarray:
        return permute_qubits(
            self.dense_interleaved(), interleaved_to_halves_sources(self.n)
        )

    def eigenvalue_vector(self) -> np.ndarray:
        """Per-outcome product of block eigenvalues, interleaved layout."""
        vecs = (np.asarray(b.eigenvalues, dtype=np.complex128) for b in self.blocks)
        return reduce(np.kron, vecs)


@dataclass(frozen=True, eq=False)
class SubstituteSum:
    """The transformed Hamiltonian: weighted substitute operators."""

    n: int
    terms: tuple[tuple[float, SubstituteOperator], ...]
    source: PauliSum

    def dense_halves(self) -> np.ndarray:
        dim = 1 << (2 * self.n)
        out = np.zeros((dim, dim), dtype=np.complex128)
        for coeff, op in self.terms:
            out += coeff * op.dense_halves()
        return out


@dataclass(frozen=True)
class SwapObservable:
    """Tensor product of per-pair two-qubit swaps; measures Tr(rho sigma)."""

    n: int

    def operator(self) -> SubstituteOperator:
        return substitute_operator(PauliString("I" * (2 * self.n)))

    def dense_halves(self) -> np.ndarray:
        return self.operator().dense_halves()


# ---------------------------------------------------------------------------
# layout permutations
# ---------------------------------------------------------------------------


def permute_qubits(mat: np.ndarray, sources: Sequence[int]) -> np.ndarray:
    """Reorder register qubits: output qubit t is input qubit sources[t]."""
    m = len(sources)
    if sorted(sources) != list(range(m)):
        raise DomainError(f"sources {list(sources)} is not a permutation")
    if mat.shape != (1 << m, 1 << m):
        raise DomainError(
            f"matrix shape {mat.shape} does not match {m} qubits"
        )
    t = mat.reshape((2,) * (2 * m))
    axes = list(sources) + [m + s for s in sources]
    return np.ascontiguousarray(t.transpose(axes)).reshape(1 << m, 1 << m)


def halves_to_interleaved_sources(n: int) -> list[int]:
    """Permutation taking a halves-layout register to interleaved layout."""
    out = [0] * (2 * n)
    for j in range(n):
        out[2 * j] = j
        out[2 * j + 1] = n + j
    return out


def interleaved_to_halves_sources(n: int) -> list[int]:
    """Permutation taking an interleaved-layout register to halves layout."""
    out = [0] * (2 * n)
    for j in range(n):
        out[j] = 2 * j
        out[n + j] = 2 * j + 1
    return out


# ---------------------------------------------------------------------------
# block construction
# ---------------------------------------------------------------------------


def _canonical_eigensystem(
    q: np.ndarray,
) -> tuple[tuple[complex, ...], np.ndarray]:
    """Deterministic eigensystem of a normal unitary with spectrum in
    {1, -1, i, -i}.

    Within each eigenspace the basis is fixed by projecting the standard
    basis vectors in index order and orthonormalizing, so the result does
    not depend on which arbitrary basis the backing eigensolver picked.
    Returns (eigenvalues sorted by angle in [0, 2pi), diagonalizer V).
    """
    herm = 0.5 * (q + q.conj().T)
    skew = (q - q.conj().T) / 2.0j
    # Re + sqrt(2) Im separates all four admissible eigenvalues
    _, raw_vecs = np.linalg.eigh(herm + np.sqrt(2.0) * skew)
    snapped: list[complex] = []
    for k in range(4):
        v = raw_vecs[:, k]
        lam = complex(v.conj() @ q @ v)
        best = min(EIGENVALUE_CHOICES, key=lambda c: abs(lam - c))
        if abs(lam - best) > 1e-9:
            raise InternalCheckError(
                f"eigenvalue {lam} is not close to any of {EIGENVALUE_CHOICES}"
            )
        if np.linalg.norm(q @ v - best * v) > 1e-9:
            raise InternalCheckError("eigenvector residual above tolerance")
        snapped.append(best)
    eigenvalues: list[complex] = []
    columns: list[np.ndarray] = []
    for lam in EIGENVALUE_CHOICES:
        members = [raw_vecs[:, k] for k in range(4) if snapped[k] == lam]
        if not members:
            continue
        proj = np.zeros((4, 4), dtype=np.complex128)
        for v in members:
            proj += np.outer(v, v.conj())
        basis: list[np.ndarray] = []
        for e_idx in range(4):
            if len(basis) == len(members):
                break
            w = proj[:, e_idx].copy()
            for u in basis:
                w -= (u.conj() @ w) * u
            nrm = float(np.linalg.norm(w))
            if nrm < 1e-6:
                continue
            w /= nrm
            w *= _phase_fix(w)
            basis.append(w)
        if len(basis) != len(members):
            raise InternalCheckError(
                f"could not canonicalize a {len(members)}-dim eigenspace"
            )
        eigenvalues.extend([lam] * len(members))
        columns.extend(basis)
    w_mat = np.stack(columns, axis=1)
    v_mat = w_mat.conj().T
    diag = v_mat @ q @ v_mat.conj().T
    target = np.diag(np.asarray(eigenvalues, dtype=np.complex128))
    resid = float(np.abs(diag - target).max())
    if resid > 1e-10:
        raise InternalCheckError(f"diagonalization residual {resid:.3e}")
    return tuple(eigenvalues), v_mat


def _phase_fix(w: np.ndarray) -> complex:
    """Phase making the earliest near-maximal component real positive."""
    mags = np.abs(w)
    peak = float(mags.max())
    idx = int(np.argmax(mags >= peak - 1e-9))
    return complex(np.conj(w[idx]) / mags[idx])


@lru_cache(maxsize=None)
@lru_cache(maxsize=None)
def substitute_block(pair: PauliString) -> SubstituteBlock:
    """Transform one (row letter, column letter) pair into its 4x4 block."""
    if pair.n_qubits != 2:
        raise DomainError(
            f"substitute blocks take 2-qubit pairs, got {pair.n_qubits}"
        )
    p4 = to_dense(pair).reshape(2, 2, 2, 2)
    q = np.ascontiguousarray(p4.transpose(0, 3, 1, 2)).reshape(4, 4)
    unitarity = float(np.abs(q @ q.conj().T - np.eye(4)).max())
    if unitarity > 1e-12:
        raise InternalCheckError(f"block not unitary, residual {unitarity:.3e}")
    eigenvalues, diagonalizer = _canonical_eigensystem(q)
    return SubstituteBlock(
        source_pair=pair,
        matrix=_freeze(q),
        eigenvalues=eigenvalues,
        diagonalizer=_freeze(diagonalizer),
    )


@lru_cache(maxsize=1)
def block_table() -> dict[str, SubstituteBlock]:
    """All 16 blocks keyed by their two-letter source pair.

    Built once and shared read-only; callers must not mutate the dict.
    """
    return {
        a + b: substitute_block(PauliString(a + b))
        for a in "IXYZ"
        for b in "IXYZ"
    }


def substitute_operator(p: PauliString) -> SubstituteOperator:
    """Transform a 2n-qubit Pauli string under the pairing (j, n+j)."""
    if p.n_qubits % 2 != 0:
        raise DomainError(
            f"substitute transform needs an even qubit count, got {p.n_qubits}"
        )
    n = p.n_qubits // 2
    blocks = tuple(
        substitute_block(PauliString(p.letters[j] + p.letters[n + j]))
        for j in range(n)
    )
    return SubstituteOperator(blocks=blocks)


def transform_hamiltonian(h: PauliSum) -> SubstituteSum:
    """Term-by-term substitute transform; coefficients pass through."""
    if h.n_qubits % 2 != 0:
        raise DomainError(
            f"substitute transform needs an even qubit count, got {h.n_qubits}"
        )
    n = h.n_qubits // 2
    terms = tuple((coeff, substitute_operator(s)) for coeff, s in h)
    return SubstituteSum(n=n, terms=terms, source=h)


def swap_observable(n: int) -> SwapObservable:
    if n < 1:
        raise DomainError(f"swap observable needs n >= 1, got {n}")
    return SwapObservable(n=n)


@lru_cache(maxsize=8)
def dense_substitute_halves(
    h: PauliSum, dense_limit: int = DENSE_LIMIT_DEFAULT
) -> np.ndarray:
    """Dense transformed Hamiltonian in the halves layout, memoized."""
    if h.n_qubits > dense_limit:
        raise DomainError(
            f"dense transform needs {h.n_qubits} qubits, above limit "
            f"{dense_limit}"
        )
    return _freeze(transform_hamiltonian(h).dense_halves())


# ---------------------------------------------------------------------------
# measurement rotations and the CLI dump format
# ---------------------------------------------------------------------------


def rotation_circuit(block: SubstituteBlock) -> list[Gate]:
    """Gates realizing the block's diagonalizer (up to global phase)."""
    return synthesize_two_qubit(block.diagonalizer, qubits=(0, 1))


def _complex_pair(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def dump_transform(h: PauliSum) -> dict:
    """JSON-ready description of the transformed Hamiltonian: per-term
    blocks, eigenvalue sequences, and rotation gate lists."""
    ssum = transform_hamiltonian(h)
    terms = []
    for coeff, op in ssum.terms:
        blocks = []
        for b in op.blocks:
            blocks.append(
                {
                    "pair": b.source_pair.letters,
                    "eigenvalues": [_complex_pair(ev) for ev in b.eigenvalues],
                    "rotations": [
                        {
                            "gate": g.kind,
                            "qubits": list(g.qubits),
                            "angle": float(g.angle),
                        }
                        for g in rotation_circuit(b)
                    ],
                }
            )
        terms.append({"coeff": float(coeff), "blocks": blocks})
    return {"qubits_per_copy": ssum.n, "terms": terms}

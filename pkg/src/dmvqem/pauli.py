"""Pauli-string algebra, weighted Pauli sums, and matrix norms.

Convention used package-wide: the leftmost letter of a Pauli label acts on
qubit 0, which is the most significant bit of the computational-basis index.
Dense matrices are therefore Kronecker products taken left to right.

Pauli sums carry real coefficients only (they represent Hermitian operators);
terms with identical labels are merged at construction and exact zeros are
dropped. Both PauliString and PauliSum are immutable and hashable so dense
forms can be memoized downstream.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Iterator, Union

import numpy as np

from .errors import CapacityError, DomainError, PauliParseError

DENSE_LIMIT_DEFAULT = 12

PAULI_LETTERS = "IXYZ"

_SINGLE_QUBIT = {
    "I": np.eye(2, dtype=np.complex128),
    "X": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128),
    "Y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=np.complex128),
    "Z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=np.complex128),
}


@dataclass(frozen=True)
class PauliString:
    """A phase-free tensor product of single-qubit Pauli operators."""

    letters: str

    def __post_init__(self) -> None:
        if not self.letters:
            raise PauliParseError("empty Pauli label", position=0)
        for pos, ch in enumerate(self.letters):
            if ch not in PAULI_LETTERS:
                raise PauliParseError(
                    f"invalid Pauli letter {ch!r} at position {pos} in {self.letters!r}",
                    position=pos,
                )

    @property
    def n_qubits(self) -> int:
        return len(self.letters)

    @property
    def weight(self) -> int:
        """Number of non-identity letters."""
        return sum(1 for ch in self.letters if ch != "I")

    @property
    def is_identity(self) -> bool:
        return self.weight == 0

    def letter(self, qubit: int) -> str:
        return self.letters[qubit]

    def support(self) -> tuple[int, ...]:
        """Qubit indices carrying a non-identity letter, ascending."""
        return tuple(q for q, ch in enumerate(self.letters) if ch != "I")

    def commutes_with(self, other: "PauliString") -> bool:
        """True when the two strings commute as operators.

        Two Pauli strings commute iff they anticommute on an even number of
        qubit positions, i.e. positions where both letters are non-identity
        and differ.
        """
        if other.n_qubits != self.n_qubits:
            raise DomainError(
                f"qubit count mismatch: {self.n_qubits} vs {other.n_qubits}"
            )
        clashes = sum(
            1
            for a, b in zip(self.letters, other.letters)
            if a != "I" and b != "I" and a != b
        )
        return clashes % 2 == 0

    def __str__(self) -> str:
        return self.letters


def parse_pauli(text: str, n_qubits: int | None = None) -> PauliString:
    """Parse a label over {I, X, Y, Z} into a PauliString.

    When n_qubits is given the label length must match it exactly; a length
    or character mismatch raises PauliParseError carrying the offending
    position.
    """
    if not isinstance(text, str):
        raise PauliParseError(f"Pauli label must be a string, got {type(text).__name__}", position=0)
    if n_qubits is not None:
        if n_qubits < 1:
            raise DomainError(f"n_qubits must be positive, got {n_qubits}")
        if len(text) != n_qubits:
            raise PauliParseError(
                f"label {text!r} has length {len(text)}, expected {n_qubits}",
                position=min(len(text), n_qubits),
            )
    return PauliString(text)


def _dense_string(p: PauliString) -> np.ndarray:
    return reduce(np.kron, (_SINGLE_QUBIT[ch] for ch in p.letters))


class PauliSum:
    """A real-weighted sum of Pauli strings on a fixed qubit count.

    Terms are merged by exact label equality at construction; coefficients
    that cancel to exactly zero are dropped. Instances are immutable and
    hashable, with terms held in sorted label order for a canonical form.
    """

    __slots__ = ("_n_qubits", "_terms")

    def __init__(
        self,
        terms: Iterable[tuple[float, Union[PauliString, str]]],
        n_qubits: int | None = None,
    ) -> None:
        merged: dict[str, float] = {}
        n_seen = n_qubits
        for coeff, string in terms:
            if isinstance(string, str):
                string = parse_pauli(string, n_seen)
            if n_seen is None:
                n_seen = string.n_qubits
            elif string.n_qubits != n_seen:
                raise DomainError(
                    f"term {string.letters!r} has {string.n_qubits} qubits, "
                    f"expected {n_seen}"
                )
            coeff = _require_real(coeff)
            merged[string.letters] = merged.get(string.letters, 0.0) + coeff
        if n_seen is None:
            raise DomainError("cannot infer qubit count of an empty Pauli sum")
        object.__setattr__(self, "_n_qubits", n_seen)
        object.__setattr__(
            self,
            "_terms",
            tuple(
                (coeff, PauliString(label))
                for label, coeff in sorted(merged.items())
                if coeff != 0.0
            ),
        )

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("PauliSum is immutable")

    @property
    def n_qubits(self) -> int:
        return self._n_qubits

    @property
    def terms(self) -> tuple[tuple[float, PauliString], ...]:
        return self._terms

    @property
    def m(self) -> int:
        """Number of distinct terms after merging."""
        return len(self._terms)

    def coefficients(self) -> np.ndarray:
        return np.array([c for c, _ in self._terms], dtype=np.float64)

    def __iter__(self) -> Iterator[tuple[float, PauliString]]:
        return iter(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PauliSum):
            return NotImplemented
        return self._n_qubits == other._n_qubits and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self._n_qubits, self._terms))

    def __add__(self, other: "PauliSum") -> "PauliSum":
        if not isinstance(other, PauliSum):
            return NotImplemented
        if other.n_qubits != self.n_qubits:
            raise DomainError(
                f"qubit count mismatch: {self.n_qubits} vs {other.n_qubits}"
            )
        return PauliSum(list(self._terms_as_pairs()) + list(other._terms_as_pairs()),
                        n_qubits=self.n_qubits)

    def __mul__(self, scalar: float) -> "PauliSum":
        scalar = _require_real(scalar)
        return PauliSum(
            [(scalar * c, s) for c, s in self._terms], n_qubits=self.n_qubits
        )

    __rmul__ = __mul__

    def __neg__(self) -> "PauliSum":
        return self * -1.0

    def __sub__(self, other: "PauliSum") -> "PauliSum":
        return self + (-other)

    def _terms_as_pairs(self) -> Iterator[tuple[float, PauliString]]:
        return iter(self._terms)

    def __repr__(self) -> str:
        body = " + ".join(f"{c:+g}*{s.letters}" for c, s in self._terms) or "0"
        return f"PauliSum({self._n_qubits} qubits: {body})"


def _require_real(value: object) -> float:
    if isinstance(value, bool):
        raise DomainError(f"coefficient must be a real number, got {value!r}")
    if isinstance(value, complex):
        if value.imag != 0.0:
            raise DomainError(f"coefficient must be real, got {value!r}")
        return float(value.real)
    if isinstance(value, (int, float, np.integer, np.floating)):
        return float(value)
    if isinstance(value, np.complexfloating):
        if value.imag != 0.0:
            raise DomainError(f"coefficient must be real, got {value!r}")
        return float(value.real)
    raise DomainError(f"coefficient must be a real number, got {type(value).__name__}")


def to_dense(
    op: Union[PauliString, PauliSum], dense_limit: int = DENSE_LIMIT_DEFAULT
) -> np.ndarray:
    """Dense 2^n x 2^n complex matrix of a Pauli string or sum.

    Refuses registers above dense_limit qubits to keep memory bounded.
    """
    if op.n_qubits > dense_limit:
        raise CapacityError(
            f"dense form needs {op.n_qubits} qubits, above the dense limit "
            f"{dense_limit}"
        )
    if isinstance(op, PauliString):
        return _dense_string(op)
    if isinstance(op, PauliSum):
        dim = 1 << op.n_qubits
        out = np.zeros((dim, dim), dtype=np.complex128)
        for coeff, string in op:
            out += coeff * _dense_string(string)
        return out
    raise DomainError(f"cannot densify {type(op).__name__}")


@dataclass(frozen=True)
class NormReport:
    """Matrix norms of a Pauli sum used by the sampling/trainability bounds.

    frobenius_sq_over_dim is Tr(H^2)/2^n = sum of squared coefficients
    (exact thanks to Pauli trace-orthogonality). spectral is the exact
    operator norm when a dense eigensolve fits under the dense limit;
    otherwise it is the coefficient 1-norm upper bound and spectral_is_bound
    is set. l11 is the plain coefficient 1-norm; callers needing the
    dimension-scaled variant multiply by 2^n themselves.
    """

    frobenius_sq_over_dim: float
    spectral: float
    l11: float
    spectral_is_bound: bool


def norms(h: PauliSum, dense_limit: int = DENSE_LIMIT_DEFAULT) -> NormReport:
    """Compute (Tr(H^2)/2^n, operator norm, coefficient 1-norm) of a sum."""
    if len(h) == 0:
        raise DomainError("norms of an empty Pauli sum are undefined")
    coeffs = h.coefficients()
    frob = float(np.sum(coeffs**2))
    l11 = float(np.sum(np.abs(coeffs)))
    if h.n_qubits <= dense_limit:
        eigs = np.linalg.eigvalsh(to_dense(h, dense_limit))
        return NormReport(frob, float(np.max(np.abs(eigs))), l11, False)
    return NormReport(frob, l11, l11, True)


# ---------------------------------------------------------------------------
# Hamiltonian file format
# ---------------------------------------------------------------------------


def hamiltonian_from_dict(doc: object) -> PauliSum:
    """Validate and build a PauliSum from the project JSON document form.

    The document must be exactly {"n_qubits": int, "terms": [{"pauli": str,
    "coeff": real}, ...]}; unknown keys anywhere are rejected.
    """
    if not isinstance(doc, dict):
        raise DomainError("Hamiltonian document must be a JSON object")
    unknown = set(doc) - {"n_qubits", "terms"}
    if unknown:
        raise DomainError(
            f"unknown Hamiltonian keys: {sorted(unknown)}"
        )
    if "n_qubits" not in doc or "terms" not in doc:
        missing = sorted({"n_qubits", "terms"} - set(doc))
        raise DomainError(f"missing Hamiltonian keys: {missing}")
    n = doc["n_qubits"]
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise DomainError(f"n_qubits must be a positive integer, got {n!r}")
    raw_terms = doc["terms"]
    if not isinstance(raw_terms, list) or not raw_terms:
        raise DomainError("terms must be a nonempty list")
    pairs: list[tuple[float, PauliString]] = []
    for idx, entry in enumerate(raw_terms):
        if not isinstance(entry, dict):
            raise DomainError(f"terms[{idx}] must be an object")
        extra = set(entry) - {"pauli", "coeff"}
        if extra:
            raise DomainError(f"terms[{idx}] has unknown keys: {sorted(extra)}")
        if "pauli" not in entry or "coeff" not in entry:
            missing = sorted({"pauli", "coeff"} - set(entry))
            raise DomainError(f"terms[{idx}] missing keys: {missing}")
        coeff = entry["coeff"]
        if isinstance(coeff, bool) or not isinstance(coeff, (int, float)):
            raise DomainError(f"terms[{idx}].coeff must be a real number")
        pairs.append((float(coeff), parse_pauli(entry["pauli"], n)))
    return PauliSum(pairs, n_qubits=n)


def hamiltonian_to_dict(h: PauliSum) -> dict:
    return {
        "n_qubits": h.n_qubits,
        "terms": [{"pauli": s.letters, "coeff": c} for c, s in h],
    }


def load_hamiltonian(path: str) -> PauliSum:
    """Load a PauliSum from a strict JSON Hamiltonian file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise DomainError(f"invalid JSON in {path}: {exc}") from exc
    except FileNotFoundError:
        raise DomainError(f"Hamiltonian file not found: {path}") from None
    return hamiltonian_from_dict(doc)


def save_hamiltonian(h: PauliSum, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(hamiltonian_to_dict(h), fh, indent=2, sort_keys=True)
        fh.write("\n")

"""Density-matrix vectorization: encode mixed states as pure states.

A density matrix rho on n qubits becomes the 2n-qubit pure state whose
amplitude on |i>|j> is rho_ij / sqrt(Tr(rho^2)).  The first n qubits carry
the row index, the last n the column index.  An ensemble of K matrices with
complex weights c_i encodes the normalized linear combination of the per-
matrix vectorizations; expectation values of an observable h on the encoded
state reduce to ratios of two-copy traces, which is what the shot estimator
measures.  This module provides the exact dense reference for those ratios,
the inverse construction (any pure state as a K=4 ensemble), and Schmidt-
spectrum entropy diagnostics.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .circuits import DensityMatrix, purity
from .errors import DegenerateEnsembleError, DomainError, InternalCheckError
from .pauli import PauliSum, to_dense
from .substitute import dense_substitute_halves

# Ensembles whose combination norm falls below this fraction of the total
# coefficient weight are treated as destructively cancelled.
DEGENERACY_THRESHOLD = 1e-12

_SCHMIDT_WEIGHT_FLOOR = 1e-15


@dataclass(frozen=True)
class DMVEnsemble:
    """K density matrices and complex weights defining one encoded state."""

    rhos: tuple[DensityMatrix, ...]
    coeffs: tuple[complex, ...]

    def __post_init__(self) -> None:
        if len(self.rhos) == 0:
            raise DomainError("ensemble needs at least one density matrix")
        if len(self.rhos) != len(self.coeffs):
            raise DomainError(
                f"{len(self.rhos)} matrices but {len(self.coeffs)} coefficients"
            )
        ns = {rho.n_qubits for rho in self.rhos}
        if len(ns) != 1:
            raise DomainError(f"mixed qubit counts in ensemble: {sorted(ns)}")
        object.__setattr__(self, "rhos", tuple(self.rhos))
        object.__setattr__(
            self, "coeffs", tuple(complex(c) for c in self.coeffs)
        )

    @property
    def k(self) -> int:
        return len(self.rhos)

    @property
    def n_qubits(self) -> int:
        return self.rhos[0].n_qubits


class DMVPureState:
    """Unit vector on 2n qubits in the row/column index convention."""

    __slots__ = ("n_qubits", "amplitudes")

    def __init__(self, amplitudes: np.ndarray, validate: bool = True) -> None:
        amplitudes = np.asarray(amplitudes, dtype=np.complex128)
        if amplitudes.ndim != 1:
            raise DomainError("amplitudes must be a flat vector")
        dim = amplitudes.shape[0]
        m = dim.bit_length() - 1
        if 1 << m != dim or m % 2 != 0:
            raise DomainError(
                f"amplitude length {dim} is not 4^n for integer n"
            )
        if validate:
            nrm = float(np.linalg.norm(amplitudes))
            if abs(nrm - 1.0) > 1e-12:
                raise DomainError(f"state norm {nrm} differs from 1")
        amplitudes = amplitudes.copy()
        amplitudes.flags.writeable = False
        object.__setattr__(self, "n_qubits", m // 2)
        object.__setattr__(self, "amplitudes", amplitudes)

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("DMVPureState is immutable")

    def as_matrix(self) -> np.ndarray:
        """Amplitudes reshaped to (row index, column index)."""
        d = 1 << self.n_qubits
        return self.amplitudes.reshape(d, d)

    def schmidt_weights(self) -> np.ndarray:
        """Squared Schmidt coefficients across the row/column split."""
        s = np.linalg.svd(self.as_matrix(), compute_uv=False)
        w = s * s
        return w / w.sum()


def vectorize(rho: DensityMatrix) -> DMVPureState:
    """Encode one density matrix; amplitudes are rho_ij / sqrt(purity)."""
    c = float(np.sqrt(purity(rho)))
    if c < 1e-12:
        raise DomainError("cannot vectorize a numerically zero matrix")
    return DMVPureState(rho.data.reshape(-1) / c, validate=False)


def _raw_vectors(e: DMVEnsemble) -> np.ndarray:
    """Rows: flattened raw matrix entries of each ensemble member."""
    return np.stack([rho.data.reshape(-1) for rho in e.rhos])


def combination_norm(e: DMVEnsemble) -> float:
    """Norm of the weighted sum of raw matrix entries before rescaling."""
    total = np.asarray(e.coeffs, dtype=np.complex128) @ _raw_vectors(e)
    return float(np.linalg.norm(total))


def assemble(e: DMVEnsemble) -> DMVPureState:
    """Normalized weighted combination of the raw member matrices.

    Weights multiply matrix entries directly, so a member's own Frobenius
    norm stays part of its effective weight in the combination.
    """
    vecs = _raw_vectors(e)
    coeffs = np.asarray(e.coeffs, dtype=np.complex128)
    total = coeffs @ vecs
    norm = float(np.linalg.norm(total))
    scale = float(np.abs(coeffs) @ np.linalg.norm(vecs, axis=1))
    if scale == 0.0 or norm < DEGENERACY_THRESHOLD * scale:
        raise DegenerateEnsembleError(
            f"combination norm {norm:.3e} below {DEGENERACY_THRESHOLD} of "
            f"total weight {scale:.3e}"
        )
    return DMVPureState(total / norm, validate=False)


def _pairwise_overlaps(e: DMVEnsemble) -> np.ndarray:
    """Gram matrix of unnormalized member traces Tr(rho_k rho_l)."""
    mats = np.stack([rho.data for rho in e.rhos])
    flat = mats.reshape(e.k, -1)
    return flat.conj() @ flat.T


def _two_copy_trace(hb4: np.ndarray, rho_i: np.ndarray, rho_j: np.ndarray) -> complex:
    """Two-copy trace of the transformed observable, Kronecker-free."""
    return complex(np.einsum("iljk,ji,kl->", hb4, rho_i, rho_j, optimize=True))


@functools.lru_cache(maxsize=8)
def _dense_routes(h: PauliSum, dense_limit: int) -> tuple[np.ndarray, np.ndarray]:
    """Dense observable and its transformed two-copy form, both frozen.

    Built once per observable: optimization loops evaluate the same h
    thousands of times and the dense construction dwarfs the per-state
    contraction work.
    """
    ha = to_dense(h, dense_limit=dense_limit)
    d = 1 << (h.n_qubits // 2)
    hb4 = dense_substitute_halves(h, dense_limit=dense_limit).reshape(d, d, d, d)
    ha.flags.writeable = False
    hb4.flags.writeable = False
    return ha, hb4


def exact_expectation(e: DMVEnsemble, h: PauliSum, dense_limit: int = 12) -> float:
    """Expectation of h on the encoded state, checked along two routes.

    Route one evaluates the quadratic form of the dense observable on the
    assembled amplitudes.  Route two evaluates the two-copy trace ratio that
    the measurement protocol targets: weighted traces of the transformed
    observable on rho_i x rho_j over weighted member overlaps.  The routes
    must agree to 1e-9; the returned value is route two's real part.
    """
    if h.n_qubits != 2 * e.n_qubits:
        raise DomainError(
            f"observable on {h.n_qubits} qubits, ensemble encodes "
            f"{2 * e.n_qubits}"
        )
    psi = assemble(e)

    ha, hb4 = _dense_routes(h, dense_limit)
    path_a = float(np.real(np.vdot(psi.amplitudes, ha @ psi.amplitudes)))

    coeffs = np.asarray(e.coeffs, dtype=np.complex128)
    numerator = 0.0 + 0.0j
    for i in range(e.k):
        for j in range(e.k):
            numerator += (
                np.conj(coeffs[i])
                * coeffs[j]
                * _two_copy_trace(hb4, e.rhos[i].data, e.rhos[j].data)
            )
    overlaps = _pairwise_overlaps(e)
    denominator = complex(np.conj(coeffs) @ overlaps @ coeffs)
    if abs(denominator) < DEGENERACY_THRESHOLD:
        raise DegenerateEnsembleError(
            f"overlap denominator {abs(denominator):.3e} vanishes"
        )
    ratio = numerator / denominator
    if abs(ratio.imag) > 1e-9:
        raise InternalCheckError(
            f"trace-ratio imaginary residue {ratio.imag:.3e}"
        )
    if abs(ratio.real - path_a) > 1e-9:
        raise InternalCheckError(
            f"expectation routes disagree: dense {path_a!r} vs "
            f"trace ratio {ratio.real!r}"
        )
    return float(ratio.real)


def _psd_up_to_phase(mat: np.ndarray) -> tuple[np.ndarray, complex] | None:
    """If mat = phase * (PSD matrix), return (PSD matrix, phase)."""
    tr = np.trace(mat)
    if abs(tr) < 1e-12:
        return None
    phase = tr / abs(tr)
    cand = mat / phase
    if np.max(np.abs(cand - cand.conj().T)) > 1e-10:
        return None
    if float(np.min(np.linalg.eigvalsh(cand))) < -1e-10:
        return None
    herm = 0.5 * (cand + cand.conj().T)
    return herm, complex(phase)


def decompose_k4(psi: DMVPureState) -> DMVEnsemble:
    """Express any pure state as a K=4 ensemble.

    Schmidt-decompose the state across the row/column split and combine the
    left/right vector pairs into four positive-semidefinite matrices whose
    weighted vectorizations sum back to the state (weights carry signs
    +1, -1, +i, -i).  States that already are vectorized PSD matrices come
    back with a single nonzero weight.  Vanished combinations keep weight 0
    with a maximally mixed placeholder so the ensemble always has K=4.
    """
    n = psi.n_qubits
    d = 1 << n
    mat = psi.as_matrix()
    mixed = DensityMatrix(np.eye(d, dtype=np.complex128) / d, validate=False)

    shortcut = _psd_up_to_phase(mat)
    if shortcut is not None:
        herm, phase = shortcut
        weight = float(np.trace(herm).real)
        rho = DensityMatrix(herm / weight, validate=False)
        ensemble = DMVEnsemble(
            rhos=(rho, mixed, mixed, mixed),
            coeffs=(phase * weight, 0.0, 0.0, 0.0),
        )
        _check_roundtrip(psi, ensemble)
        return ensemble

    u, s, vh = np.linalg.svd(mat)
    signs = (1.0 + 0.0j, -1.0 + 0.0j, 1.0j, -1.0j)
    parts = [np.zeros((d, d), dtype=np.complex128) for _ in range(4)]
    for lam, phi, chi_conj in zip(s, u.T, vh.conj()):
        if lam < _SCHMIDT_WEIGHT_FLOOR:
            continue
        vectors = (
            phi + chi_conj,
            phi - chi_conj,
            -1j * phi + chi_conj,
            -1j * phi - chi_conj,
        )
        for part, vec in zip(parts, vectors):
            part += 0.25 * lam * np.outer(vec, vec.conj())

    rhos: list[DensityMatrix] = []
    coeffs: list[complex] = []
    for sign, part in zip(signs, parts):
        weight = float(np.trace(part).real)
        if weight < 1e-14:
            rhos.append(mixed)
            coeffs.append(0.0)
            continue
        rhos.append(DensityMatrix(part / weight, validate=False))
        coeffs.append(sign * weight)
    ensemble = DMVEnsemble(rhos=tuple(rhos), coeffs=tuple(coeffs))
    _check_roundtrip(psi, ensemble)
    return ensemble


def _check_roundtrip(psi: DMVPureState, ensemble: DMVEnsemble) -> None:
    rebuilt = assemble(ensemble)
    err = 1.0 - fidelity(rebuilt, psi)
    if err > 1e-9:
        raise InternalCheckError(f"K=4 round trip infidelity {err:.3e}")


def renyi_from_weights(weights: np.ndarray, alpha: float) -> float:
    """Renyi entropy in bits of a probability vector.

    alpha=1 is the Shannon limit, alpha=inf the min-entropy; weights below
    the numerical floor are dropped before evaluation.
    """
    if not alpha > 0:
        raise DomainError(f"Renyi order must be positive, got {alpha}")
    w = np.asarray(weights, dtype=np.float64)
    if w.size == 0 or float(w.sum()) <= 0:
        raise DomainError("weights must contain positive mass")
    if float(np.min(w)) < -1e-12:
        raise DomainError(f"negative weight {float(np.min(w)):.3e}")
    w = w[w > _SCHMIDT_WEIGHT_FLOOR]
    w = w / w.sum()
    if np.isinf(alpha):
        return float(-np.log2(np.max(w)))
    if abs(alpha - 1.0) < 1e-12:
        return float(-np.sum(w * np.log2(w)))
    return float(np.log2(np.sum(w**alpha)) / (1.0 - alpha))


def renyi_entropy(psi: DMVPureState, alpha: float) -> float:
    """Row/column entanglement Renyi entropy of the encoded state."""
    return renyi_from_weights(psi.schmidt_weights(), alpha)


def fidelity(psi: DMVPureState, target: DMVPureState) -> float:
    """Squared overlap |<target|psi>|^2."""
    if psi.n_qubits != target.n_qubits:
        raise DomainError(
            f"states on {psi.n_qubits} vs {target.n_qubits} qubit halves"
        )
    return float(abs(np.vdot(target.amplitudes, psi.amplitudes)) ** 2)

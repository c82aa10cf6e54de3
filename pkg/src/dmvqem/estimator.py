"""Shot-based estimation of encoded-state expectation values.

Each measurement task prepares two ensemble members side by side, rotates
into the diagonal basis of one transformed observable term (a tensor
product of two-qubit blocks), and samples bitstrings from the exact
diagonal probabilities.  Every outcome maps to a product of per-block
eigenvalues in {1, -1, i, -i}; averaging gives an unbiased estimate of the
two-copy trace.  A ratio of weighted task results reproduces the encoded
expectation value.  Per-task RNG streams are derived from (seed, task
index) so results are independent of task scheduling order.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from functools import reduce
from typing import Union

import numpy as np

from .circuits import DensityMatrix
from .dmv import DMVEnsemble, exact_expectation
from .errors import (
    CapacityError,
    DomainError,
    InternalCheckError,
    UnstableRatioError,
)
from .pauli import DENSE_LIMIT_DEFAULT, PauliSum, norms
from .substitute import (
    SubstituteOperator,
    halves_to_interleaved_sources,
    permute_qubits,
    substitute_operator,
    swap_observable,
)

# Below this magnitude the denominator of the ratio estimator is treated as
# numerically zero and the estimate is refused.
UNSTABLE_DENOMINATOR = 1e-6

_PROB_TOLERANCE = 1e-9


@dataclass(frozen=True)
class EstimatorConfig:
    """Budget and reproducibility settings for one estimation run."""

    total_shots: int
    numerator_fraction: float = 2.0 / 3.0
    seed: int = 0
    skip_cross_overlaps: bool = False

    def __post_init__(self) -> None:
        if not isinstance(self.total_shots, int) or self.total_shots < 1:
            raise DomainError(
                f"total_shots must be a positive integer, got {self.total_shots}"
            )
        if not 0.0 < self.numerator_fraction < 1.0:
            raise DomainError(
                f"numerator_fraction must lie in (0, 1), got "
                f"{self.numerator_fraction}"
            )
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise DomainError(f"seed must be a 64-bit integer, got {self.seed}")


@dataclass(frozen=True)
class TermEstimate:
    """Sample mean of one two-copy trace with bookkeeping."""

    value: complex
    shots_used: int
    empirical_variance: float

    def __post_init__(self) -> None:
        if self.shots_used < 1:
            raise DomainError("a term estimate needs at least one shot")
        stderr = math.sqrt(self.empirical_variance / self.shots_used)
        if abs(self.value) > 1.0 + 3.0 * stderr + 1e-12:
            raise InternalCheckError(
                f"estimate magnitude {abs(self.value):.6f} exceeds the "
                f"unit-modulus eigenvalue range"
            )


@dataclass(frozen=True)
class BreakdownRow:
    """One measurement task's result for reporting and CSV export."""

    task_kind: str
    i: int
    j: int
    alpha: int
    shots: int
    value: complex
    variance: float


def _paired_density(rho_i: DensityMatrix, rho_j: DensityMatrix) -> np.ndarray:
    """rho_i x rho_j rearranged to the copy-pairing qubit layout."""
    n = rho_i.n_qubits
    if rho_j.n_qubits != n:
        raise DomainError(
            f"copies differ in size: {n} vs {rho_j.n_qubits} qubits"
        )
    if 2 * n > DENSE_LIMIT_DEFAULT:
        raise CapacityError(
            f"two copies need {2 * n} qubits, above the dense limit "
            f"{DENSE_LIMIT_DEFAULT}"
        )
    return permute_qubits(
        np.kron(rho_i.data, rho_j.data), halves_to_interleaved_sources(n)
    )


def _diagonal_probabilities(paired: np.ndarray, q: SubstituteOperator) -> np.ndarray:
    """Outcome distribution after rotating into the blocks' eigenbasis."""
    v = reduce(np.kron, (b.diagonalizer for b in q.blocks))
    rotated = v @ paired
    probs = np.einsum("ij,ij->i", rotated, v.conj()).real
    low = float(probs.min())
    if low < -_PROB_TOLERANCE:
        raise InternalCheckError(f"negative outcome probability {low:.3e}")
    probs = np.clip(probs, 0.0, None)
    total = float(probs.sum())
    if abs(total - 1.0) > _PROB_TOLERANCE:
        raise InternalCheckError(f"outcome probabilities sum to {total!r}")
    return probs / total


def sample_term(
    rho_i: DensityMatrix,
    rho_j: DensityMatrix,
    q: SubstituteOperator,
    shots: int,
    rng: np.random.Generator,
) -> TermEstimate:
    """Unbiased sampled estimate of the two-copy trace of q.

    Expectation over shots equals the dense trace of q against
    rho_i x rho_j; each shot contributes one eigenvalue product.
    """
    if shots < 1:
        raise DomainError(f"shots must be positive, got {shots}")
    if q.n != rho_i.n_qubits:
        raise DomainError(
            f"operator pairs {q.n} qubits per copy, state has "
            f"{rho_i.n_qubits}"
        )
    paired = _paired_density(rho_i, rho_j)
    probs = _diagonal_probabilities(paired, q)
    eigenvalues = q.eigenvalue_vector()
    counts = rng.multinomial(shots, probs)
    mean = complex(counts @ eigenvalues) / shots
    if shots > 1:
        spread = np.abs(eigenvalues - mean) ** 2
        variance = float(counts @ spread) / (shots - 1)
    else:
        variance = 0.0
    return TermEstimate(value=mean, shots_used=shots, empirical_variance=variance)


def _split_budget(total: int, tasks: int) -> list[int]:
    """Even split; the remainder goes one shot each to the first tasks."""
    base, rem = divmod(total, tasks)
    return [base + (1 if t < rem else 0) for t in range(tasks)]


def _task_rng(seed: int, task_index: int) -> np.random.Generator:
    return np.random.default_rng([seed, task_index])


def estimate_expectation(
    e: DMVEnsemble, h: PauliSum, cfg: EstimatorConfig
) -> tuple[float, list[BreakdownRow]]:
    """Sampled expectation of h on the encoded state, with full breakdown.

    The numerator budget covers one task per (member i, member j, term
    alpha); the remainder covers one overlap task per member pair using the
    swap observable.  With skip_cross_overlaps, off-diagonal overlaps are
    taken as exactly zero and their budget moves to the diagonal tasks.
    """
    n = e.n_qubits
    if h.n_qubits != 2 * n:
        raise DomainError(
            f"observable on {h.n_qubits} qubits, ensemble encodes {2 * n}"
        )
    k = e.k
    m = h.m
    coeffs = np.asarray(e.coeffs, dtype=np.complex128)
    term_ops = [(g, substitute_operator(p)) for g, p in h.terms]
    swap_op = swap_observable(n).operator()

    num_tasks = k * k * m
    den_pairs = (
        [(d, d) for d in range(k)]
        if cfg.skip_cross_overlaps
        else [(a, b) for a in range(k) for b in range(k)]
    )
    shots_num = int(round(cfg.total_shots * cfg.numerator_fraction))
    shots_den = cfg.total_shots - shots_num
    if shots_num < num_tasks:
        raise DomainError(
            f"numerator budget {shots_num} cannot cover {num_tasks} tasks"
        )
    if shots_den < len(den_pairs):
        raise DomainError(
            f"denominator budget {shots_den} cannot cover "
            f"{len(den_pairs)} tasks"
        )

    breakdown: list[BreakdownRow] = []
    num_split = _split_budget(shots_num, num_tasks)
    numerator = 0.0 + 0.0j
    task_index = 0
    for i in range(k):
        for j in range(k):
            weight = np.conj(coeffs[i]) * coeffs[j]
            for alpha, (g, q) in enumerate(term_ops):
                est = sample_term(
                    e.rhos[i],
                    e.rhos[j],
                    q,
                    num_split[task_index],
                    _task_rng(cfg.seed, task_index),
                )
                numerator += g * weight * est.value
                breakdown.append(
                    BreakdownRow(
                        task_kind="numerator",
                        i=i,
                        j=j,
                        alpha=alpha,
                        shots=est.shots_used,
                        value=est.value,
                        variance=est.empirical_variance,
                    )
                )
                task_index += 1

    den_split = _split_budget(shots_den, len(den_pairs))
    denominator = 0.0 + 0.0j
    for pair_pos, (a, b) in enumerate(den_pairs):
        est = sample_term(
            e.rhos[a],
            e.rhos[b],
            swap_op,
            den_split[pair_pos],
            _task_rng(cfg.seed, num_tasks + a * k + b),
        )
        denominator += np.conj(coeffs[a]) * coeffs[b] * est.value
        breakdown.append(
            BreakdownRow(
                task_kind="denominator",
                i=a,
                j=b,
                alpha=-1,
                shots=est.shots_used,
                value=est.value,
                variance=est.empirical_variance,
            )
        )

    if abs(denominator) < UNSTABLE_DENOMINATOR:
        raise UnstableRatioError(
            f"overlap denominator estimate {abs(denominator):.3e} is too "
            f"close to zero for a stable ratio",
            breakdown=breakdown,
        )
    ratio = numerator / denominator
    return float(ratio.real), breakdown


def breakdown_to_csv(breakdown: list[BreakdownRow], target: Union[str, io.TextIOBase]) -> None:
    """Write breakdown rows as CSV (task_kind, i, j, alpha, shots, re, im, var)."""
    own = isinstance(target, str)
    handle = open(target, "w", newline="") if own else target
    try:
        writer = csv.writer(handle)
        writer.writerow(["task_kind", "i", "j", "alpha", "shots", "re", "im", "var"])
        for row in breakdown:
            writer.writerow(
                [
                    row.task_kind,
                    row.i,
                    row.j,
                    row.alpha,
                    row.shots,
                    repr(row.value.real),
                    repr(row.value.imag),
                    repr(row.variance),
                ]
            )
    finally:
        if own:
            handle.close()


def sampling_bound(
    zeta: float, schmidt_links: int, k: int, eps: float, h: PauliSum
) -> float:
    """Shot count sufficient for precision eps at fault rate zeta.

    Evaluates max(e^{4 zeta}, 2^{2 links}) * (3 k^2 / eps^2) *
    (m * frobenius_sq_over_dim + spectral^2) using the observable's norm
    report; the spectral factor may itself be an upper bound when the
    observable is too large to eigendecompose densely.
    """
    if eps <= 0:
        raise DomainError(f"precision must be positive, got {eps}")
    report = norms(h)
    prefactor = max(math.exp(4.0 * zeta), float(4**schmidt_links))
    return (
        prefactor
        * (3.0 * k * k / (eps * eps))
        * (h.m * report.frobenius_sq_over_dim + report.spectral**2)
    )


def gradient_bound(schmidt_links: int, k: int, h: PauliSum, eta: float) -> float:
    """Upper bound 2^{links+2} k^2 (sum |g|) eta on cost derivatives."""
    if eta < 0:
        raise DomainError(f"eta must be nonnegative, got {eta}")
    weight = float(np.sum(np.abs(h.coefficients())))
    return float(2 ** (schmidt_links + 2) * k * k * weight * eta)


def predicted_ratio_mse(e: DMVEnsemble, h: PauliSum, cfg: EstimatorConfig) -> float:
    """First-order predicted mean squared error of estimate_expectation.

    Combines the per-task variance caps (unit-modulus eigenvalues) with the
    ratio linearization: chi * (2 k^2 m sum(g^2) / N_num + k^2 <h>^2 /
    N_den) where chi = (sum |c_i|^2)^2 / C_psi^4.  This is an upper bound
    for the implemented allocation, which gives each task at least as many
    shots as the accounting assumes.
    """
    coeffs = np.asarray(e.coeffs, dtype=np.complex128)
    overlaps = np.stack([rho.data.reshape(-1) for rho in e.rhos])
    gram = (overlaps.conj() @ overlaps.T).real
    c_psi_sq = float(np.real(np.conj(coeffs) @ gram @ coeffs))
    if c_psi_sq <= 0:
        raise DomainError("ensemble combination has no norm")
    chi = float(np.sum(np.abs(coeffs) ** 2)) ** 2 / c_psi_sq**2
    shots_num = int(round(cfg.total_shots * cfg.numerator_fraction))
    shots_den = cfg.total_shots - shots_num
    g_sq = float(np.sum(np.asarray(h.coefficients()) ** 2))
    k = e.k
    mean = exact_expectation(e, h)
    return chi * (
        2.0 * k * k * h.m * g_sq / shots_num + k * k * mean**2 / shots_den
    )

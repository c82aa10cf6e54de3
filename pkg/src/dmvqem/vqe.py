"""Variational driver for the vectorized-ensemble cost.

A problem bundles a Hamiltonian on 2n qubits, K preparation circuits whose
retained qubits form the ensemble members, a noise model, and a cost mode.
The full parameter vector concatenates the K circuit parameter blocks and,
unless running the plain single-state baseline, 2K trailing reals holding
the real and imaginary parts of the combination coefficients.
"""

from __future__ import annotations

import csv
import dataclasses
import functools
import io
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

from .circuits import DensityMatrix, NoiseModel, QuantumCircuit, partial_trace, purity, run_circuit
from .dmv import DMVEnsemble, assemble, exact_expectation
from .errors import DomainError, InternalCheckError
from .estimator import EstimatorConfig, estimate_expectation
from .pauli import PauliSum, to_dense

_GRADIENT_FLOOR = 1e-9
_ARMIJO = 0.25
_MAX_BACKTRACKS = 40


@dataclass(frozen=True)
class StatePreparation:
    """One noisy circuit plus the qubits retained as its output state."""

    circuit: QuantumCircuit
    keep: tuple[int, ...]
    initial_state: Union[int, str] = 0

    def __post_init__(self) -> None:
        keep = tuple(sorted(set(int(q) for q in self.keep)))
        if not keep:
            raise DomainError("keep set must name at least one qubit")
        if keep[0] < 0 or keep[-1] >= self.circuit.n_qubits:
            raise DomainError(
                f"keep set {keep} out of range for {self.circuit.n_qubits} qubits"
            )
        object.__setattr__(self, "keep", keep)

    @property
    def output_qubits(self) -> int:
        return len(self.keep)


@dataclass(frozen=True)
class VQEProblem:
    """Hamiltonian, ensemble preparations, noise, and cost mode."""

    hamiltonian: PauliSum
    preparations: tuple[StatePreparation, ...]
    noise: NoiseModel
    shots: EstimatorConfig | None = None
    baseline: bool = False
    target: np.ndarray | None = None

    def __post_init__(self) -> None:
        preparations = tuple(self.preparations)
        if not preparations:
            raise DomainError("need at least one preparation circuit")
        object.__setattr__(self, "preparations", preparations)
        if self.baseline:
            if len(preparations) != 1:
                raise DomainError("baseline mode uses exactly one preparation")
            prep = preparations[0]
            if prep.output_qubits != self.hamiltonian.n_qubits:
                raise DomainError(
                    "baseline preparation must retain all "
                    f"{self.hamiltonian.n_qubits} observable qubits"
                )
        else:
            for prep in preparations:
                if 2 * prep.output_qubits != self.hamiltonian.n_qubits:
                    raise DomainError(
                        f"prepared state on {prep.output_qubits} qubits does "
                        f"not vectorize onto {self.hamiltonian.n_qubits} "
                        "observable qubits"
                    )
        if self.target is not None:
            target = np.asarray(self.target, dtype=np.complex128).reshape(-1)
            if target.shape[0] != 1 << self.hamiltonian.n_qubits:
                raise DomainError(
                    "target vector length does not match the Hamiltonian"
                )
            nrm = float(np.linalg.norm(target))
            if abs(nrm - 1.0) > 1e-9:
                raise DomainError(f"target norm {nrm} differs from 1")
            target = target.copy()
            target.flags.writeable = False
            object.__setattr__(self, "target", target)

    @property
    def k(self) -> int:
        return len(self.preparations)

    @property
    def block_sizes(self) -> tuple[int, ...]:
        return tuple(p.circuit.n_parameters for p in self.preparations)

    @property
    def n_parameters(self) -> int:
        coeff = 0 if self.baseline else 2 * self.k
        return sum(self.block_sizes) + coeff

    def split(self, params: np.ndarray) -> tuple[list[np.ndarray], np.ndarray | None]:
        """Circuit parameter blocks and complex coefficients."""
        params = np.asarray(params, dtype=np.float64).reshape(-1)
        if params.shape[0] != self.n_parameters:
            raise DomainError(
                f"parameter vector length {params.shape[0]}, "
                f"expected {self.n_parameters}"
            )
        blocks: list[np.ndarray] = []
        offset = 0
        for size in self.block_sizes:
            blocks.append(params[offset:offset + size])
            offset += size
        if self.baseline:
            return blocks, None
        tail = params[offset:]
        return blocks, tail[0::2] + 1.0j * tail[1::2]


def prepare_densities(
    problem: VQEProblem, blocks: Sequence[np.ndarray]
) -> tuple[DensityMatrix, ...]:
    """Run each preparation circuit and trace to its retained qubits."""
    states: list[DensityMatrix] = []
    for prep, block in zip(problem.preparations, blocks):
        rho = run_circuit(
            prep.circuit, block, problem.noise, initial_state=prep.initial_state
        )
        if prep.output_qubits < prep.circuit.n_qubits:
            rho = partial_trace(rho, prep.keep)
        states.append(rho)
    return tuple(states)


def ensemble_at(problem: VQEProblem, params: np.ndarray) -> DMVEnsemble:
    """Ensemble of prepared states and coefficients at one parameter point."""
    if problem.baseline:
        raise DomainError("the baseline problem carries no ensemble")
    blocks, coeffs = problem.split(params)
    return DMVEnsemble(rhos=prepare_densities(problem, blocks), coeffs=tuple(coeffs))


@functools.lru_cache(maxsize=8)
def _dense_observable(h: PauliSum) -> np.ndarray:
    """Dense form of the observable, built once per Hamiltonian."""
    dense = to_dense(h)
    dense.flags.writeable = False
    return dense


def _pauli_basis_change(letters: str) -> np.ndarray:
    """Unitary rotating each local letter to the Z axis."""
    h = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=np.complex128) / np.sqrt(2.0)
    rxh = np.array([[1.0, -1.0j], [-1.0j, 1.0]], dtype=np.complex128) / np.sqrt(2.0)
    eye = np.eye(2, dtype=np.complex128)
    out = np.array([[1.0]], dtype=np.complex128)
    for ch in letters:
        out = np.kron(out, h if ch == "X" else rxh if ch == "Y" else eye)
    return out


def _sample_state_expectation(
    rho: DensityMatrix, h: PauliSum, cfg: EstimatorConfig
) -> float:
    """Term-by-term sampled Tr(H rho) for the single-state baseline."""
    n = rho.n_qubits
    sampled = [
        (coeff, p) for coeff, p in h.terms if p.support()
    ]
    constant = sum(coeff for coeff, p in h.terms if not p.support())
    if not sampled:
        return float(constant)
    if cfg.total_shots < len(sampled):
        raise DomainError(
            f"budget {cfg.total_shots} cannot cover {len(sampled)} terms"
        )
    base, extra = divmod(cfg.total_shots, len(sampled))
    total = float(constant)
    for index, (coeff, p) in enumerate(sampled):
        shots = base + (1 if index < extra else 0)
        v = _pauli_basis_change(p.letters)
        probs = np.einsum("ij,ij->i", v @ rho.data, v.conj()).real
        probs = np.clip(probs, 0.0, None)
        probs = probs / probs.sum()
        eigs = np.ones(1 << n)
        idx = np.arange(1 << n)
        for q in p.support():
            eigs *= 1.0 - 2.0 * ((idx >> (n - 1 - q)) & 1)
        rng = np.random.default_rng([cfg.seed & 0xFFFFFFFF, index])
        counts = rng.multinomial(shots, probs)
        total += coeff * float(counts @ eigs) / shots
    return total


def cost(
    problem: VQEProblem,
    params: np.ndarray,
    shot_seed: int | None = None,
) -> float:
    """Energy of the assembled state, or of the bare state in baseline mode."""
    blocks, coeffs = problem.split(params)
    cfg = problem.shots
    if cfg is not None and shot_seed is not None:
        cfg = dataclasses.replace(cfg, seed=int(shot_seed))
    if problem.baseline:
        rho = prepare_densities(problem, blocks)[0]
        if cfg is None:
            value = rho.expectation(_dense_observable(problem.hamiltonian))
            if abs(value.imag) > 1e-9:
                raise InternalCheckError(
                    f"baseline energy picked up imaginary part {value.imag:.3e}"
                )
            return float(value.real)
        return _sample_state_expectation(rho, problem.hamiltonian, cfg)
    ens = DMVEnsemble(rhos=prepare_densities(problem, blocks), coeffs=tuple(coeffs))
    if cfg is None:
        return exact_expectation(ens, problem.hamiltonian)
    value, _ = estimate_expectation(ens, problem.hamiltonian, cfg)
    return value


def gradient_fd(problem: VQEProblem, params: np.ndarray, step: float) -> np.ndarray:
    """Central finite differences of the exact cost."""
    if step <= 0.0:
        raise DomainError(f"finite-difference step must be positive, got {step}")
    if problem.shots is not None:
        raise DomainError("finite differences need the exact cost mode")
    params = np.asarray(params, dtype=np.float64).reshape(-1)
    grad = np.zeros_like(params)
    for i in range(params.shape[0]):
        bumped = params.copy()
        bumped[i] = params[i] + step
        high = cost(problem, bumped)
        bumped[i] = params[i] - step
        low = cost(problem, bumped)
        grad[i] = (high - low) / (2.0 * step)
    return grad


@dataclass(frozen=True)
class OptimizerConfig:
    """Budget, seeding, and step-size knobs shared by both modes."""

    max_iterations: int = 300
    seed: int = 0
    restarts: int = 1
    init_spread: float = 0.1
    coeff_spread: float = 0.01
    step_init: float = 0.5
    fd_step: float = 1e-5
    cost_tolerance: float = 1e-10
    simplex_scale: float = 0.25

    def __post_init__(self) -> None:
        if self.max_iterations < 1:
            raise DomainError("iteration budget must be at least 1")
        if self.restarts < 1:
            raise DomainError("need at least one start")
        if self.step_init <= 0 or self.fd_step <= 0 or self.simplex_scale <= 0:
            raise DomainError("step sizes must be positive")


@dataclass(frozen=True)
class TraceRecord:
    """Best-so-far snapshot after one optimizer iteration."""

    iteration: int
    cost: float
    params: tuple[float, ...]
    purities: tuple[float, ...]
    fidelity: float | None
    shots_spent: int


@dataclass(frozen=True)
class OptimizationTrace:
    """Iteration 0 is the initial point; the last record is the best point."""

    records: tuple[TraceRecord, ...]

    def __post_init__(self) -> None:
        if not self.records:
            raise DomainError("a trace needs at least the initial record")
        object.__setattr__(self, "records", tuple(self.records))

    @property
    def final(self) -> TraceRecord:
        return self.records[-1]

    def best_costs(self) -> list[float]:
        return [r.cost for r in self.records]

    def to_csv(self, target: Union[str, io.TextIOBase]) -> None:
        k = len(self.records[0].purities)
        header = ["iteration", "cost", "fidelity"]
        header += [f"purity_{i + 1}" for i in range(k)]
        header += ["shots"]

        def write(stream) -> None:
            writer = csv.writer(stream, lineterminator="\n")
            writer.writerow(header)
            for r in self.records:
                row = [r.iteration, repr(float(r.cost))]
                row.append("" if r.fidelity is None else repr(float(r.fidelity)))
                row += [repr(float(p)) for p in r.purities]
                row.append(r.shots_spent)
                writer.writerow(row)

        if isinstance(target, str):
            with open(target, "w", encoding="utf-8", newline="") as stream:
                write(stream)
        else:
            write(target)


def evaluate_point(
    problem: VQEProblem, params: np.ndarray
) -> tuple[tuple[float, ...], float | None]:
    """Per-member purities and fidelity against the stored target."""
    blocks, coeffs = problem.split(params)
    states = prepare_densities(problem, blocks)
    purities = tuple(purity(rho) for rho in states)
    if problem.target is None:
        return purities, None
    if problem.baseline:
        rho = states[0]
        fid = float(np.real(np.vdot(problem.target, rho.data @ problem.target)))
        return purities, fid
    ens = DMVEnsemble(rhos=states, coeffs=tuple(coeffs))
    psi = assemble(ens).amplitudes
    return purities, float(abs(np.vdot(problem.target, psi)) ** 2)


def _initial_point(
    problem: VQEProblem, config: OptimizerConfig, rng: np.random.Generator
) -> np.ndarray:
    """Near-identity circuit angles; coefficients near (1, 0, ..., 0)."""
    params = np.zeros(problem.n_parameters)
    n_circuit = sum(problem.block_sizes)
    params[:n_circuit] = rng.uniform(-config.init_spread, config.init_spread, n_circuit)
    if not problem.baseline:
        tail = rng.normal(0.0, config.coeff_spread, 2 * problem.k)
        tail[0] += 1.0
        params[n_circuit:] = tail
    return params


def _eval_seed(base_seed: int, restart: int, counter: int) -> int:
    seq = np.random.SeedSequence(entropy=[base_seed, restart, counter])
    return int(seq.generate_state(1, np.uint64)[0])


def _descend(
    problem: VQEProblem,
    config: OptimizerConfig,
    x0: np.ndarray,
) -> list[tuple[np.ndarray, float, int]]:
    """Finite-difference gradient descent with backtracking line search."""
    x = x0.copy()
    fx = cost(problem, x)
    path = [(x.copy(), fx, 0)]
    step = config.step_init
    for _ in range(config.max_iterations):
        grad = gradient_fd(problem, x, config.fd_step)
        gnorm = float(np.linalg.norm(grad))
        if gnorm < _GRADIENT_FLOOR:
            break
        trial = step
        accepted = None
        for _ in range(_MAX_BACKTRACKS):
            candidate = x - trial * grad
            fc = cost(problem, candidate)
            if fc < fx - _ARMIJO * trial * gnorm * gnorm:
                accepted = (candidate, fc)
                break
            trial *= 0.5
        if accepted is None:
            break
        improvement = fx - accepted[1]
        x, fx = accepted
        step = trial * 2.0
        path.append((x.copy(), fx, 0))
        if improvement < config.cost_tolerance:
            break
    return path


def _simplex_search(
    problem: VQEProblem,
    config: OptimizerConfig,
    x0: np.ndarray,
    restart: int,
) -> list[tuple[np.ndarray, float, int]]:
    """Deterministic Nelder-Mead; every evaluation draws a fresh shot seed."""
    shots_per_eval = problem.shots.total_shots if problem.shots else 0
    counter = 0

    def evaluate(point: np.ndarray) -> float:
        nonlocal counter
        counter += 1
        return cost(
            problem, point, shot_seed=_eval_seed(config.seed, restart, counter)
        )

    dim = x0.shape[0]
    points = [x0.copy()]
    for i in range(dim):
        vertex = x0.copy()
        vertex[i] += config.simplex_scale
        points.append(vertex)
    values = [evaluate(p) for p in points]
    order = np.argsort(values, kind="stable")
    points = [points[i] for i in order]
    values = [values[i] for i in order]
    path = [(points[0].copy(), values[0], counter * shots_per_eval)]

    for _ in range(config.max_iterations):
        centroid = np.mean(points[:-1], axis=0)
        worst = points[-1]
        reflected = centroid + (centroid - worst)
        f_reflected = evaluate(reflected)
        if f_reflected < values[0]:
            expanded = centroid + 2.0 * (centroid - worst)
            f_expanded = evaluate(expanded)
            if f_expanded < f_reflected:
                points[-1], values[-1] = expanded, f_expanded
            else:
                points[-1], values[-1] = reflected, f_reflected
        elif f_reflected < values[-2]:
            points[-1], values[-1] = reflected, f_reflected
        else:
            contracted = centroid + 0.5 * (worst - centroid)
            f_contracted = evaluate(contracted)
            if f_contracted < values[-1]:
                points[-1], values[-1] = contracted, f_contracted
            else:
                best = points[0]
                for i in range(1, dim + 1):
                    points[i] = best + 0.5 * (points[i] - best)
                    values[i] = evaluate(points[i])
        order = np.argsort(values, kind="stable")
        points = [points[i] for i in order]
        values = [values[i] for i in order]
        path.append((points[0].copy(), values[0], counter * shots_per_eval))
    return path


def optimize(problem: VQEProblem, config: OptimizerConfig) -> OptimizationTrace:
    """Seeded multi-start local search; returns the best start's trace."""
    if problem.n_parameters == 0:
        raise DomainError("the problem exposes no trainable parameters")
    best_path: list[tuple[np.ndarray, float, int]] | None = None
    for restart in range(config.restarts):
        rng = np.random.default_rng([config.seed, restart])
        x0 = _initial_point(problem, config, rng)
        if problem.shots is None:
            path = _descend(problem, config, x0)
        else:
            path = _simplex_search(problem, config, x0, restart)
        if best_path is None or path[-1][1] < best_path[-1][1]:
            best_path = path
    assert best_path is not None
    records = []
    for iteration, (params, value, shots_spent) in enumerate(best_path):
        purities, fidelity = evaluate_point(problem, params)
        records.append(
            TraceRecord(
                iteration=iteration,
                cost=value,
                params=tuple(float(v) for v in params),
                purities=purities,
                fidelity=fidelity,
                shots_spent=shots_spent,
            )
        )
    trace = OptimizationTrace(records=tuple(records))
    costs = trace.best_costs()
    if any(b > a + 1e-9 for a, b in zip(costs, costs[1:])):
        raise InternalCheckError("best-so-far cost increased along the trace")
    return trace

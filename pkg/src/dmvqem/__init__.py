"""Density-matrix vectorization toolkit.

Simulates noisy quantum circuits at the density-matrix level, maps mixed
states to pure states on a doubled register, estimates observables on the
doubled register from single-copy Pauli sampling, and drives variational
optimization of the resulting mitigated cost.
"""

from .errors import (
    CapacityError,
    DegenerateEnsembleError,
    DmvError,
    DomainError,
    InternalCheckError,
    PauliParseError,
    UnstableRatioError,
    ValidationError,
)
from .pauli import (
    PauliString,
    PauliSum,
    load_hamiltonian,
    parse_pauli,
    save_hamiltonian,
)
from .circuits import (
    DensityMatrix,
    Gate,
    NoiseModel,
    QuantumCircuit,
    fault_rate,
    partial_trace,
    purity,
    run_circuit,
    run_statevector,
)
from .substitute import (
    SubstituteBlock,
    SubstituteOperator,
    SubstituteSum,
    SwapObservable,
    block_table,
    dense_substitute_halves,
    dump_transform,
    rotation_circuit,
    substitute_block,
    substitute_operator,
    swap_observable,
    transform_hamiltonian,
)
from .dmv import (
    DMVEnsemble,
    DMVPureState,
    assemble,
    combination_norm,
    decompose_k4,
    exact_expectation,
    fidelity,
    renyi_entropy,
    vectorize,
)
from .estimator import (
    EstimatorConfig,
    estimate_expectation,
    gradient_bound,
    predicted_ratio_mse,
    sampling_bound,
)
from .ansatz import (
    SchmidtAnsatzSpec,
    UCCSDSpec,
    build_schmidt,
    build_ucc_spin_symmetric,
    compile_pauli_rotation,
    jordan_wigner,
)
from .stabilizer import (
    StabilizerCode,
    build_stabilizer_hamiltonian,
    dense_ground_state,
    load_stabilizer,
    save_stabilizer,
)
from .vqe import (
    OptimizationTrace,
    OptimizerConfig,
    StatePreparation,
    VQEProblem,
    cost,
    gradient_fd,
    optimize,
)
from .config import (
    ExperimentConfig,
    PRESETS,
    build_problem,
    config_to_dict,
    load_config,
    make_manifest,
    parse_config,
)

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "DegenerateEnsembleError",
    "DmvError",
    "DomainError",
    "InternalCheckError",
    "PauliParseError",
    "UnstableRatioError",
    "ValidationError",
    "PauliString",
    "PauliSum",
    "load_hamiltonian",
    "parse_pauli",
    "save_hamiltonian",
    "DensityMatrix",
    "Gate",
    "NoiseModel",
    "QuantumCircuit",
    "fault_rate",
    "partial_trace",
    "purity",
    "run_circuit",
    "run_statevector",
    "SubstituteBlock",
    "SubstituteOperator",
    "SubstituteSum",
    "SwapObservable",
    "block_table",
    "dense_substitute_halves",
    "dump_transform",
    "rotation_circuit",
    "substitute_block",
    "substitute_operator",
    "swap_observable",
    "transform_hamiltonian",
    "DMVEnsemble",
    "DMVPureState",
    "assemble",
    "combination_norm",
    "decompose_k4",
    "exact_expectation",
    "fidelity",
    "renyi_entropy",
    "vectorize",
    "EstimatorConfig",
    "estimate_expectation",
    "gradient_bound",
    "predicted_ratio_mse",
    "sampling_bound",
    "SchmidtAnsatzSpec",
    "UCCSDSpec",
    "build_schmidt",
    "build_ucc_spin_symmetric",
    "compile_pauli_rotation",
    "jordan_wigner",
    "StabilizerCode",
    "build_stabilizer_hamiltonian",
    "dense_ground_state",
    "load_stabilizer",
    "save_stabilizer",
    "OptimizationTrace",
    "OptimizerConfig",
    "StatePreparation",
    "VQEProblem",
    "cost",
    "gradient_fd",
    "optimize",
    "ExperimentConfig",
    "PRESETS",
    "build_problem",
    "config_to_dict",
    "load_config",
    "make_manifest",
    "parse_config",
    "__version__",
]

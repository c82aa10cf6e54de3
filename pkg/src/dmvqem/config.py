"""Experiment configuration: schema, presets, problem assembly, manifests.

A configuration is a JSON object naming a problem source (Hamiltonian file,
stabilizer file, or built-in preset), an ansatz, the ensemble size, the
noise strength, the cost mode, and reproducibility settings.  Parsing
validates the whole document and reports every violation at once; a parsed
configuration assembles into a ready-to-optimize problem, and a manifest
capturing the configuration hash, seed, and library versions accompanies
every run so outputs can be reproduced bit-exactly.
"""

import dataclasses
import hashlib
import json
import os
import platform
from dataclasses import dataclass
from importlib import metadata, resources
from typing import Any, Mapping

import numpy as np
import scipy

from .ansatz import (
    SchmidtAnsatzSpec,
    UCCSDSpec,
    build_schmidt,
    build_ucc_spin_symmetric,
)
from .circuits import NoiseModel, fault_rate
from .errors import DomainError, ValidationError
from .estimator import EstimatorConfig
from .pauli import load_hamiltonian
from .stabilizer import (
    build_stabilizer_hamiltonian,
    dense_ground_state,
    load_stabilizer,
    permute_pauli_sum,
)
from .vqe import OptimizerConfig, StatePreparation, VQEProblem

# Reference to a file bundled with the package, e.g. "pkg:h2_sto3g.json".
PACKAGED_PREFIX = "pkg:"

_TOP_KEYS = {
    "preset",
    "problem",
    "ansatz",
    "k",
    "baseline",
    "noise_p",
    "mode",
    "seed",
    "out_dir",
    "optimizer",
}
_PROBLEM_KEYS = {"hamiltonian_file", "stabilizer_file", "partition"}
_SCHMIDT_KEYS = {"family", "n", "links", "dist_depth", "mix_depth"}
_UCC_KEYS = {"family", "n_orbitals", "electrons", "lock_spin_sectors"}
_MODE_KEYS = {"kind", "total_shots"}
_OPTIMIZER_KEYS = {f.name for f in dataclasses.fields(OptimizerConfig)} - {"seed"}

PRESETS: dict[str, dict] = {
    "bell-stabilizer": {
        "problem": {"stabilizer_file": "pkg:bell_stabilizer.json"},
        "ansatz": {
            "family": "schmidt",
            "n": 1,
            "links": 1,
            "dist_depth": 1,
            "mix_depth": 1,
        },
        "k": 1,
        "baseline": False,
        "noise_p": 0.0,
        "mode": {"kind": "exact"},
        "seed": 7,
        "out_dir": "runs/bell-stabilizer",
        "optimizer": {"max_iterations": 150, "restarts": 2},
    },
    "surface10-good": {
        "problem": {
            "stabilizer_file": "pkg:surface10_stabilizer.json",
            "partition": [0, 1, 2, 3, 4, 5, 6, 7, 8, 9],
        },
        "ansatz": {
            "family": "schmidt",
            "n": 5,
            "links": 1,
            "dist_depth": 1,
            "mix_depth": 2,
        },
        "k": 1,
        "baseline": False,
        "noise_p": 0.0,
        "mode": {"kind": "exact"},
        "seed": 7,
        "out_dir": "runs/surface10-good",
        "optimizer": {"max_iterations": 150, "restarts": 2},
    },
    "surface10-bad": {
        "problem": {
            "stabilizer_file": "pkg:surface10_stabilizer.json",
            "partition": [0, 1, 2, 5, 6, 7, 3, 8, 4, 9],
        },
        "ansatz": {
            "family": "schmidt",
            "n": 5,
            "links": 1,
            "dist_depth": 1,
            "mix_depth": 2,
        },
        "k": 1,
        "baseline": False,
        "noise_p": 0.0,
        "mode": {"kind": "exact"},
        "seed": 7,
        "out_dir": "runs/surface10-bad",
        "optimizer": {"max_iterations": 150, "restarts": 2},
    },
    "h2": {
        "problem": {"hamiltonian_file": "pkg:h2_sto3g.json"},
        "ansatz": {
            "family": "ucc",
            "n_orbitals": 2,
            "electrons": 1,
            "lock_spin_sectors": True,
        },
        "k": 4,
        "baseline": False,
        "noise_p": 0.0,
        "mode": {"kind": "exact"},
        "seed": 7,
        "out_dir": "runs/h2",
        "optimizer": {"max_iterations": 300, "restarts": 2},
    },
    "h2-baseline": {
        "problem": {"hamiltonian_file": "pkg:h2_sto3g.json"},
        "ansatz": {
            "family": "ucc",
            "n_orbitals": 2,
            "electrons": 1,
            "lock_spin_sectors": True,
        },
        "k": 1,
        "baseline": True,
        "noise_p": 0.0,
        "mode": {"kind": "exact"},
        "seed": 7,
        "out_dir": "runs/h2-baseline",
        "optimizer": {"max_iterations": 300, "restarts": 2},
    },
}


@dataclass(frozen=True)
class AnsatzConfig:
    """Family tag plus the shape fields the named family uses."""

    family: str
    n: int | None = None
    links: int | None = None
    dist_depth: int = 1
    mix_depth: int = 1
    n_orbitals: int | None = None
    electrons: int | None = None
    lock_spin_sectors: bool = True

    @property
    def circuit_qubits(self) -> int:
        if self.family == "schmidt":
            return int(self.n) + int(self.links)
        return 2 * int(self.n_orbitals)

    @property
    def kept_qubits(self) -> int:
        """Width of the retained register in ensemble mode."""
        if self.family == "schmidt":
            return int(self.n)
        return int(self.n_orbitals)


@dataclass(frozen=True)
class ExperimentConfig:
    """One fully validated experiment description."""

    ansatz: AnsatzConfig
    k: int
    optimizer: OptimizerConfig
    hamiltonian_file: str | None = None
    stabilizer_file: str | None = None
    partition: tuple[int, ...] | None = None
    preset: str | None = None
    baseline: bool = False
    noise_p: float = 0.0
    mode_kind: str = "exact"
    total_shots: int | None = None
    seed: int = 0
    out_dir: str = "runs"


@dataclass(frozen=True)
class BuiltProblem:
    """Problem, optimizer, and reference quantities assembled from a config."""

    config: ExperimentConfig
    problem: VQEProblem
    optimizer: OptimizerConfig
    ground_energy: float
    energy_gap: float
    zeta: float


def resolve_data_path(ref: str, base_dir: str | None = None) -> str:
    """Filesystem path for a file reference.

    References starting with "pkg:" name files shipped inside the package's
    data directory; other references are ordinary paths, resolved against
    base_dir when relative.
    """
    if ref.startswith(PACKAGED_PREFIX):
        name = ref[len(PACKAGED_PREFIX):]
        if not name or "/" in name or "\\" in name or name != os.path.basename(name):
            raise DomainError(f"packaged data reference {ref!r} must be a bare filename")
        return str(resources.files("dmvqem").joinpath("data", name))
    if os.path.isabs(ref) or base_dir is None:
        return ref
    return os.path.join(base_dir, ref)


def _sha256_file(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as stream:
        for chunk in iter(lambda: stream.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _peek_n_qubits(path: str) -> tuple[int | None, str | None]:
    """Register width recorded in a data file, or an error description."""
    try:
        with open(path, "r", encoding="utf-8") as stream:
            payload = json.load(stream)
        return int(payload["n_qubits"]), None
    except FileNotFoundError:
        return None, "file not found"
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        return None, f"not valid JSON ({exc})"
    except (KeyError, TypeError, ValueError):
        return None, "missing a usable n_qubits field"


def _deep_merge(base: Mapping, override: Mapping) -> dict:
    merged = dict(base)
    for key, value in override.items():
        if (
            key in merged
            and isinstance(merged[key], Mapping)
            and isinstance(value, Mapping)
        ):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def _is_int(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _check_ansatz(section: Any, violations: list[str]) -> AnsatzConfig | None:
    if not isinstance(section, Mapping):
        violations.append("ansatz: must be an object")
        return None
    family = section.get("family")
    if family not in ("schmidt", "ucc"):
        violations.append(
            f"ansatz.family: expected 'schmidt' or 'ucc', got {family!r}"
        )
        return None
    allowed = _SCHMIDT_KEYS if family == "schmidt" else _UCC_KEYS
    for key in sorted(set(section) - allowed):
        violations.append(f"ansatz.{key}: unknown key for family {family!r}")
    ok = True
    if family == "schmidt":
        n = section.get("n")
        links = section.get("links")
        dist_depth = section.get("dist_depth", 1)
        mix_depth = section.get("mix_depth", 1)
        if not _is_int(n) or n < 1:
            violations.append(f"ansatz.n: must be a positive integer, got {n!r}")
            ok = False
        if not _is_int(links) or links < 0:
            violations.append(
                f"ansatz.links: must be a nonnegative integer, got {links!r}"
            )
            ok = False
        if not _is_int(dist_depth) or dist_depth < 1:
            violations.append(
                f"ansatz.dist_depth: must be a positive integer, got {dist_depth!r}"
            )
            ok = False
        if not _is_int(mix_depth) or mix_depth < 1:
            violations.append(
                f"ansatz.mix_depth: must be a positive integer, got {mix_depth!r}"
            )
            ok = False
        if not ok:
            return None
        return AnsatzConfig(
            family="schmidt",
            n=n,
            links=links,
            dist_depth=dist_depth,
            mix_depth=mix_depth,
        )
    n_orbitals = section.get("n_orbitals")
    electrons = section.get("electrons")
    lock = section.get("lock_spin_sectors", True)
    if not _is_int(n_orbitals) or n_orbitals < 2:
        violations.append(
            f"ansatz.n_orbitals: must be an integer >= 2, got {n_orbitals!r}"
        )
        ok = False
    if not _is_int(electrons) or electrons < 1:
        violations.append(
            f"ansatz.electrons: must be a positive integer, got {electrons!r}"
        )
        ok = False
    elif _is_int(n_orbitals) and electrons >= n_orbitals:
        violations.append(
            "ansatz.electrons: must leave at least one empty orbital "
            f"({electrons} of {n_orbitals})"
        )
        ok = False
    if not isinstance(lock, bool):
        violations.append(
            f"ansatz.lock_spin_sectors: must be true or false, got {lock!r}"
        )
        ok = False
    if not ok:
        return None
    return AnsatzConfig(
        family="ucc",
        n_orbitals=n_orbitals,
        electrons=electrons,
        lock_spin_sectors=lock,
    )


def parse_config(payload: Any, base_dir: str | None = None) -> ExperimentConfig:
    """Validate a configuration document, reporting every violation at once.

    When a preset is named, its fields act as defaults underneath the rest
    of the document.  Relative file paths resolve against base_dir.
    """
    violations: list[str] = []
    if not isinstance(payload, Mapping):
        raise ValidationError(["config root must be a JSON object"])

    preset = payload.get("preset")
    merged: dict = dict(payload)
    if preset is not None:
        if not isinstance(preset, str) or preset not in PRESETS:
            violations.append(
                f"preset: unknown preset {preset!r} "
                f"(registry: {', '.join(sorted(PRESETS))})"
            )
        else:
            merged = _deep_merge(PRESETS[preset], payload)

    for key in sorted(set(merged) - _TOP_KEYS):
        violations.append(f"{key}: unknown key")

    problem = merged.get("problem")
    hamiltonian_file: str | None = None
    stabilizer_file: str | None = None
    partition: tuple[int, ...] | None = None
    source_n: int | None = None
    if not isinstance(problem, Mapping):
        violations.append("problem: section is required and must be an object")
    else:
        for key in sorted(set(problem) - _PROBLEM_KEYS):
            violations.append(f"problem.{key}: unknown key")
        ham = problem.get("hamiltonian_file")
        stab = problem.get("stabilizer_file")
        if (ham is None) == (stab is None):
            violations.append(
                "problem: exactly one of hamiltonian_file or stabilizer_file "
                "is required"
            )
        for label, ref in (("hamiltonian_file", ham), ("stabilizer_file", stab)):
            if ref is None:
                continue
            if not isinstance(ref, str) or not ref:
                violations.append(f"problem.{label}: must be a nonempty string")
                continue
            try:
                path = resolve_data_path(ref, base_dir)
            except DomainError as exc:
                violations.append(f"problem.{label}: {exc}")
                continue
            n, err = _peek_n_qubits(path)
            if err is not None:
                violations.append(f"problem.{label}: {path}: {err}")
            else:
                source_n = n
                if label == "hamiltonian_file":
                    hamiltonian_file = ref
                else:
                    stabilizer_file = ref
        part = problem.get("partition")
        if part is not None:
            if stab is None:
                violations.append(
                    "problem.partition: only applies to stabilizer problems"
                )
            elif not isinstance(part, (list, tuple)) or not all(
                _is_int(q) for q in part
            ):
                violations.append(
                    f"problem.partition: must be a list of integers, got {part!r}"
                )
            elif source_n is not None and sorted(part) != list(range(source_n)):
                violations.append(
                    f"problem.partition: must be a permutation of 0..{source_n - 1}"
                )
            else:
                partition = tuple(int(q) for q in part)

    ansatz = _check_ansatz(merged.get("ansatz"), violations)

    k = merged.get("k")
    if not _is_int(k) or k < 1:
        violations.append(f"k: must be a positive integer, got {k!r}")
        k = None

    baseline = merged.get("baseline", False)
    if not isinstance(baseline, bool):
        violations.append(f"baseline: must be true or false, got {baseline!r}")
        baseline = False
    elif baseline and k is not None and k != 1:
        violations.append(f"baseline: requires k = 1, got k = {k}")

    noise_p = merged.get("noise_p", 0.0)
    if not _is_number(noise_p) or not 0.0 <= noise_p <= 1.0:
        violations.append(f"noise_p: must be a number in [0, 1], got {noise_p!r}")
        noise_p = 0.0

    mode = merged.get("mode", {"kind": "exact"})
    mode_kind = "exact"
    total_shots: int | None = None
    if not isinstance(mode, Mapping):
        violations.append("mode: must be an object with a 'kind' field")
    else:
        for key in sorted(set(mode) - _MODE_KEYS):
            violations.append(f"mode.{key}: unknown key")
        kind = mode.get("kind")
        if kind not in ("exact", "shots"):
            violations.append(
                f"mode.kind: expected 'exact' or 'shots', got {kind!r}"
            )
        elif kind == "shots":
            mode_kind = "shots"
            shots = mode.get("total_shots")
            if not _is_int(shots) or shots < 1:
                violations.append(
                    f"mode.total_shots: must be a positive integer, got {shots!r}"
                )
            else:
                total_shots = shots
        elif "total_shots" in mode:
            violations.append("mode.total_shots: not allowed in exact mode")

    seed = merged.get("seed", 0)
    if not _is_int(seed) or not 0 <= seed < 2**64:
        violations.append(f"seed: must be an integer in [0, 2^64), got {seed!r}")
        seed = 0

    out_dir = merged.get("out_dir", "runs")
    if not isinstance(out_dir, str) or not out_dir:
        violations.append(f"out_dir: must be a nonempty string, got {out_dir!r}")
        out_dir = "runs"

    optimizer_section = merged.get("optimizer", {})
    optimizer: OptimizerConfig | None = None
    if not isinstance(optimizer_section, Mapping):
        violations.append("optimizer: must be an object")
    else:
        if "seed" in optimizer_section:
            violations.append(
                "optimizer.seed: not allowed; set the top-level seed instead"
            )
        for key in sorted(set(optimizer_section) - _OPTIMIZER_KEYS - {"seed"}):
            violations.append(f"optimizer.{key}: unknown key")
        kwargs = {
            key: optimizer_section[key]
            for key in _OPTIMIZER_KEYS
            if key in optimizer_section
        }
        try:
            optimizer = OptimizerConfig(seed=seed, **kwargs)
        except (DomainError, TypeError) as exc:
            violations.append(f"optimizer: {exc}")

    # Cross-field register arithmetic, only when the pieces parsed cleanly.
    if ansatz is not None and source_n is not None:
        required = (
            ansatz.circuit_qubits if baseline else 2 * ansatz.kept_qubits
        )
        if required != source_n:
            role = "retains" if baseline else "vectorizes onto"
            violations.append(
                f"ansatz: {role} {required} qubits but the problem source "
                f"defines {source_n}"
            )

    if violations:
        raise ValidationError(violations)
    assert ansatz is not None and k is not None and optimizer is not None
    return ExperimentConfig(
        ansatz=ansatz,
        k=k,
        optimizer=optimizer,
        hamiltonian_file=hamiltonian_file,
        stabilizer_file=stabilizer_file,
        partition=partition,
        preset=preset if isinstance(preset, str) else None,
        baseline=baseline,
        noise_p=float(noise_p),
        mode_kind=mode_kind,
        total_shots=total_shots,
        seed=seed,
        out_dir=out_dir,
    )


def load_config(path: str) -> ExperimentConfig:
    """Parse a configuration file, resolving relative paths beside it."""
    try:
        with open(path, "r", encoding="utf-8") as stream:
            payload = json.load(stream)
    except FileNotFoundError:
        raise ValidationError([f"config file not found: {path}"]) from None
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ValidationError([f"config file {path} is not valid JSON: {exc}"]) from None
    return parse_config(payload, base_dir=os.path.dirname(os.path.abspath(path)))


def config_to_dict(cfg: ExperimentConfig) -> dict:
    """Canonical JSON form; parsing it back reproduces the same config."""
    problem: dict[str, Any] = {}
    if cfg.hamiltonian_file is not None:
        problem["hamiltonian_file"] = cfg.hamiltonian_file
    if cfg.stabilizer_file is not None:
        problem["stabilizer_file"] = cfg.stabilizer_file
    if cfg.partition is not None:
        problem["partition"] = list(cfg.partition)
    ansatz: dict[str, Any] = {"family": cfg.ansatz.family}
    if cfg.ansatz.family == "schmidt":
        ansatz.update(
            n=cfg.ansatz.n,
            links=cfg.ansatz.links,
            dist_depth=cfg.ansatz.dist_depth,
            mix_depth=cfg.ansatz.mix_depth,
        )
    else:
        ansatz.update(
            n_orbitals=cfg.ansatz.n_orbitals,
            electrons=cfg.ansatz.electrons,
            lock_spin_sectors=cfg.ansatz.lock_spin_sectors,
        )
    mode: dict[str, Any] = {"kind": cfg.mode_kind}
    if cfg.mode_kind == "shots":
        mode["total_shots"] = cfg.total_shots
    optimizer = {
        key: getattr(cfg.optimizer, key) for key in sorted(_OPTIMIZER_KEYS)
    }
    doc: dict[str, Any] = {
        "problem": problem,
        "ansatz": ansatz,
        "k": cfg.k,
        "baseline": cfg.baseline,
        "noise_p": cfg.noise_p,
        "mode": mode,
        "seed": cfg.seed,
        "out_dir": cfg.out_dir,
        "optimizer": optimizer,
    }
    if cfg.preset is not None:
        doc["preset"] = cfg.preset
    return doc


def build_problem(cfg: ExperimentConfig, base_dir: str | None = None) -> BuiltProblem:
    """Assemble the Hamiltonian, preparations, and target from a config."""
    if cfg.stabilizer_file is not None:
        path = resolve_data_path(cfg.stabilizer_file, base_dir)
        code = load_stabilizer(path)
        if not code.unique_ground_state:
            raise DomainError(
                f"stabilizer code in {path} leaves the ground space degenerate "
                f"({len(code.generators)} generators on {code.n_qubits} qubits)"
            )
        h = build_stabilizer_hamiltonian(code)
        if cfg.partition is not None and cfg.partition != tuple(range(h.n_qubits)):
            h = permute_pauli_sum(h, cfg.partition)
    else:
        assert cfg.hamiltonian_file is not None
        path = resolve_data_path(cfg.hamiltonian_file, base_dir)
        h = load_hamiltonian(path)

    ground_energy, target, gap = dense_ground_state(h)

    a = cfg.ansatz
    if a.family == "schmidt":
        spec = SchmidtAnsatzSpec(
            n=a.n, links=a.links, dist_depth=a.dist_depth, mix_depth=a.mix_depth
        )
        circuit = build_schmidt(spec)
        initial: int | str = 0
    else:
        uspec = UCCSDSpec.full(
            a.n_orbitals, a.electrons, lock_spin_sectors=a.lock_spin_sectors
        )
        circuit, initial = build_ucc_spin_symmetric(uspec)
    keep = tuple(
        range(circuit.n_qubits if cfg.baseline else a.kept_qubits)
    )
    preparations = tuple(
        StatePreparation(circuit=circuit, keep=keep, initial_state=initial)
        for _ in range(cfg.k)
    )
    noise = NoiseModel(p=cfg.noise_p)
    shots = (
        EstimatorConfig(total_shots=cfg.total_shots, seed=cfg.seed)
        if cfg.mode_kind == "shots"
        else None
    )
    problem = VQEProblem(
        hamiltonian=h,
        preparations=preparations,
        noise=noise,
        shots=shots,
        baseline=cfg.baseline,
        target=target,
    )
    return BuiltProblem(
        config=cfg,
        problem=problem,
        optimizer=cfg.optimizer,
        ground_energy=float(ground_energy),
        energy_gap=float(gap),
        zeta=fault_rate(circuit, noise),
    )


def _package_version() -> str:
    try:
        return metadata.version("dmvqem")
    except metadata.PackageNotFoundError:  # pragma: no cover - editable envs
        return "unknown"


def make_manifest(cfg: ExperimentConfig, base_dir: str | None = None) -> dict:
    """Reproducibility record: config hash, seed, versions, data digests."""
    canonical = config_to_dict(cfg)
    blob = json.dumps(canonical, sort_keys=True, separators=(",", ":"))
    data_files = {}
    for ref in (cfg.hamiltonian_file, cfg.stabilizer_file):
        if ref is not None:
            data_files[ref] = _sha256_file(resolve_data_path(ref, base_dir))
    return {
        "config": canonical,
        "config_sha256": hashlib.sha256(blob.encode("utf-8")).hexdigest(),
        "data_files": data_files,
        "seed": cfg.seed,
        "versions": {
            "dmvqem": _package_version(),
            "numpy": np.__version__,
            "python": platform.python_version(),
            "scipy": scipy.__version__,
        },
    }


def write_manifest(cfg: ExperimentConfig, out_dir: str, base_dir: str | None = None) -> str:
    """Write manifest.json under out_dir and return its path."""
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, "manifest.json")
    with open(path, "w", encoding="utf-8") as stream:
        json.dump(make_manifest(cfg, base_dir), stream, indent=2, sort_keys=True)
        stream.write("\n")
    return path

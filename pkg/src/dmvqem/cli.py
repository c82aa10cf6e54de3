"""Command-line entry point for batch experiments.

Subcommands: transform (dump the doubled-register observable blocks),
estimate (exact and sampled expectation side by side), vqe (full
optimization run), analyze bound (shot and gradient bound formulas), and
sweep (vqe repeated over noise strengths or Hamiltonian files).  Every run
directory receives a manifest recording the configuration hash, seed, and
library versions; rerunning a command with the same manifest reproduces
every CSV/JSON output byte for byte.
"""

import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .config import (
    BuiltProblem,
    ExperimentConfig,
    PRESETS,
    build_problem,
    config_to_dict,
    load_config,
    make_manifest,
    parse_config,
    resolve_data_path,
    write_manifest,
)
from .dmv import assemble, exact_expectation
from .errors import DomainError, DmvError
from .estimator import (
    EstimatorConfig,
    breakdown_to_csv,
    estimate_expectation,
    gradient_bound,
    predicted_ratio_mse,
    sampling_bound,
)
from .pauli import load_hamiltonian
from .substitute import dump_transform
from .vqe import ensemble_at, optimize
from .vqe import _initial_point  # deterministic seeded start shared with optimize

DEFAULT_ESTIMATE_SHOTS = 100_000


def _write_json(doc: dict, path: str) -> None:
    with open(path, "w", encoding="utf-8") as stream:
        json.dump(doc, stream, indent=2, sort_keys=True)
        stream.write("\n")


def _resolve_config(args: argparse.Namespace) -> tuple[ExperimentConfig, str | None]:
    """Configuration plus the directory its relative paths resolve against."""
    refs = [r for r in (getattr(args, "config_ref", None), args.config) if r]
    if len(refs) != 1:
        raise DomainError(
            "provide a configuration exactly once, either positionally or "
            "via --config"
        )
    ref = refs[0]
    overrides: dict = {}
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    if getattr(args, "out", None) is not None:
        overrides["out_dir"] = args.out
    if os.path.isfile(ref):
        base_dir = os.path.dirname(os.path.abspath(ref))
        cfg = load_config(ref)
        if overrides:
            doc = config_to_dict(cfg)
            doc.update(overrides)
            cfg = parse_config(doc, base_dir=base_dir)
        return cfg, base_dir
    if ref in PRESETS:
        return parse_config({"preset": ref, **overrides}), None
    raise DomainError(
        f"configuration {ref!r} is neither a file nor a preset "
        f"(registry: {', '.join(sorted(PRESETS))})"
    )


def _summary(built: BuiltProblem, trace) -> dict:
    cfg = built.config
    last = trace.records[-1]
    purities = [float(v) for v in last.purities]
    return {
        "final_cost": float(last.cost),
        "fidelity": None if last.fidelity is None else float(last.fidelity),
        "ground_energy": built.ground_energy,
        "energy_gap": built.energy_gap,
        "cost_error": float(last.cost) - built.ground_energy,
        "zeta": built.zeta,
        "purities": purities,
        "purity_min": min(purities),
        "purity_median": float(np.median(purities)),
        "purity_max": max(purities),
        "iterations": last.iteration,
        "shots_spent": last.shots_spent,
        "k": cfg.k,
        "baseline": cfg.baseline,
        "mode": cfg.mode_kind,
        "noise_p": cfg.noise_p,
        "config_sha256": make_manifest(cfg)["config_sha256"],
    }


def _run_vqe(cfg: ExperimentConfig, base_dir: str | None) -> tuple[dict, str]:
    built = build_problem(cfg, base_dir)
    trace = optimize(built.problem, built.optimizer)
    out_dir = cfg.out_dir
    os.makedirs(out_dir, exist_ok=True)
    trace.to_csv(os.path.join(out_dir, "trace.csv"))
    last = trace.records[-1]
    _write_json(
        {"cost": float(last.cost), "parameters": [float(v) for v in last.params]},
        os.path.join(out_dir, "params.json"),
    )
    summary = _summary(built, trace)
    _write_json(summary, os.path.join(out_dir, "summary.json"))
    write_manifest(cfg, out_dir, base_dir)
    return summary, out_dir


def cmd_transform(args: argparse.Namespace) -> int:
    path = resolve_data_path(args.hamiltonian)
    doc = dump_transform(load_hamiltonian(path))
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as stream:
            stream.write(text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def cmd_vqe(args: argparse.Namespace) -> int:
    cfg, base_dir = _resolve_config(args)
    summary, out_dir = _run_vqe(cfg, base_dir)
    fid = summary["fidelity"]
    fid_text = "n/a" if fid is None else f"{fid:.6f}"
    print(
        f"final cost {summary['final_cost']:.9f}  fidelity {fid_text}  "
        f"zeta {summary['zeta']:.4f}  outputs in {out_dir}"
    )
    return 0


def cmd_estimate(args: argparse.Namespace) -> int:
    cfg, base_dir = _resolve_config(args)
    if cfg.baseline:
        raise DomainError(
            "estimate works on ensemble problems; baseline mode has no "
            "doubled-register estimator"
        )
    built = build_problem(cfg, base_dir)
    problem = built.problem
    if args.params:
        with open(args.params, "r", encoding="utf-8") as stream:
            loaded = json.load(stream)
        values = loaded["parameters"] if isinstance(loaded, dict) else loaded
        x = np.asarray(values, dtype=np.float64)
        if x.shape != (problem.n_parameters,):
            raise DomainError(
                f"parameter file carries {x.size} values, problem needs "
                f"{problem.n_parameters}"
            )
    else:
        rng = np.random.default_rng([cfg.seed, 0])
        x = _initial_point(problem, built.optimizer, rng)
    ens = ensemble_at(problem, x)
    exact = exact_expectation(ens, problem.hamiltonian)
    shots = cfg.total_shots or DEFAULT_ESTIMATE_SHOTS
    est_cfg = EstimatorConfig(total_shots=shots, seed=cfg.seed)
    sampled, breakdown = estimate_expectation(ens, problem.hamiltonian, est_cfg)
    mse = predicted_ratio_mse(ens, problem.hamiltonian, est_cfg)
    out_dir = cfg.out_dir
    os.makedirs(out_dir, exist_ok=True)
    doc = {
        "exact": float(exact),
        "sampled": float(sampled),
        "absolute_error": abs(float(exact) - float(sampled)),
        "predicted_rmse": math.sqrt(mse),
        "total_shots": shots,
        "zeta": built.zeta,
        "ground_energy": built.ground_energy,
        "parameters": [float(v) for v in x],
    }
    _write_json(doc, os.path.join(out_dir, "estimate.json"))
    breakdown_to_csv(breakdown, os.path.join(out_dir, "breakdown.csv"))
    if args.dump_states:
        psi = assemble(ens)
        with open(
            os.path.join(out_dir, "state.csv"), "w", encoding="utf-8", newline=""
        ) as stream:
            writer = csv.writer(stream)
            writer.writerow(["index", "re", "im"])
            for idx, amp in enumerate(psi.amplitudes):
                writer.writerow([idx, repr(float(amp.real)), repr(float(amp.imag))])
    write_manifest(cfg, out_dir, base_dir)
    print(
        f"exact {doc['exact']:.9f}  sampled {doc['sampled']:.9f}  "
        f"error {doc['absolute_error']:.3e}  shots {shots}  outputs in {out_dir}"
    )
    return 0


def cmd_analyze_bound(args: argparse.Namespace) -> int:
    if args.eps is None and args.eta is None:
        raise DomainError(
            "provide --eps for the shot-count bound and/or --eta for the "
            "gradient bound"
        )
    h = load_hamiltonian(resolve_data_path(args.hamiltonian))
    doc: dict = {
        "hamiltonian": args.hamiltonian,
        "links": args.links,
        "k": args.k,
    }
    if args.eps is not None:
        if args.zeta is None:
            raise DomainError("the shot-count bound needs --zeta")
        shots = sampling_bound(args.zeta, args.links, args.k, args.eps, h)
        doc["zeta"] = args.zeta
        doc["eps"] = args.eps
        doc["shots_sufficient"] = shots
        doc["shots_sufficient_ceil"] = int(math.ceil(shots))
    if args.eta is not None:
        doc["eta"] = args.eta
        doc["gradient_bound"] = gradient_bound(args.links, args.k, h, args.eta)
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as stream:
            stream.write(text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def _sweep_axis(args: argparse.Namespace) -> tuple[str, list]:
    if (args.noise is None) == (args.hamiltonians is None):
        raise DomainError(
            "provide exactly one sweep axis: --noise or --hamiltonians"
        )
    if args.noise is not None:
        try:
            values = [float(v) for v in args.noise.split(",") if v.strip()]
        except ValueError as exc:
            raise DomainError(f"bad --noise list: {exc}") from None
        if not values:
            raise DomainError("--noise list is empty")
        return "noise_p", values
    files = [v.strip() for v in args.hamiltonians.split(",") if v.strip()]
    if not files:
        raise DomainError("--hamiltonians list is empty")
    return "hamiltonian_file", files


def cmd_sweep(args: argparse.Namespace) -> int:
    cfg, base_dir = _resolve_config(args)
    axis, values = _sweep_axis(args)
    base_doc = config_to_dict(cfg)
    sweep_dir = cfg.out_dir
    os.makedirs(sweep_dir, exist_ok=True)

    def point_config(index: int, value) -> ExperimentConfig:
        doc = json.loads(json.dumps(base_doc))
        if axis == "noise_p":
            doc["noise_p"] = value
        else:
            doc["problem"].pop("stabilizer_file", None)
            doc["problem"].pop("partition", None)
            doc["problem"]["hamiltonian_file"] = value
        doc["out_dir"] = os.path.join(sweep_dir, f"point_{index}")
        return parse_config(doc, base_dir=base_dir)

    configs = [point_config(i, v) for i, v in enumerate(values)]

    def run(indexed: tuple[int, ExperimentConfig]) -> tuple[int, dict]:
        index, point_cfg = indexed
        summary, _ = _run_vqe(point_cfg, base_dir)
        return index, summary

    threads = max(1, args.threads)
    if threads == 1:
        results = [run(pair) for pair in enumerate(configs)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, enumerate(configs)))
    results.sort(key=lambda pair: pair[0])

    table = os.path.join(sweep_dir, "sweep.csv")
    with open(table, "w", encoding="utf-8", newline="") as stream:
        writer = csv.writer(stream)
        writer.writerow(
            [
                "index",
                axis,
                "final_cost",
                "fidelity",
                "zeta",
                "purity_min",
                "purity_median",
                "purity_max",
                "ground_energy",
                "iterations",
                "shots_spent",
            ]
        )
        for index, summary in results:
            fid = summary["fidelity"]
            writer.writerow(
                [
                    index,
                    values[index] if axis != "noise_p" else repr(values[index]),
                    repr(summary["final_cost"]),
                    "" if fid is None else repr(fid),
                    repr(summary["zeta"]),
                    repr(summary["purity_min"]),
                    repr(summary["purity_median"]),
                    repr(summary["purity_max"]),
                    repr(summary["ground_energy"]),
                    summary["iterations"],
                    summary["shots_spent"],
                ]
            )
    fidelities = [s["fidelity"] for _, s in results]
    if all(f is not None for f in fidelities):
        nonincreasing = all(
            fidelities[i + 1] <= fidelities[i] + 1e-12
            for i in range(len(fidelities) - 1)
        )
        trend = " -> ".join(f"{f:.6f}" for f in fidelities)
        print(
            f"fidelity over {len(values)} points: {trend}  "
            f"(monotone nonincreasing: {'yes' if nonincreasing else 'no'})"
        )
    write_manifest(cfg, sweep_dir, base_dir)
    print(f"wrote {table}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dmvqem",
        description=(
            "Density-matrix vectorization experiments: transform observables "
            "onto the doubled register, estimate expectations, and run "
            "variational optimizations."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_config_options(p: argparse.ArgumentParser) -> None:
        p.add_argument(
            "config_ref",
            nargs="?",
            help="configuration file or preset name",
        )
        p.add_argument("--config", help="configuration file or preset name")
        p.add_argument("--seed", type=int, help="override the configured seed")
        p.add_argument("--out", help="override the configured output directory")

    p_transform = sub.add_parser(
        "transform",
        help="emit the doubled-register blocks and rotation circuits",
    )
    p_transform.add_argument(
        "hamiltonian", help="Hamiltonian JSON file (pkg: refs allowed)"
    )
    p_transform.add_argument("--out", help="write JSON here instead of stdout")
    p_transform.set_defaults(func=cmd_transform)

    p_estimate = sub.add_parser(
        "estimate", help="exact and sampled expectation side by side"
    )
    add_config_options(p_estimate)
    p_estimate.add_argument(
        "--params", help="JSON file with the parameter vector to evaluate"
    )
    p_estimate.add_argument(
        "--dump-states",
        action="store_true",
        help="also write the assembled state amplitudes as CSV",
    )
    p_estimate.set_defaults(func=cmd_estimate)

    p_vqe = sub.add_parser("vqe", help="full variational optimization run")
    add_config_options(p_vqe)
    p_vqe.set_defaults(func=cmd_vqe)

    p_analyze = sub.add_parser("analyze", help="closed-form resource bounds")
    analyze_sub = p_analyze.add_subparsers(dest="analysis", required=True)
    p_bound = analyze_sub.add_parser(
        "bound", help="shot-count and gradient-magnitude bounds"
    )
    p_bound.add_argument("--zeta", type=float, help="circuit fault rate")
    p_bound.add_argument(
        "--L", dest="links", type=int, required=True, help="Schmidt links"
    )
    p_bound.add_argument(
        "--K", dest="k", type=int, required=True, help="ensemble size"
    )
    p_bound.add_argument("--eps", type=float, help="target precision")
    p_bound.add_argument("--eta", type=float, help="per-state derivative scale")
    p_bound.add_argument(
        "--hamiltonian",
        default="pkg:h2_sto3g.json",
        help="observable file (default: bundled molecular Hamiltonian)",
    )
    p_bound.add_argument("--out", help="write JSON here instead of stdout")
    p_bound.set_defaults(func=cmd_analyze_bound)

    p_sweep = sub.add_parser(
        "sweep", help="repeat vqe over noise strengths or Hamiltonian files"
    )
    add_config_options(p_sweep)
    p_sweep.add_argument("--noise", help="comma-separated noise strengths")
    p_sweep.add_argument(
        "--hamiltonians", help="comma-separated Hamiltonian files"
    )
    p_sweep.add_argument(
        "--threads", type=int, default=1, help="parallel sweep points"
    )
    p_sweep.set_defaults(func=cmd_sweep)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return int(args.func(args))
    except DomainError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except DmvError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - last-resort CLI boundary
        print(f"internal error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

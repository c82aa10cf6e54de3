"""Command-line interface: subcommand outputs, config resolution, exit
codes, and byte-stable reruns."""

import json
import os

import pytest

import dmvqem.cli as cli_mod
from dmvqem.cli import main
from dmvqem.errors import InternalCheckError
from dmvqem.estimator import gradient_bound, sampling_bound
from dmvqem.pauli import load_hamiltonian
from dmvqem.config import resolve_data_path


def read_bytes(path: str) -> bytes:
    with open(path, "rb") as stream:
        return stream.read()


def snapshot(out_dir: str) -> dict[str, bytes]:
    found = {}
    for root, _, files in os.walk(out_dir):
        for name in files:
            path = os.path.join(root, name)
            found[os.path.relpath(path, out_dir)] = read_bytes(path)
    return found


# --- transform ---------------------------------------------------------------


def test_transform_to_stdout(capsys):
    assert main(["transform", "pkg:h2_sto3g.json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["qubits_per_copy"] == 2
    assert len(doc["terms"]) == 15
    for term in doc["terms"]:
        assert set(term) == {"coeff", "blocks"}


def test_transform_to_file(tmp_path, capsys):
    out = tmp_path / "transform.json"
    assert main(["transform", "pkg:h2_sto3g.json", "--out", str(out)]) == 0
    assert "wrote" in capsys.readouterr().out
    doc = json.loads(out.read_text())
    assert doc["qubits_per_copy"] == 2


def test_transform_missing_file(capsys):
    assert main(["transform", "/nonexistent/h.json"]) == 1
    assert "not found" in capsys.readouterr().err


# --- vqe ----------------------------------------------------------------------


def test_vqe_preset_run_outputs(tmp_path, capsys):
    out = tmp_path / "run"
    assert main(["vqe", "bell-stabilizer", "--out", str(out)]) == 0
    stdout = capsys.readouterr().out
    assert "final cost" in stdout
    summary = json.loads((out / "summary.json").read_text())
    assert summary["fidelity"] >= 0.999
    assert abs(summary["final_cost"] - summary["ground_energy"]) < 1e-3
    trace_lines = (out / "trace.csv").read_text().splitlines()
    assert trace_lines[0] == "iteration,cost,fidelity,purity_1,shots"
    params = json.loads((out / "params.json").read_text())
    assert set(params) == {"cost", "parameters"}
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["config"]["preset"] == "bell-stabilizer"


def test_vqe_rerun_is_byte_identical(tmp_path):
    out = str(tmp_path / "run")
    assert main(["vqe", "bell-stabilizer", "--out", out]) == 0
    first = snapshot(out)
    assert main(["vqe", "bell-stabilizer", "--out", out]) == 0
    second = snapshot(out)
    assert first.keys() == second.keys()
    for name in first:
        assert first[name] == second[name], name


def test_vqe_seed_override_lands_in_manifest(tmp_path):
    out = tmp_path / "run"
    assert main(["vqe", "bell-stabilizer", "--seed", "9", "--out", str(out)]) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["seed"] == 9
    assert manifest["config"]["seed"] == 9


def test_vqe_accepts_config_file(tmp_path):
    out = tmp_path / "run"
    cfg = {
        "preset": "bell-stabilizer",
        "out_dir": str(out),
        "optimizer": {"max_iterations": 40, "restarts": 1},
    }
    path = tmp_path / "exp.json"
    path.write_text(json.dumps(cfg))
    assert main(["vqe", str(path)]) == 0
    assert (out / "summary.json").exists()


# --- config resolution errors ----------------------------------------------------


def test_unknown_config_ref(capsys):
    assert main(["vqe", "bogus-preset"]) == 1
    err = capsys.readouterr().err
    assert "neither a file nor a preset" in err
    assert "bell-stabilizer" in err


def test_requires_exactly_one_config(capsys):
    assert main(["vqe"]) == 1
    assert "exactly once" in capsys.readouterr().err
    assert main(["vqe", "bell-stabilizer", "--config", "h2"]) == 1
    assert "exactly once" in capsys.readouterr().err


def test_invalid_config_lists_every_violation(tmp_path, capsys):
    path = tmp_path / "exp.json"
    path.write_text(
        json.dumps(
            {
                "problem": {"stabilizer_file": "pkg:bell_stabilizer.json"},
                "ansatz": {"family": "schmidt", "n": 1, "links": 1},
                "k": 0,
                "noise_p": 7,
                "junk": 1,
            }
        )
    )
    assert main(["vqe", str(path)]) == 1
    err = capsys.readouterr().err
    assert "k: must be a positive integer" in err
    assert "noise_p" in err
    assert "junk: unknown key" in err


# --- estimate ----------------------------------------------------------------------


def test_estimate_outputs(tmp_path, capsys):
    out = tmp_path / "est"
    assert main(["estimate", "bell-stabilizer", "--out", str(out), "--dump-states"]) == 0
    assert "sampled" in capsys.readouterr().out
    doc = json.loads((out / "estimate.json").read_text())
    assert set(doc) >= {
        "exact",
        "sampled",
        "absolute_error",
        "predicted_rmse",
        "total_shots",
        "zeta",
        "parameters",
    }
    assert doc["absolute_error"] == pytest.approx(
        abs(doc["exact"] - doc["sampled"]), abs=1e-12
    )
    breakdown = (out / "breakdown.csv").read_text().splitlines()
    assert breakdown[0] == "task_kind,i,j,alpha,shots,re,im,var"
    state = (out / "state.csv").read_text().splitlines()
    assert state[0] == "index,re,im"
    assert len(state) == 1 + 4  # doubled one-qubit register
    assert (out / "manifest.json").exists()


def test_estimate_uses_saved_parameters(tmp_path):
    run = tmp_path / "run"
    assert main(["vqe", "bell-stabilizer", "--out", str(run)]) == 0
    est = tmp_path / "est"
    assert (
        main(
            [
                "estimate",
                "bell-stabilizer",
                "--params",
                str(run / "params.json"),
                "--out",
                str(est),
            ]
        )
        == 0
    )
    doc = json.loads((est / "estimate.json").read_text())
    saved = json.loads((run / "params.json").read_text())
    assert doc["parameters"] == saved["parameters"]
    assert doc["exact"] == pytest.approx(saved["cost"], abs=1e-9)


def test_estimate_rejects_baseline(capsys):
    assert main(["estimate", "h2-baseline"]) == 1
    assert "baseline" in capsys.readouterr().err


def test_estimate_rerun_is_byte_identical(tmp_path):
    out = str(tmp_path / "est")
    assert main(["estimate", "bell-stabilizer", "--out", out]) == 0
    first = snapshot(out)
    assert main(["estimate", "bell-stabilizer", "--out", out]) == 0
    assert snapshot(out) == first


# --- analyze bound --------------------------------------------------------------


def test_analyze_bound_shot_count(capsys):
    rc = main(
        ["analyze", "bound", "--zeta", "0.115", "--L", "1", "--K", "4", "--eps", "0.1"]
    )
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    h = load_hamiltonian(resolve_data_path("pkg:h2_sto3g.json"))
    want = sampling_bound(0.115, 1, 4, 0.1, h)
    assert doc["shots_sufficient"] == pytest.approx(want, rel=1e-12)
    assert doc["shots_sufficient_ceil"] >= doc["shots_sufficient"]


def test_analyze_bound_gradient(capsys):
    rc = main(["analyze", "bound", "--L", "1", "--K", "2", "--eta", "0.5"])
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    h = load_hamiltonian(resolve_data_path("pkg:h2_sto3g.json"))
    assert doc["gradient_bound"] == pytest.approx(
        gradient_bound(1, 2, h, 0.5), rel=1e-12
    )


def test_analyze_bound_needs_a_question(capsys):
    assert main(["analyze", "bound", "--L", "1", "--K", "1"]) == 1
    assert "--eps" in capsys.readouterr().err
    assert main(["analyze", "bound", "--L", "1", "--K", "1", "--eps", "0.1"]) == 1
    assert "--zeta" in capsys.readouterr().err


# --- sweep -----------------------------------------------------------------------


def test_sweep_over_noise(tmp_path, capsys):
    out = str(tmp_path / "sweep")
    rc = main(["sweep", "bell-stabilizer", "--noise", "0.0,0.001", "--out", out])
    assert rc == 0
    stdout = capsys.readouterr().out
    assert "fidelity over 2 points" in stdout
    assert "monotone nonincreasing: yes" in stdout
    lines = (tmp_path / "sweep" / "sweep.csv").read_text().splitlines()
    assert len(lines) == 3
    assert lines[0].startswith("index,noise_p,final_cost,fidelity")
    assert os.path.isdir(os.path.join(out, "point_0"))
    assert os.path.isdir(os.path.join(out, "point_1"))


def test_sweep_threads_match_serial(tmp_path):
    serial = str(tmp_path / "serial")
    threaded = str(tmp_path / "threaded")
    assert main(["sweep", "bell-stabilizer", "--noise", "0.0,0.001", "--out", serial]) == 0
    assert (
        main(
            [
                "sweep",
                "bell-stabilizer",
                "--noise",
                "0.0,0.001",
                "--threads",
                "2",
                "--out",
                threaded,
            ]
        )
        == 0
    )
    a = read_bytes(os.path.join(serial, "sweep.csv"))
    b = read_bytes(os.path.join(threaded, "sweep.csv"))
    assert a == b


def test_sweep_requires_one_axis(capsys):
    assert main(["sweep", "bell-stabilizer"]) == 1
    assert "exactly one sweep axis" in capsys.readouterr().err
    assert (
        main(
            [
                "sweep",
                "bell-stabilizer",
                "--noise",
                "0.1",
                "--hamiltonians",
                "pkg:h2_sto3g.json",
            ]
        )
        == 1
    )


# --- failure containment -----------------------------------------------------------


def test_internal_failure_exits_two(monkeypatch, capsys):
    def boom(h):
        raise InternalCheckError("self-check mismatch")

    monkeypatch.setattr(cli_mod, "dump_transform", boom)
    assert main(["transform", "pkg:h2_sto3g.json"]) == 2
    assert "internal error" in capsys.readouterr().err


def test_unexpected_exception_exits_two(monkeypatch, capsys):
    def boom(h):
        raise RuntimeError("surprise")

    monkeypatch.setattr(cli_mod, "dump_transform", boom)
    assert main(["transform", "pkg:h2_sto3g.json"]) == 2
    assert "internal error" in capsys.readouterr().err

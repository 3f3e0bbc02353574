import json
import os

import numpy as np
import pandas as pd
import pytest

from harness.cli import main
from harness.config import ConfigError, load_config, parse_override
from harness.csv_io import load_config_from_csv, read_trace_csv, trace_frame
from harness.experiment import build_problem, run_experiment
from harness.suite import load_suite, member_configs, run_suite
from harness.theory_report import missing_constants, print_theory, theory_report
from metrics.records import COLUMNS
from problems.io import save_dataset
from problems.logistic import Regularizer

THEORY = {
    "theory.theta_R": 0.5,
    "theory.theta_C": 0.5,
    "theory.delta_R2": 2.0,
    "theory.delta_C2": 2.0,
    "theory.C": 0.1,
    "theory.delta": 0.5,
}


def write_suite(directory, base_name, body):
    path = directory / "suite.yaml"
    path.write_text(f"base: {base_name}\n" + body)
    return path


def test_load_config(tiny_config_path):
    config = load_config(str(tiny_config_path))
    assert config.experiment.name == "tiny"
    assert config.algorithm.x_compressor.kind == "inf_norm_quant"
    assert config.algorithm.schedule.a == 0.9
    assert config.theory is None


def test_validation_error_reports_line(tmp_path):
    path = tmp_path / "bad.yaml"
    path.write_text("experiment:\n  name: bad\nalgorithm:\n  gamma_x: 3.0\n")
    with pytest.raises(ConfigError) as info:
        load_config(str(path))
    assert f"{path}:4: algorithm.gamma_x" in str(info.value)


def test_unknown_key_and_yaml_errors(tmp_path):
    path = tmp_path / "bad.yaml"
    path.write_text("experiment:\n  nmae: typo\n")
    with pytest.raises(ConfigError, match="nmae"):
        load_config(str(path))
    path.write_text("experiment: [unclosed\n")
    with pytest.raises(ConfigError, match="YAML parse error"):
        load_config(str(path))
    with pytest.raises(FileNotFoundError):
        load_config(str(tmp_path / "missing.yaml"))


def test_overrides(tiny_config_path):
    config = load_config(str(tiny_config_path), {"algorithm.gamma_x": 0.3, "experiment.seed": 9})
    assert config.algorithm.gamma_x == 0.3
    assert config.experiment.seed == 9
    assert parse_override("algorithm.step_size=[0.1, 0.2]") == ("algorithm.step_size", [0.1, 0.2])
    assert parse_override("graph.edge_list=null") == ("graph.edge_list", None)
    with pytest.raises(ConfigError):
        parse_override("algorithm.gamma_x")


def test_mode_and_problem_cross_checks(tiny_config_path):
    with pytest.raises(ConfigError):
        load_config(str(tiny_config_path), {"problem.regularizer": "nonconvex"})
    with pytest.raises(ConfigError):
        load_config(str(tiny_config_path), {"problem.rho": 0.0})
    with pytest.raises(ConfigError):
        load_config(str(tiny_config_path), {"algorithm.step_size": [0.1, 0.1]})
    config = load_config(
        str(tiny_config_path), {"experiment.mode": "nonconvex_gradnorm", "problem.regularizer": "nonconvex"}
    )
    assert config.problem.regularizer == Regularizer.NONCONVEX


def test_dataset_must_match_config(tiny_config_path, tmp_path, small_problem):
    path = str(tmp_path / "small.bin")
    save_dataset(small_problem, path)
    loaded = build_problem(load_config(str(tiny_config_path), {"problem.dataset": path}))
    np.testing.assert_array_equal(loaded.features, small_problem.features)
    with pytest.raises(ConfigError, match="rho"):
        build_problem(load_config(str(tiny_config_path), {"problem.dataset": path, "problem.rho": 0.2}))
    nonconvex = {
        "problem.dataset": path,
        "experiment.mode": "nonconvex_gradnorm",
        "problem.regularizer": "nonconvex",
    }
    with pytest.raises(ConfigError, match="regularizer"):
        build_problem(load_config(str(tiny_config_path), nonconvex))


def test_run_writes_csv_with_embedded_config(tiny_config_path, tmp_path):
    config = load_config(str(tiny_config_path))
    result = run_experiment(config, out_dir=str(tmp_path / "a"))
    assert result.status == 0
    assert result.svg_path is None

    with open(result.csv_path) as f:
        lines = f.read().splitlines()
    first_row = next(i for i, line in enumerate(lines) if not line.startswith("#"))
    assert lines[first_row] == ",".join(COLUMNS)
    assert len(lines) - first_row - 1 == 13

    embedded, df = read_trace_csv(result.csv_path)
    assert embedded["experiment"]["name"] == "tiny"
    assert df["k"].tolist() == list(range(0, 61, 5))
    assert (df["residual"] > 0).all()
    assert df["bits"].is_monotonic_increasing


def test_csv_regenerates_identical_run(tiny_config_path, tmp_path):
    first = run_experiment(load_config(str(tiny_config_path)), out_dir=str(tmp_path / "a"))
    config = load_config_from_csv(first.csv_path)
    assert config == load_config(str(tiny_config_path))
    second = run_experiment(config, out_dir=str(tmp_path / "b"))
    with open(first.csv_path, "rb") as a, open(second.csv_path, "rb") as b:
        assert a.read() == b.read()


def test_svg_is_deterministic(tiny_config_path, tmp_path):
    config = load_config(str(tiny_config_path))
    a = run_experiment(config, out_dir=str(tmp_path / "a"), svg=True)
    b = run_experiment(config, out_dir=str(tmp_path / "b"), svg=True)
    with open(a.svg_path, "rb") as fa, open(b.svg_path, "rb") as fb:
        content = fa.read()
        assert content == fb.read()
    assert content.lstrip().startswith(b"<?xml")


def test_diverged_run_keeps_partial_trace(tiny_config_path, tmp_path):
    config = load_config(
        str(tiny_config_path),
        {
            "algorithm.step_size": 1e300,
            "algorithm.x_compressor": {"kind": "identity"},
            "algorithm.y_compressor": {"kind": "identity"},
            "algorithm.record_every": 1,
        },
    )
    result = run_experiment(config, out_dir=str(tmp_path))
    assert result.status == 1
    assert os.path.exists(result.checkpoint_path)
    _, df = read_trace_csv(result.csv_path)
    assert len(df) == len(result.trace) >= 1


def test_suite_of_one_matches_single_run(tiny_config_path, tmp_path):
    suite_path = write_suite(tiny_config_path.parent, tiny_config_path.name, "members:\n  - name: only\n")
    suite, base = load_suite(str(suite_path))
    status, results = run_suite(suite, base, out_dir=str(tmp_path / "suite"), svg=False, n_jobs=1)
    assert status == 0
    single = run_experiment(base, out_dir=str(tmp_path / "single"))
    pd.testing.assert_frame_equal(trace_frame(results[0].trace), trace_frame(single.trace))
    assert os.path.exists(tmp_path / "suite" / "only.csv")


def test_suite_rejects_shared_overrides(tiny_config_path):
    body = "members:\n  - name: bad\n    overrides:\n      graph.seed: 4\n"
    suite_path = write_suite(tiny_config_path.parent, tiny_config_path.name, body)
    with pytest.raises(ConfigError, match="graph.seed"):
        load_suite(str(suite_path))


def test_suite_outputs_and_worker_count_independence(tiny_config_path, tmp_path):
    body = (
        "members:\n"
        "  - name: qn\n"
        "  - name: exact\n"
        "    overrides:\n"
        "      algorithm.x_compressor: {kind: identity}\n"
        "      algorithm.y_compressor: {kind: identity}\n"
        "seeds: [1, 2]\n"
    )
    suite_path = write_suite(tiny_config_path.parent, tiny_config_path.name, body)
    suite, base = load_suite(str(suite_path))
    status, results = run_suite(suite, base, out_dir=str(tmp_path / "one"), svg=True, n_jobs=1)
    assert status == 0
    assert [r.name for r in results] == ["qn_seed1", "qn_seed2", "exact_seed1", "exact_seed2"]
    run_suite(suite, base, out_dir=str(tmp_path / "two"), svg=False, n_jobs=2)

    for name in ("comparison.csv", "summary.csv", "qn_seed2.csv"):
        with open(tmp_path / "one" / name, "rb") as a, open(tmp_path / "two" / name, "rb") as b:
            assert a.read() == b.read(), name

    summary = pd.read_csv(tmp_path / "one" / "summary.csv")
    assert summary["member"].tolist() == ["qn", "exact"]
    assert {"final_residual_seed1", "final_residual_seed2", "final_residual_mean", "bits_mean"} <= set(summary.columns)
    assert not summary["diverged"].any()
    exact, qn = summary.set_index("member").loc[["exact", "qn"], "bits_mean"]
    assert exact > qn

    comparison = pd.read_csv(tmp_path / "one" / "comparison.csv")
    assert list(comparison.columns) == ["member", "seed"] + COLUMNS
    assert os.path.exists(tmp_path / "one" / "overlay.svg")


def test_theory_report_requires_constants(tiny_config_path):
    config = load_config(str(tiny_config_path))
    assert missing_constants(config) == ["theta_R", "theta_C", "delta_R2", "delta_C2", "C", "delta"]
    status, text = theory_report(config)
    assert status == 1
    assert "Missing theory constants: theta_R" in text


def test_theory_report_with_constants(tiny_config_path):
    config = load_config(str(tiny_config_path), THEORY)
    status, text = theory_report(config, suggest=True)
    assert status == 0
    assert "Suggested norm constants" in text
    assert "lambda_hat" in text
    assert "Inside guaranteed region: no" in text
    assert "sigma2, sigma2_r missing" in text


def test_cli_run_and_overrides(tiny_config_path, tmp_path):
    out = tmp_path / "cli"
    assert main(["run", "--config", str(tiny_config_path), "--out", str(out), "--seed", "5", "--svg", "on"]) == 0
    embedded, _ = read_trace_csv(str(out / "tiny.csv"))
    assert embedded["experiment"]["seed"] == 5
    assert (out / "tiny.svg").exists()
    assert main(["run", "--config", str(tiny_config_path), "--set", "algorithm.gamma_x=5"]) == 1
    assert main(["run", "--config", str(tmp_path / "nope.yaml")]) == 1


def test_cli_rejects_malformed_inputs(tiny_config_path, tmp_path):
    edges = tmp_path / "bad_edges.txt"
    edges.write_text("3\n0 1\n1 2\n0 1 x\n")
    args = ["run", "--config", str(tiny_config_path), "--out", str(tmp_path / "bad")]
    assert main(args + ["--set", f"graph.edge_list={edges}", "--set", "problem.n=3"]) == 1
    dataset = tmp_path / "bad.bin"
    dataset.write_bytes(b"NOTADATA" + bytes(64))
    assert main(args + ["--set", f"problem.dataset={dataset}"]) == 1


def test_cli_theory_exit_codes(tiny_config_path):
    assert main(["theory", "--config", str(tiny_config_path)]) == 1
    args = ["theory", "--config", str(tiny_config_path)]
    for key, value in THEORY.items():
        args += ["--set", f"{key}={value}"]
    assert main(args) == 0


def test_cli_estimate_compressor(tiny_config_path, tmp_path):
    out = tmp_path / "est"
    code = main([
        "estimate-compressor", "--config", str(tiny_config_path), "--out", str(out), "--samples", "1000", "--chain", "y",
    ])
    assert code == 0
    with open(out / "compression_constants.json") as f:
        payload = json.load(f)
    assert payload["label"] == "qn2"
    assert payload["dim"] == 6
    assert payload["sample_count"] >= 1000
    assert np.isfinite(payload["C_hat"])


def test_print_theory_writes_report(tiny_config_path, capsys):
    assert print_theory(load_config(str(tiny_config_path))) == 1
    assert "Theory report: tiny" in capsys.readouterr().out


def test_cli_suite(tiny_config_path, tmp_path):
    suite_path = write_suite(tiny_config_path.parent, tiny_config_path.name, "members:\n  - name: a\n  - name: b\n")
    out = tmp_path / "cli_suite"
    assert main(["suite", "--config", str(suite_path), "--out", str(out), "--svg", "off"]) == 0
    assert (out / "summary.csv").exists()
    assert not (out / "overlay.svg").exists()


CONFIGS = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "configs")


@pytest.mark.parametrize("name", ["compressor_comparison", "scaling_ablation", "seed_sweep"])
def test_shipped_suites_validate(name):
    suite, base = load_suite(os.path.join(CONFIGS, f"{name}.yaml"))
    assert member_configs(suite, base)


def test_compressor_comparison_covers_fixed_level():
    suite, base = load_suite(os.path.join(CONFIGS, "compressor_comparison.yaml"))
    labels = {name: config.algorithm.x_compressor.label() for name, _, config in member_configs(suite, base)}
    assert labels == {"identity": "identity", "qn": "qn2", "qtn": "qn2.top5", "fixed_level": "fixed1c1"}
    fixed = [config for name, _, config in member_configs(suite, base) if name == "fixed_level"][0]
    assert fixed.algorithm.y_compressor.label() == "fixed1c1"
    assert fixed.algorithm.schedule.a < 1.0


def test_nonconvex_desk_instance_has_stationary_point_in_convex_region():
    _, base = load_suite(os.path.join(CONFIGS, "seed_sweep.yaml"))
    problem = build_problem(base)
    assert problem.regularizer == Regularizer.NONCONVEX
    x = np.zeros(problem.dim)
    step = 1.0 / problem.lipschitz_bound()
    for _ in range(1000):
        x = x - step * problem.global_gradient(x)
    assert np.linalg.norm(problem.global_gradient(x)) < 1e-10
    assert np.max(np.abs(x)) < 1.0 / np.sqrt(3.0)

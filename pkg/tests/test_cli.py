import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from netred.cli import EXIT_INVALID, EXIT_OK, EXIT_SUITE_FAILED, main, parse_s0_grid
from netred.dynamics import network_to_json
from netred.errors import InvalidConfig
from netred.graph import BlockModelParams, build_block_laplacian, laplacian_from_adjacency
from netred.dynamics import NetworkModel, GeneratorParams, generator_tf
from netred.polyrat import integrator


@pytest.fixture(scope="module")
def synthetic_model(tmp_path_factory):
    d = tmp_path_factory.mktemp("gen")
    assert main(["generate", "--seed", "4", "-o", str(d / "net.json")]) == EXIT_OK
    return d / "net.json"


def write_model(path, net):
    path.write_text(json.dumps(network_to_json(net)))
    return path


class TestGenerate:
    def test_default_config(self, synthetic_model):
        obj = json.loads(synthetic_model.read_text())
        assert len(obj["nodes"]) == 50
        assert all(set(n["gen"]) == {"m", "d", "r", "tau"} for n in obj["nodes"])
        assert obj["meta"]["planted"]["group_a"] == list(range(30))
        assert obj["f"] == {"num": [1.0], "den": [0.0, 1.0]}

    def test_byte_identical(self, tmp_path, synthetic_model):
        assert main(["generate", "--seed", "4", "-o", str(tmp_path / "again.json")]) == EXIT_OK
        assert (tmp_path / "again.json").read_bytes() == synthetic_model.read_bytes()

    def test_p_equals_q_still_generates(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"wsbm": {"p": 0.3, "q": 0.3}}))
        assert main(["generate", "--config", str(cfg), "-o", str(tmp_path / "n.json")]) == EXIT_OK

    def test_invalid_config(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"generator_ranges": {"m": [0.5, 0.05]}}))
        assert main(["generate", "--config", str(cfg), "-o", str(tmp_path / "n.json")]) == EXIT_INVALID
        assert "generator_ranges.m" in capsys.readouterr().err


class TestPipeline:
    def test_synthetic_model(self, tmp_path, synthetic_model):
        out = tmp_path / "out"
        assert main(["pipeline", str(synthetic_model), "--out-dir", str(out)]) == EXIT_OK
        for name in ("partition.json", "reduced.json", "response.csv", "report.json", "response.png"):
            assert (out / name).exists()
        rep = json.loads((out / "report.json").read_text())
        assert rep["schema_version"] == 1
        assert rep["partition_mismatch"] == 0
        assert len(rep["theorem1"]) == 12
        assert all(e["holds"] for e in rep["theorem1"])
        for key in ("lambda2", "lambda3", "rms", "steady_state", "theorem2_max_relative_residual"):
            assert key in rep
        with open(out / "response.csv") as fh:
            header = next(csv.reader(fh))
        assert header[-4:] == ["yhat_a", "yhat_b", "mean_a", "mean_b"]

    def test_reproducible(self, tmp_path, synthetic_model):
        args = ["pipeline", str(synthetic_model), "--t-final", "3", "--no-plot"]
        assert main(args + ["--out-dir", str(tmp_path / "a")]) == EXIT_OK
        assert main(args + ["--out-dir", str(tmp_path / "b")]) == EXIT_OK
        for name in ("partition.json", "reduced.json", "response.csv", "report.json"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_disconnected_cliques(self, tmp_path):
        A = np.zeros((5, 5))
        A[:3, :3] = 1.0
        A[3:, 3:] = 1.0
        g = generator_tf(GeneratorParams(0.2, 0.3, 7.0, 5.0))
        model = write_model(tmp_path / "m.json", NetworkModel((g,) * 5, integrator(), laplacian_from_adjacency(A)))
        assert main(["pipeline", str(model), "--out-dir", str(tmp_path / "o"), "--t-final", "2", "--no-plot"]) == 0
        rep = json.loads((tmp_path / "o" / "report.json").read_text())
        part = json.loads((tmp_path / "o" / "partition.json").read_text())
        assert abs(rep["lambda2"]) < 1e-12 and rep["l_hat_weight"] == pytest.approx(0.0, abs=1e-12)
        assert {tuple(part["group_a"]), tuple(part["group_b"])} == {(0, 1, 2), (3, 4)}

    def test_block_model_theorem2_residual(self, tmp_path):
        rng = np.random.default_rng(1)
        nodes = tuple(generator_tf(GeneratorParams(rng.uniform(0.05, 0.5), rng.uniform(0.2, 0.5),
                                                   rng.uniform(5, 10), rng.uniform(2, 10))) for _ in range(9))
        net = NetworkModel(nodes, integrator(), build_block_laplacian(BlockModelParams(5, 4, 3.0, 0.5)))
        model = write_model(tmp_path / "m.json", net)
        grid = "0.1+1j,0.5-2j,1+0.3j"
        assert main(["pipeline", str(model), "--out-dir", str(tmp_path / "o"), "--s0-grid", grid,
                     "--t-final", "2", "--no-plot"]) == EXIT_OK
        rep = json.loads((tmp_path / "o" / "report.json").read_text())
        assert rep["theorem2_max_relative_residual"] <= 1e-8
        assert [e["s0"] for e in rep["theorem1"]] == [[0.1, 1.0], [0.5, -2.0], [1.0, 0.3]]

    def test_malformed_file_has_line_context(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text('{\n  "f": {"num": [1], "den": [0, 1]},\n  "nodes": [,]\n}\n')
        assert main(["pipeline", str(bad), "--out-dir", str(tmp_path / "o")]) == EXIT_INVALID
        assert "bad.json:3:" in capsys.readouterr().err

    def test_missing_file(self, tmp_path):
        assert main(["pipeline", str(tmp_path / "nope.json")]) == EXIT_INVALID


class TestSmallCommands:
    def test_cluster_reduce_simulate(self, tmp_path, synthetic_model):
        part, red, csv_path = tmp_path / "p.json", tmp_path / "r.json", tmp_path / "resp.csv"
        assert main(["cluster", str(synthetic_model), "-o", str(part)]) == EXIT_OK
        assert main(["reduce", str(synthetic_model), "--partition", str(part), "-o", str(red)]) == EXIT_OK
        assert main(["simulate", str(synthetic_model), "--reduced", str(red), "-o", str(csv_path),
                     "--t-final", "1", "--plot"]) == EXIT_OK
        assert csv_path.exists() and csv_path.with_suffix(".png").exists()
        rm = json.loads(red.read_text())
        assert set(rm) == {"partition", "g_hat_a", "g_hat_b", "l_hat_weight", "f"}

    def test_bad_node(self, tmp_path, synthetic_model):
        assert main(["simulate", str(synthetic_model), "--node", "99", "-o", str(tmp_path / "x.csv")]) == EXIT_INVALID


class TestValidate:
    def test_thm2(self, capsys):
        assert main(["validate", "thm2", "--trials", "5"]) == EXIT_OK
        rep = json.loads(capsys.readouterr().out)
        assert rep["failures"] == 0 and rep["trials"] == 5 and rep["schema_version"] == 1
        assert {"min", "median", "max"} <= set(rep["slack"])

    def test_report_file_reproducible(self, tmp_path):
        for name in ("a", "b"):
            assert main(["validate", "spectrum", "--trials", "20", "--seed", "9", "-o", str(tmp_path / name)]) == 0
        assert (tmp_path / "a").read_bytes() == (tmp_path / "b").read_bytes()

    def test_unknown_suite(self):
        assert main(["validate", "nope"]) == EXIT_INVALID

    def test_bad_delta(self):
        assert main(["validate", "prop1", "--delta", "2"]) == EXIT_INVALID

    def test_failure_exit_code(self, monkeypatch, capsys):
        import netred.cli as cli

        monkeypatch.setattr(cli, "run_suite", lambda *a, **k: {"passed": False, "failures": 1})
        assert main(["validate", "thm1"]) == EXIT_SUITE_FAILED


def test_s0_grid_parsing():
    assert parse_s0_grid("0+1j,2-0.5j,3") == (1j, 2 - 0.5j, 3 + 0j)
    assert len(parse_s0_grid(None)) == 12
    with pytest.raises(InvalidConfig):
        parse_s0_grid("abc")


def test_console_script_entry_point():
    r = subprocess.run([sys.executable, "-m", "netred.cli", "--help"], capture_output=True, text=True)
    assert r.returncode == 0
    assert "pipeline" in r.stdout and "validate" in r.stdout

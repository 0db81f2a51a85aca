import json

import pytest
from click.testing import CliRunner

from nsumkit.cli import main
from nsumkit.reporting import RETRO_HEADER, SIMULATE_HEADER, SWEEP_HEADER


@pytest.fixture
def runner():
    return CliRunner()


def parse_kv(output):
    pairs = {}
    for line in output.strip().splitlines():
        key, value = line.split(None, 1)
        pairs[key] = value
    return pairs


class TestSamplesize:
    def test_worked_example_z2(self, runner):
        result = runner.invoke(main, [
            "samplesize", "--epsilon", "0.1", "--alpha", "0.05",
            "--prevalence", "0.1", "--mean-degree", "10",
            "--population", "10000", "--z2"])
        assert result.exit_code == 0
        kv = parse_kv(result.output)
        assert kv["n"] == "400"
        assert kv["pre_ceiling"] == "399.6"

    def test_exact_quantile(self, runner):
        result = runner.invoke(main, [
            "samplesize", "--epsilon", "0.1", "--alpha", "0.05",
            "--prevalence", "0.1", "--mean-degree", "10",
            "--population", "10000"])
        assert result.exit_code == 0
        assert parse_kv(result.output)["n"] == "384"

    def test_zero_degree_is_usage_error(self, runner):
        result = runner.invoke(main, [
            "samplesize", "--epsilon", "0.1", "--alpha", "0.05",
            "--prevalence", "0.1", "--mean-degree", "0",
            "--population", "10000"])
        assert result.exit_code == 2

    def test_design_effect(self, runner):
        result = runner.invoke(main, [
            "samplesize", "--epsilon", "0.1", "--alpha", "0.05",
            "--prevalence", "0.1", "--mean-degree", "10",
            "--population", "10000", "--z2", "--deff", "2"])
        assert parse_kv(result.output)["n"] == "800"


class TestEstimate:
    def test_constant_sample(self, runner, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("100,10\n" * 100)
        result = runner.invoke(main, [
            "estimate", "--input", str(path), "--population", "1000",
            "--alpha", "0.05"])
        assert result.exit_code == 0
        kv = parse_kv(result.output)
        assert kv["n_hat"] == "100"
        assert kv["variance"] == "9"
        assert float(kv["ci_lo"]) == pytest.approx(100 - 5.88, abs=0.01)
        assert float(kv["ci_hi"]) == pytest.approx(100 + 5.88, abs=0.01)

    def test_zero_hidden_reports(self, runner, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("50,0\n" * 20)
        result = runner.invoke(main, [
            "estimate", "--input", str(path), "--population", "1000",
            "--alpha", "0.05"])
        assert result.exit_code == 0
        kv = parse_kv(result.output)
        assert kv["n_hat"] == "0"
        assert kv["ci_lo"] == "0"
        assert kv["ci_hi"] == "0"

    def test_empty_file(self, runner, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("")
        result = runner.invoke(main, [
            "estimate", "--input", str(path), "--population", "1000",
            "--alpha", "0.05"])
        assert result.exit_code == 2

    def test_malformed_file(self, runner, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("1,2\nx,y\n")
        result = runner.invoke(main, [
            "estimate", "--input", str(path), "--population", "1000",
            "--alpha", "0.05"])
        assert result.exit_code == 2

    def test_degenerate_sample(self, runner, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("0,0\n" * 5)
        result = runner.invoke(main, [
            "estimate", "--input", str(path), "--population", "1000",
            "--alpha", "0.05"])
        assert result.exit_code == 3


class TestSimulate:
    def test_outputs_and_determinism(self, runner, tmp_path):
        config = tmp_path / "sim.json"
        config.write_text(json.dumps({
            "models": ["er"], "M": [300], "q": [0.1], "alpha": [0.05],
            "epsilon": 0.1, "replicates": 20}))
        for out in ("a", "b"):
            result = runner.invoke(main, [
                "simulate", "--config", str(config),
                "--out", str(tmp_path / out), "--seed", "5"])
            assert result.exit_code == 0, result.output
        a = (tmp_path / "a" / "results.csv").read_bytes()
        b = (tmp_path / "b" / "results.csv").read_bytes()
        assert a == b
        header = a.decode().splitlines()[0]
        assert header == ",".join(SIMULATE_HEADER)
        manifest = json.loads((tmp_path / "a" / "manifest.json").read_text())
        assert manifest["seed"] == 5
        assert manifest["outputs"] == ["results.csv"]

    def test_plot_flag_writes_figure(self, runner, tmp_path):
        config = tmp_path / "sim.json"
        config.write_text(json.dumps({
            "models": ["er"], "M": [200], "q": [0.1, 0.3], "alpha": [0.05],
            "epsilon": 0.1, "replicates": 8}))
        result = runner.invoke(main, [
            "simulate", "--config", str(config), "--out", str(tmp_path / "p"),
            "--seed", "5", "--plot"])
        assert result.exit_code == 0, result.output
        assert (tmp_path / "p" / "results.png").exists()

    def test_infeasible_cells_still_exit_zero(self, runner, tmp_path):
        config = tmp_path / "sim.json"
        config.write_text(json.dumps({
            "models": ["ergm"], "M": [5000], "q": [0.1], "alpha": [0.05],
            "epsilon": 0.1, "replicates": 5}))
        result = runner.invoke(main, [
            "simulate", "--config", str(config), "--out", str(tmp_path / "i"),
            "--seed", "5"])
        assert result.exit_code == 0
        lines = (tmp_path / "i" / "results.csv").read_text().splitlines()
        assert lines[1].endswith(",1")  # infeasible flag set
        manifest = json.loads((tmp_path / "i" / "manifest.json").read_text())
        assert "infeasible_cells" in manifest["notes"]

    def test_unreadable_config(self, runner, tmp_path):
        result = runner.invoke(main, [
            "simulate", "--config", str(tmp_path / "missing.json"),
            "--out", str(tmp_path / "x"), "--seed", "1"])
        assert result.exit_code == 2

    def test_invalid_json(self, runner, tmp_path):
        config = tmp_path / "bad.json"
        config.write_text("{not json")
        result = runner.invoke(main, [
            "simulate", "--config", str(config), "--out", str(tmp_path / "x"),
            "--seed", "1"])
        assert result.exit_code == 2


class TestThreads:
    def test_env_fallback(self, runner, tmp_path, monkeypatch):
        config = tmp_path / "sim.json"
        config.write_text(json.dumps({
            "models": ["er"], "M": [200], "q": [0.1], "alpha": [0.05],
            "epsilon": 0.1, "replicates": 5}))
        monkeypatch.setenv("NSUMKIT_THREADS", "2")
        result = runner.invoke(main, [
            "simulate", "--config", str(config), "--out", str(tmp_path / "env"),
            "--seed", "4"])
        assert result.exit_code == 0, result.output
        monkeypatch.delenv("NSUMKIT_THREADS")
        result = runner.invoke(main, [
            "simulate", "--config", str(config), "--out", str(tmp_path / "one"),
            "--seed", "4"])
        assert result.exit_code == 0
        a = (tmp_path / "env" / "results.csv").read_bytes()
        b = (tmp_path / "one" / "results.csv").read_bytes()
        assert a == b  # worker count never changes results


class TestSweep:
    def test_outputs(self, runner, tmp_path):
        config = tmp_path / "sweep.json"
        config.write_text(json.dumps({
            "families": ["sbm_2block"], "deltas": [0.0, 1.0], "M": 300,
            "q": 0.1, "alpha": 0.05, "epsilon": 0.1, "replicates": 10}))
        result = runner.invoke(main, [
            "sweep", "--config", str(config), "--out", str(tmp_path / "s"),
            "--seed", "3"])
        assert result.exit_code == 0, result.output
        lines = (tmp_path / "s" / "sweep.csv").read_text().splitlines()
        assert lines[0] == ",".join(SWEEP_HEADER)
        assert len(lines) == 3
        assert lines[1].startswith("sbm_2block,0,")
        assert lines[2].startswith("sbm_2block,1,")


class TestRetro:
    def test_bundled_fixture_default(self, runner, tmp_path):
        config = tmp_path / "r.json"
        config.write_text(json.dumps({"replicates": 500}))
        result = runner.invoke(main, [
            "retro", "--config", str(config), "--out", str(tmp_path / "r"),
            "--seed", "1"])
        assert result.exit_code == 0, result.output
        lines = (tmp_path / "r" / "retro.csv").read_text().splitlines()
        assert lines[0] == ",".join(RETRO_HEADER)
        assert len(lines) == 8
        assert lines[1].startswith("heroin_nebraska,550,1879321,368,604,0.118,")

    def test_determinism(self, runner, tmp_path):
        config = tmp_path / "r.json"
        config.write_text(json.dumps({"replicates": 400}))
        outputs = []
        for out in ("r1", "r2"):
            result = runner.invoke(main, [
                "retro", "--config", str(config), "--out", str(tmp_path / out),
                "--seed", "9"])
            assert result.exit_code == 0
            outputs.append((tmp_path / out / "retro.csv").read_bytes())
        assert outputs[0] == outputs[1]

    def test_explicit_cases(self, runner, tmp_path):
        config = tmp_path / "r.json"
        config.write_text(json.dumps({
            "cases": [{"name": "toy", "n_study": 100, "population_size": 10000,
                       "published_estimate": 500, "mean_degree": 50.0,
                       "mean_hidden_degree": 2.5}],
            "replicates": 300}))
        result = runner.invoke(main, [
            "retro", "--config", str(config), "--out", str(tmp_path / "t"),
            "--seed", "2"])
        assert result.exit_code == 0, result.output
        lines = (tmp_path / "t" / "retro.csv").read_text().splitlines()
        assert len(lines) == 2
        assert lines[1].startswith("toy,100,10000,500,50,2.5,")


class TestGrid:
    def test_long_format_and_cap(self, runner, tmp_path):
        config = tmp_path / "g.json"
        config.write_text(json.dumps({
            "M": 10000, "q_grid": [0.001, 0.1], "dbar_grid": [1, 10],
            "z2": True}))
        result = runner.invoke(main, [
            "grid", "--config", str(config), "--out", str(tmp_path / "g")])
        assert result.exit_code == 0, result.output
        lines = (tmp_path / "g" / "grid.csv").read_text().splitlines()
        assert lines[0] == "q,d_bar,n"
        assert lines[1] == "0.001,1,10000"
        assert lines[4] == "0.1,10,400"
        values = [int(line.split(",")[2]) for line in lines[1:]]
        assert max(values) <= 10000

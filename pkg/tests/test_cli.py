from __future__ import annotations

import json
import threading

import pytest

from clan.cli.config import ExperimentConfig, parse_config, render_config
from clan.cli.main import EXIT_CHECK, EXIT_CONFIG, EXIT_OK, EXIT_RUN, main
from clan.cli import studies
from clan.neat.config import ConfigError
from clan.neat.serialize import genome_from_bytes, genome_from_json

MINIMAL = "[experiment]\ntopology = serial\nenv = cartpole\n"


def test_minimal_config_defaults():
    cfg = parse_config(MINIMAL)
    assert cfg.neat.population_size == 150
    assert cfg.env_spec.max_steps == 200 and cfg.env_spec.solved_threshold == 195.0


def test_render_parse_round_trip():
    cfg = ExperimentConfig(topology="dda", agents=2, clans=5, env="synthetic", seeds=(1, 2),
                           env_params={"obs_dim": 16, "solved_threshold": float("inf")}).validate()
    assert parse_config(render_config(cfg)) == cfg


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("[neat]\npopulaton_size = 100\n", "populaton_size"),
        ("[experiment]\ntopology = dda\nclans = 200\n", "clans"),
        ("[experiment]\ntopology = ring\n", "topology"),
        ("[experiment]\nmode = batch\n", "mode"),
        ("[env]\nmax_steps = many\n", "max_steps"),
        ("[neat]\np_add_node = 1.5\n", "p_add_node"),
        ("[transport]\nkind = carrier-pigeon\n", "kind"),
        ("[extra]\n", "extra"),
        ("[experiment]\nglobal_respeciation = true\n", "global_respeciation"),
    ],
)
def test_config_errors_name_the_key(text, fragment):
    with pytest.raises(ConfigError, match=fragment):
        parse_config(text)


def _write(tmp_path, text):
    path = tmp_path / "exp.ini"
    path.write_text(text)
    return path


def test_run_writes_deterministic_artifacts(tmp_path, capsys):
    path = _write(tmp_path, "[experiment]\ntopology = dcs\nagents = 2\nmax_generations = 3\nseeds = 1, 2\n"
                            "[env]\nsolved_threshold = inf\n")
    assert main(["run", "--config", str(path), "--out", str(tmp_path / "a")]) == EXIT_OK
    assert main(["run", "--config", str(path), "--out", str(tmp_path / "b")]) == EXIT_OK
    runs = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert runs == ["CLAN_DCS_cartpole_multi_seed1", "CLAN_DCS_cartpole_multi_seed2"]
    for run in runs:
        a, b = tmp_path / "a" / run, tmp_path / "b" / run
        names = sorted(p.name for p in a.iterdir())
        assert names == ["best_genome.bin", "best_genome.json", "config.ini", "generations.csv", "ledger.csv",
                         "ledger.jsonl", "seeds.txt", "summary.json"]
        for name in names:
            if name != "config.ini":  # records its own output directory
                assert (a / name).read_bytes() == (b / name).read_bytes(), name
        summary = json.loads((a / "summary.json").read_text())
        assert summary["generations_run"] == 3 and summary["converged"] is False
        genome, _ = genome_from_bytes((a / "best_genome.bin").read_bytes())
        as_json = genome_from_json((a / "best_genome.json").read_text())
        assert (genome.nodes, genome.connections) == (as_json.nodes, as_json.connections)
        assert as_json.fitness == summary["best_fitness"]
        assert len((a / "generations.csv").read_text().splitlines()) == 4
    assert "seed 2" in capsys.readouterr().out


def test_flag_overrides(tmp_path):
    assert main(["run", "--topology", "dda", "--agents", "2", "--clans", "3", "--mode", "single",
                 "--max-generations", "2", "--seed", "7", "--out", str(tmp_path)]) == EXIT_OK
    summary = json.loads((tmp_path / "CLAN_DDA_cartpole_single_seed7" / "summary.json").read_text())
    assert summary["seed"] == 7 and summary["mode"] == "single"
    assert "clans = 3" in (tmp_path / "CLAN_DDA_cartpole_single_seed7" / "config.ini").read_text()


def test_sockets_transport_runs_on_loopback(tmp_path):
    path = _write(tmp_path, "[experiment]\ntopology = dds\nagents = 2\nmax_generations = 2\n"
                            "[env]\nsolved_threshold = inf\n[transport]\nkind = sockets\ntimeout = 20\n")
    assert main(["run", "--config", str(path), "--out", str(tmp_path / "s")]) == EXIT_OK
    sim_path = _write(tmp_path, path.read_text().replace("kind = sockets", "kind = sim"))
    assert main(["run", "--config", str(sim_path), "--out", str(tmp_path / "m")]) == EXIT_OK
    name = "CLAN_DDS_cartpole_multi_seed1"
    assert (tmp_path / "s" / name / "best_genome.bin").read_bytes() == (tmp_path / "m" / name / "best_genome.bin").read_bytes()


def test_center_and_agent_commands(tmp_path, capsys):
    port = 47613
    path = _write(tmp_path, f"[experiment]\ntopology = dcs\nagents = 1\nmax_generations = 2\n"
                            f"[transport]\nport = {port}\ntimeout = 20\n")
    codes = {}
    t = threading.Thread(target=lambda: codes.setdefault("center", main(
        ["center", "--config", str(path), "--out", str(tmp_path / "c")])))
    t.start()
    codes["agent"] = main(["agent", "--port", str(port), "--agent-id", "1"])
    t.join(60)
    assert codes == {"center": EXIT_OK, "agent": EXIT_OK}
    assert (tmp_path / "c" / "CLAN_DCS_cartpole_multi_seed1" / "summary.json").exists()


def test_center_without_agents_fails(tmp_path):
    path = _write(tmp_path, "[experiment]\ntopology = dcs\nagents = 2\n[transport]\nport = 47614\ntimeout = 0.5\n")
    assert main(["center", "--config", str(path), "--out", str(tmp_path)]) == EXIT_RUN


def test_exit_codes(tmp_path, capsys):
    assert main(["validate-config", str(tmp_path / "missing.ini")]) == EXIT_CONFIG
    bad = _write(tmp_path, "[neat]\npopulaton_size = 10\n")
    assert main(["run", "--config", str(bad)]) == EXIT_CONFIG
    assert "populaton_size" in capsys.readouterr().err
    good = _write(tmp_path, MINIMAL)
    assert main(["validate-config", str(good)]) == EXIT_OK
    assert "population_size = 150" in capsys.readouterr().out
    assert main(["agent", "--port", "1", "--agent-id", "1", "--timeout", "0.2"]) == EXIT_RUN


def test_reproduce_reports_failures(monkeypatch, capsys):
    def failing(out=None, quick=False):
        return studies.StudyReport("fake", [studies.Check("x", "1", "2", False)])

    monkeypatch.setitem(studies.STUDIES, "cost_breakdown", failing)
    assert main(["reproduce", "cost_breakdown"]) == EXIT_CHECK
    assert "[FAIL] x" in capsys.readouterr().out


def test_reproduce_cost_breakdown_quick(tmp_path, capsys):
    assert main(["reproduce", "cost_breakdown", "--quick", "--out", str(tmp_path)]) == EXIT_OK
    assert (tmp_path / "cost_breakdown" / "cost_breakdown.csv").exists()
    assert "result: PASS" in capsys.readouterr().out


def test_clan_trend_check_uses_pooled_error():
    assert studies.clan_trend_check([10, 12, 14], [9, 11, 13]).passed
    assert not studies.clan_trend_check([10, 10, 10], [5, 5, 5]).passed

import json

import pytest

from netlogarch.cli import EXIT_CONFIG, EXIT_DATA, ConfigError, RunConfig, load_config, main


def run(*argv):
    return main([str(a) for a in argv])


@pytest.fixture(scope="module")
def dcc_prices(tmp_path_factory):
    root = tmp_path_factory.mktemp("sim")
    assert run("simulate", "--kind", "dcc", "--n", 3, "--T", 124, "--seed", 2, "--output-dir", root) == 0
    return root / "prices.csv"


def test_simulate_then_fit_net_recovers_parameters(tmp_path, capsys):
    sim = tmp_path / "sim"
    assert run("simulate", "--seed", 3, "--T", 2000, "--output-dir", sim) == 0
    truth = json.loads((sim / "truth.json").read_text())
    assert truth["rho"] == 0.5 and len(truth["gamma"]) == 6
    fit = tmp_path / "fit"
    assert run("fit-net", "--data", sim / "prices.csv", "--weights", sim / "weights.json",
               "--truth", sim / "truth.json", "--seed", 3, "--output-dir", fit) == 0
    assert "Recovery:" in capsys.readouterr().out
    rec = json.loads((fit / "netfit.json").read_text())["given"]["recovery"]
    assert rec["rho_within_2se"]
    assert sum(rec["gamma_within_2se"]) >= 4


def test_describe_writes_table(dcc_prices, tmp_path, capsys):
    assert run("describe", "--data", dcc_prices, "--seed", 1, "--output-dir", tmp_path) == 0
    text = capsys.readouterr().out
    for field in ("Mean", "Median", "Std. Dev.", "Minimum", "Maximum", "Skewness", "Kurtosis", "JB p-value"):
        assert field in text
    stats = json.loads((tmp_path / "describe.json").read_text())
    assert {"statistics", "correlation"} <= set(stats)
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["seed"] == 1 and len(manifest["config_hash"]) == 64
    assert "describe.json" in manifest["artifacts"]


def test_missing_seed_is_config_error(dcc_prices, tmp_path, capsys):
    assert run("describe", "--data", dcc_prices, "--output-dir", tmp_path) == EXIT_CONFIG
    assert "seed" in capsys.readouterr().err


def test_missing_data_file(tmp_path, capsys):
    assert run("describe", "--data", tmp_path / "absent.csv", "--seed", 1, "--output-dir", tmp_path) == EXIT_DATA
    assert "absent.csv" in capsys.readouterr().err


def test_no_data_given_is_config_error(tmp_path):
    assert run("describe", "--seed", 1, "--output-dir", tmp_path) == EXIT_CONFIG


def test_unknown_subcommand_prints_usage(capsys):
    with pytest.raises(SystemExit) as exc:
        run("bogus")
    assert exc.value.code != 0
    assert "usage" in capsys.readouterr().err


def test_unknown_flag_rejected(capsys):
    with pytest.raises(SystemExit) as exc:
        run("describe", "--no-such-flag")
    assert exc.value.code != 0


def test_config_file_validation(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"seed": 1, "mystery": 3}))
    with pytest.raises(ConfigError, match="mystery"):
        load_config(cfg, {})
    assert run("describe", "--config", cfg, "--output-dir", tmp_path) == EXIT_CONFIG
    cfg.write_text(json.dumps({"seed": 1, "T0": 200, "roster": "Net-GO,Std-DCC"}))
    loaded = load_config(cfg, {"T0": 250})
    assert loaded.T0 == 250 and loaded.roster == ("Net-GO", "Std-DCC")
    with pytest.raises(ConfigError):
        RunConfig(seed=1, normalization="bogus").validate()


def test_output_dir_from_environment(dcc_prices, tmp_path, monkeypatch):
    monkeypatch.setenv("NETLOGARCH_OUTPUT_DIR", str(tmp_path / "env"))
    assert run("describe", "--data", dcc_prices, "--seed", 1) == 0
    assert (tmp_path / "env" / "manifest.json").exists()


def test_reproduce_is_byte_identical_across_runs_and_workers(dcc_prices, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({
        "seed": 5, "T0": 100, "roster": ["Net-Euclidean", "Net-CCC", "Std-CCC", "Std-DCC"],
        "dm_benchmark": "Net-CCC", "bootstrap_B": 200, "mcs_B": 500, "data": str(dcc_prices),
    }))
    outs = []
    for name, jobs in (("a", 1), ("b", 2)):
        assert run("reproduce", "--config", cfg, "--skip-sensitivity", "--n-jobs", jobs,
                   "--output-dir", tmp_path / name) == 0
        outs.append(tmp_path / name)
    for artifact in ("summary.json", "manifest.json", "losses.csv", "report.txt"):
        assert (outs[0] / artifact).read_bytes() == (outs[1] / artifact).read_bytes(), artifact
    summary = json.loads((outs[0] / "summary.json").read_text())
    assert {"descriptive", "garch", "mgarch", "network_gmm", "evaluation", "mcs"} <= set(summary)


def test_forecast_evaluate_mcs_chain(dcc_prices, tmp_path):
    common = ["--seed", 4, "--T0", 100, "--roster", "Net-Euclidean,Net-Correlation,Std-CCC"]
    assert run("forecast", "--data", dcc_prices, *common, "--output-dir", tmp_path / "f") == 0
    losses = tmp_path / "f" / "losses.csv"
    assert run("evaluate", "--losses", losses, *common, "--bootstrap-b", 200, "--output-dir", tmp_path / "e",
               ) == EXIT_CONFIG
    with open(tmp_path / "c.json", "w") as fh:
        json.dump({"dm_benchmark": "Net-Euclidean", "cw_benchmark": "Std-CCC"}, fh)
    assert run("evaluate", "--losses", losses, "--config", tmp_path / "c.json", *common, "--bootstrap-b", 200,
               "--output-dir", tmp_path / "e") == 0
    ev = json.loads((tmp_path / "e" / "evaluation.json").read_text())
    assert set(ev["models"]) == {"Net-Euclidean", "Net-Correlation", "Std-CCC"}
    assert run("mcs", "--losses", losses, *common, "--mcs-b", 300, "--output-dir", tmp_path / "m") == 0
    res = json.loads((tmp_path / "m" / "mcs.json").read_text())
    assert any(row["in_set_M"] for row in res["models"])

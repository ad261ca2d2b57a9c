import json

import pytest

from cycmono import cli


def test_wg_table_stdout(capsys):
    assert cli.main(["wg-table", "--k", "2", "--n", "4"]) == 0
    out = capsys.readouterr().out.strip().splitlines()
    assert out[0] == "cycle_type,numerator,denominator"
    assert "2,-1,60" in out
    assert "1+1,1,15" in out


def test_wg_table_file(tmp_path, capsys):
    path = tmp_path / "table.csv"
    assert cli.main(["wg-table", "--k", "3", "--n", "5", "--out", str(path)]) == 0
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "cycle_type,numerator,denominator"
    assert len(lines) == 4  # three cycle types of S_3

def test_wg_table_singular_is_config_error(capsys):
    assert cli.main(["wg-table", "--k", "4", "--n", "2"]) == 2


def test_wg_table_capacity_error(capsys):
    assert cli.main(["wg-table", "--k", "7", "--n", "9"]) == 3
    assert cli.main(["wg-table", "--k", "7", "--n", "9", "--max-degree", "7"]) == 0


def test_selftest_passes(capsys):
    assert cli.main(["selftest"]) == 0
    out = capsys.readouterr().out
    assert "selftest: PASS" in out


def test_unknown_subcommand_usage_error():
    with pytest.raises(SystemExit) as err:
        cli.main(["frobnicate"])
    assert err.value.code == 2


def test_spectrum_stdout_json(capsys):
    code = cli.main(
        ["spectrum", "--model", "anticommutator", "--n", "40", "--trials", "2", "--seed", "7"]
    )
    assert code == 0
    record = json.loads(capsys.readouterr().out)
    assert record["schema_version"] == 1
    assert record["config"]["seed"] == 7
    assert record["per_n"][0]["n"] == 40
    assert record["per_n"][0]["predicted_pos"][0] == pytest.approx(1.2071, abs=1e-3)


def test_spectrum_csv_format(capsys):
    code = cli.main(
        ["spectrum", "--model", "commutator", "--n", "30", "--trials", "2",
         "--seed", "1", "--format", "csv"]
    )
    assert code == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "rank,empirical_mean,empirical_sd,predicted"
    assert lines[1].startswith("1,")


def test_spectrum_writes_artifact_files(tmp_path, capsys):
    stem = tmp_path / "run" / "anti"
    code = cli.main(
        ["spectrum", "--model", "anticommutator", "--n", "30", "--trials", "2",
         "--seed", "3", "--out", str(stem)]
    )
    assert code == 0
    record = json.loads((tmp_path / "run" / "anti.json").read_text())
    assert record["config"]["n_list"] == [30]
    csv_text = (tmp_path / "run" / "anti.csv").read_text()
    assert csv_text.startswith("rank,empirical_mean")
    png = (tmp_path / "run" / "anti.png").read_bytes()
    assert png[:8] == b"\x89PNG\r\n\x1a\n"


def test_rotation_sum_cli(capsys):
    code = cli.main(
        ["spectrum", "--model", "rotation-sum", "--k", "2", "--n", "50",
         "--trials", "2", "--seed", "5"]
    )
    assert code == 0
    record = json.loads(capsys.readouterr().out)
    assert record["config"]["rotations"] == 2
    assert record["per_n"][0]["predicted_pos"][:3] == pytest.approx([0.5, 0.5, 0.5])


def test_moments_cli_with_config_and_overrides(tmp_path, capsys):
    config = {
        "experiment": "moments",
        "model": [["D", "X1"], ["D", "X1", "D", "X2"]],
        "generators": {
            "D": {"kind": "dyadic_diag"},
            "X1": {"kind": "wishart", "entry_variance": 2.0},
            "X2": {"kind": "wishart", "entry_variance": 2.0},
        },
        "n_list": [100],
        "trials": 50,
        "seed": 0,
    }
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(config))
    stem = tmp_path / "moments"
    code = cli.main(
        ["moments", "--config", str(path), "--n", "40", "--trials", "3",
         "--seed", "9", "--out", str(stem)]
    )
    assert code == 0
    record = json.loads((tmp_path / "moments.json").read_text())
    assert record["config"]["n_list"] == [40]
    assert record["config"]["trials"] == 3
    assert record["config"]["seed"] == 9
    assert (tmp_path / "moments.csv").exists()
    assert (tmp_path / "moments.png").exists()


def test_malformed_config_file(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    assert cli.main(["moments", "--config", str(path)]) == 2


def test_mismatched_experiment_config(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"experiment": "decay", "model": ["D", "X@1"]}))
    assert cli.main(["moments", "--config", str(path)]) == 2


def test_tau_prime_cli(capsys):
    code = cli.main(["tau-prime", "--n", "32", "--trials", "5", "--seed", "2"])
    assert code == 0
    record = json.loads(capsys.readouterr().out)
    assert record["fits"]["prediction"] == [1.0, 0.0]


def test_decay_cli_validation():
    # default decay config with a single overridden n fails the range rule
    assert cli.main(["decay", "--n", "64"]) == 2

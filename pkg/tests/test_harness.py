import csv
import io
import json

import pytest

from bigjump.errors import ConfigError
from bigjump.harness import cli, config as cfgmod, runner

SWEEP = """
[model]
family = "loghazard"
beta = 3.0

[grid]
n_list = [50, 200]
N_rule = { kind = "power", A = 3.0, theta = 0.5 }

[oracle]
enabled = true
m_max = 5000

[output]
name = "lh"
"""


def _rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_defaults_and_digest():
    cfg = cfgmod.load({"model": {"family": "stretched", "alpha": 0.5},
                       "grid": {"n_list": [10], "N_rule": {"kind": "list", "values": [5]}}})
    assert cfg["estimate"]["r"] == "auto"
    assert cfg["tolerances"]["tail_eps"] == 1e-14
    again = cfgmod.load(dict(cfg.data))
    assert again.digest() == cfg.digest() and len(cfg.digest()) == 64


@pytest.mark.parametrize("raw,match", [
    ({"model": {"family": "stretched", "alpha": 0.5}, "grid": {"n_list": [], "N_rule": {"kind": "list", "values": [1]}}},
     "n_list"),
    ({"model": {"family": "stretched", "alpha": 0.5, "gamma": 1}, "grid": {}}, "unknown keys"),
    ({"model": {"family": "pareto"}, "grid": {}}, "family"),
    ({"model": {"family": "loghazard"}, "grid": {"n_list": [1], "N_rule": {"kind": "list", "values": [1]}}},
     "beta"),
    ({"model": {"family": "geometric"}, "grid": {"n_list": [1], "N_rule": {"kind": "cubic"}}}, "kind"),
    ({"model": {"family": "geometric"}, "grid": {"n_list": [1], "N_rule": {"kind": "list", "values": [1]}},
      "estimate": {"r": 11}}, "0..10"),
    ({"model": {"family": "geometric"}, "extra": {}}, "unknown sections"),
])
def test_config_errors(raw, match):
    with pytest.raises(ConfigError, match=match):
        cfgmod.validate(raw)


def test_dotted_overrides_parse_toml_values():
    raw = cfgmod.apply_overrides({}, ["model.family=geometric", "model.ratio=0.25", "grid.n_list=[3, 4]",
                                      "oracle.enabled=true"])
    assert raw == {"model": {"family": "geometric", "ratio": 0.25}, "grid": {"n_list": [3, 4]},
                   "oracle": {"enabled": True}}
    with pytest.raises(ConfigError):
        cfgmod.apply_overrides({}, ["no-equals-sign"])


def test_rule_values():
    assert cfgmod.rule_values({"kind": "list", "values": [1, 2]}, 10, None) == [1.0, 2.0]
    assert cfgmod.rule_values({"kind": "power", "A": 2.0, "theta": 0.5, "gamma": 0.0}, 100, None) == [20.0]


def test_sweep_is_deterministic_and_writes_manifest(tmp_path):
    path = tmp_path / "sweep.toml"
    path.write_text(SWEEP)
    outs = []
    for jobs, sub in ((1, "a"), (2, "b")):
        assert cli.main(["sweep", "--config", str(path), "--out", str(tmp_path / sub), "--jobs", str(jobs)]) == 0
        outs.append((tmp_path / sub / "lh.csv").read_text())
    assert outs[0] == outs[1]
    rows = _rows(outs[0])
    assert [int(r["n"]) for r in rows] == [50, 200]
    assert all(r["log_exact"] and r["log_ratio"] for r in rows)
    man = json.loads((tmp_path / "a" / "lh.manifest.json").read_text())
    assert man["schema"] == runner.MANIFEST_SCHEMA
    assert man["rows"] == 2 and man["row_errors"] == 0
    assert man["columns"] == runner.ResultRow.columns()
    assert man["config_sha256"] == cfgmod.load(str(path)).digest()


def test_config_from_stdin(monkeypatch, capsys):
    monkeypatch.setattr("sys.stdin", io.StringIO(SWEEP))
    assert cli.main(["estimate", "--config", "-", "-n", "100", "-N", "40"]) == 0
    rows = _rows(capsys.readouterr().out)
    assert len(rows) == 1 and rows[0]["family"] == "loghazard"


def test_estimate_with_oracle(capsys):
    assert cli.main(["estimate", "--family", "stretched", "--alpha", "0.5", "-n", "20", "-N", "60",
                     "--oracle"]) == 0
    row = _rows(capsys.readouterr().out)[0]
    assert abs(float(row["log_ratio"])) < 1.0
    assert float(row["N"]) == round(20 * 7.148583798926122 + 60) - 20 * 7.148583798926122


@pytest.mark.parametrize("argv", [
    ["scales", "--family", "stretched", "--alpha", "0.5", "--set", "grid.n_list=[]"],
    ["estimate", "--family", "stretched", "--alpha", "0.5", "-n", "10", "-N", "5", "--set", "model.gamma=1"],
    ["scales", "--family", "loghazard"],
    ["sweep"],
    ["oracle", "--family", "geometric"],
    ["estimate", "--config", "/nonexistent/config.toml"],
])
def test_cli_config_errors_exit_one(argv, capsys):
    assert cli.main(argv) == 1
    assert "config error" in capsys.readouterr().err


def test_scales_report(capsys):
    assert cli.main(["scales", "--family", "stretched", "--alpha", "0.5", "--n-list", "1e3,1e4"]) == 0
    rows = _rows(capsys.readouterr().out)
    assert list(rows[0]) == runner.SCALE_COLUMNS
    for r in rows:
        assert abs(float(r["rel_dev_N_2star"])) < 1e-9
        assert r["formula_exact"] == "True"


def test_oracle_csv_matches_negative_binomial(capsys):
    from oracles import negative_binomial_pmf

    assert cli.main(["oracle", "--family", "geometric", "--ratio", "0.5", "-n", "3", "--m-max", "30"]) == 0
    lines = _rows(capsys.readouterr().out)
    got = {int(r[list(r)[0]]): float(r[list(r)[1]]) for r in lines}
    for m in (3, 10, 30):
        assert got[m] == pytest.approx(negative_binomial_pmf(3, m, 0.5), rel=1e-12)


def test_validate_report(tmp_path):
    assert cli.main(["validate", "--family", "loghazard", "--beta", "3", "--out", str(tmp_path)]) == 0
    assert "model:" in (tmp_path / "assumptions.txt").read_text()

import json
from dataclasses import replace

import pytest
from click.testing import CliRunner

from esflab import __version__, cli, decider
from esflab.padic import ValuationCertificate


@pytest.fixture
def runner():
    return CliRunner()


def _envelope(result):
    data = json.loads(result.output)
    assert set(data) == {"command", "version", "payload", "elapsed_ms"}
    assert data["version"] == __version__
    return data


def test_compute_json(runner):
    result = runner.invoke(cli.main, ["compute", "--a", "1", "--b", "1",
                                      "--n", "3", "--k", "1"])
    assert result.exit_code == 0
    data = _envelope(result)
    assert data["command"] == "compute"
    assert data["payload"]["value"] == "11/6"
    assert data["payload"]["decimal"].startswith("1.8333333333")


def test_compute_text(runner):
    result = runner.invoke(cli.main, ["compute", "--a", "1", "--b", "1",
                                      "--n", "3", "--k", "2", "--format", "text"])
    assert result.exit_code == 0
    assert result.output.splitlines()[0] == "1"


def test_compute_usage_errors(runner):
    result = runner.invoke(cli.main, ["compute", "--a", "1", "--b", "1",
                                      "--n", "3", "--k", "4"])
    assert result.exit_code == 64
    result = runner.invoke(cli.main, ["compute", "--a", "0", "--b", "1",
                                      "--n", "3", "--k", "2"])
    assert result.exit_code == 64


def test_payloads_are_deterministic(runner):
    args = ["decide", "--a", "1", "--b", "1", "--n", "12", "--k", "2"]
    first = _envelope(runner.invoke(cli.main, args))["payload"]
    second = _envelope(runner.invoke(cli.main, args))["payload"]
    assert json.dumps(first, sort_keys=True) == json.dumps(second, sort_keys=True)


def test_decide_exit_codes(runner, monkeypatch):
    result = runner.invoke(cli.main, ["decide", "--a", "1", "--b", "1",
                                      "--n", "12", "--k", "2"])
    assert result.exit_code == 0
    payload = _envelope(result)["payload"]
    assert payload["verdict"] == "non-integer"
    assert payload["evidence"]["certificate"]["p"] == "5"

    monkeypatch.setattr(decider, "EXACT_FALLBACK_LIMIT", 10)
    result = runner.invoke(cli.main, ["decide", "--a", "1", "--b", "1",
                                      "--n", "12", "--k", "3"])
    assert result.exit_code == 2


def test_decide_theorem_mode(runner):
    result = runner.invoke(cli.main, ["decide", "--a", "9", "--b", "1",
                                      "--n", "1", "--k", "1", "--mode", "theorem"])
    assert result.exit_code == 0
    assert _envelope(result)["payload"]["verdict"] == "integer"


def test_witness_round_trip(runner, tmp_path):
    result = runner.invoke(cli.main, ["witness", "--a", "1", "--b", "1",
                                      "--n", "12", "--k", "2"])
    assert result.exit_code == 0
    payload = _envelope(result)["payload"]
    assert payload["p"] == "5" and payload["claimed_valuation"] == "-2"

    cert_file = tmp_path / "cert.json"
    cert_file.write_text(json.dumps(payload))
    verify = runner.invoke(cli.main, ["verify", str(cert_file)])
    assert verify.exit_code == 0
    assert _envelope(verify)["payload"]["ok"] is True

    # verify also consumes the witness command's envelope verbatim
    envelope_file = tmp_path / "envelope.json"
    envelope_file.write_text(result.output)
    assert runner.invoke(cli.main, ["verify", str(envelope_file)]).exit_code == 0

    full = runner.invoke(cli.main, ["verify", str(cert_file), "--mode", "exhaustive"])
    assert full.exit_code == 0
    assert _envelope(full)["payload"]["recomputed_valuation"] == -2


def test_witness_unavailable(runner):
    for args in (["--a", "1", "--b", "1", "--n", "7", "--k", "2"],
                 ["--a", "1", "--b", "1", "--n", "3", "--k", "2"]):
        result = runner.invoke(cli.main, ["witness", *args])
        assert result.exit_code == 3


def test_verify_failure_and_data_errors(runner, tmp_path):
    wit = runner.invoke(cli.main, ["witness", "--a", "2", "--b", "1",
                                   "--n", "50", "--k", "2"])
    assert wit.exit_code == 0
    cert = ValuationCertificate.from_json_dict(json.loads(wit.output)["payload"])
    tampered = replace(cert, p=11)
    bad_file = tmp_path / "bad.json"
    bad_file.write_text(tampered.to_json())
    result = runner.invoke(cli.main, ["verify", str(bad_file)])
    assert result.exit_code == 1
    assert _envelope(result)["payload"]["failed_clause"] == "interval"

    mangled = tmp_path / "mangled.json"
    mangled.write_text("{not json")
    assert runner.invoke(cli.main, ["verify", str(mangled)]).exit_code == 65
    partial = tmp_path / "partial.json"
    partial.write_text(json.dumps({"a": "1"}))
    assert runner.invoke(cli.main, ["verify", str(partial)]).exit_code == 65


def test_table1_formats(runner):
    csv = runner.invoke(cli.main, ["table1"])
    assert csv.exit_code == 0
    assert csv.output.startswith("k,i_k,p_ik\n2,5,11\n")

    text = runner.invoke(cli.main, ["table1", "--format", "text"])
    assert "541" in text.output

    data = _envelope(runner.invoke(cli.main, ["table1", "--format", "json"]))
    assert data["payload"]["max_index"] == 11301
    assert data["payload"]["max_prime"] == 119993
    assert data["payload"]["rows"][0] == {"k": 2, "i_k": 5, "p_ik": 11}


def test_config_file_sets_sieve_limit(runner, tmp_path):
    cfg = tmp_path / "esflab.cfg"
    cfg.write_text("# comment\nsieve_limit = 5000\n")
    result = runner.invoke(cli.main, ["--config", str(cfg), "table1",
                                      "--format", "json"])
    assert result.exit_code == 0
    assert _envelope(result)["payload"]["max_prime"] == 4999

    bad = tmp_path / "bad.cfg"
    bad.write_text("sieve_limit = soon\n")
    assert runner.invoke(cli.main, ["--config", str(bad), "table1"]).exit_code == 64
    unknown = tmp_path / "unknown.cfg"
    unknown.write_text("jobs = 4\n")
    assert runner.invoke(cli.main, ["--config", str(unknown), "table1"]).exit_code == 64


def test_check_bounds(runner):
    result = runner.invoke(cli.main, ["check-bounds", "--a", "1", "--b", "1",
                                      "--n", "100", "--k", "20"])
    assert result.exit_code == 0
    payload = _envelope(result)["payload"]
    assert payload["large_k_regime"] is True
    assert payload["rounding_mode"] == "outward-certified"
    assert runner.invoke(cli.main, ["check-bounds", "--a", "1", "--b", "1",
                                    "--n", "10", "--k", "1"]).exit_code == 64


def test_sweep_custom_cli(runner, tmp_path):
    out = tmp_path / "report.json"
    csv_out = tmp_path / "hits.csv"
    result = runner.invoke(cli.main, [
        "sweep", "--program", "custom", "--a-min", "1", "--a-max", "2",
        "--b-min", "1", "--b-max", "2", "--n-max", "20", "--k-min", "1",
        "--k-max", "20", "--out", str(out), "--csv", str(csv_out),
    ])
    assert result.exit_code == 0
    payload = _envelope(result)["payload"]
    assert payload["matches_expected"] is True
    assert json.loads(out.read_text())["integer_hits"] == payload["integer_hits"]
    assert csv_out.read_text().splitlines()[0] == "a,b,n,k,value"


def test_sweep_custom_requires_box(runner):
    result = runner.invoke(cli.main, ["sweep", "--program", "custom",
                                      "--a-min", "1"])
    assert result.exit_code == 64
    combined = result.output + (getattr(result, "stderr", "") or "")
    assert "--a-max" in combined


def test_sweep_rejects_empty_range(runner):
    result = runner.invoke(cli.main, [
        "sweep", "--program", "custom", "--a-min", "3", "--a-max", "1",
        "--b-min", "1", "--b-max", "1", "--n-max", "5", "--k-max", "2",
    ])
    assert result.exit_code == 64


def test_jobs_env_var(runner):
    result = runner.invoke(cli.main, [
        "sweep", "--program", "custom", "--a-min", "1", "--a-max", "1",
        "--b-min", "1", "--b-max", "2", "--n-max", "15", "--k-max", "5",
    ], env={"ESFLAB_JOBS": "2"})
    assert result.exit_code == 0
    bad = runner.invoke(cli.main, [
        "sweep", "--program", "custom", "--a-min", "1", "--a-max", "1",
        "--b-min", "1", "--b-max", "1", "--n-max", "5", "--k-max", "2",
    ], env={"ESFLAB_JOBS": "many"})
    assert bad.exit_code == 64

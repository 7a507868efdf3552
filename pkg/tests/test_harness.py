import json

import pytest

from equivgerbe import cli
from equivgerbe.conventions import CALIBRATED
from equivgerbe.harness import SuiteConfig, UsageError, run_suite


def test_config_validation():
    with pytest.raises(UsageError):
        SuiteConfig(suite="nope")
    with pytest.raises(UsageError):
        SuiteConfig(suite="loop", N=48)
    with pytest.raises(UsageError):
        SuiteConfig(suite="loop", N=64, M=32)
    with pytest.raises(UsageError):
        SuiteConfig(suite="amm", tol={"fd": 0.0})
    with pytest.raises(UsageError):
        SuiteConfig(suite="amm", samples=0)
    assert SuiteConfig(suite="prequant").model_name == "heisenberg(2)"


def test_reports_are_deterministic():
    cfg = SuiteConfig(suite="amm", model="su2", seed=1, samples=20)
    a, b = run_suite(cfg).to_json(), run_suite(cfg).to_json()
    assert a == b
    doc = json.loads(a)
    assert doc["schema_version"] == 1 and doc["passed"]
    assert doc["passed"] == all(c["passed"] for c in doc["checks"])
    assert all(c["anchor"] and c["samples"] == 20 for c in doc["checks"])
    assert doc["conventions"]["c_omega"] == "1/2"


def test_prequant_heisenberg_passes():
    assert run_suite(SuiteConfig(suite="prequant", model="heisenberg(2)", samples=30)).passed


def test_deltamu_passes_and_tampered_record_fails(tmp_path):
    cfg = SuiteConfig(suite="deltamu", samples=3)
    assert run_suite(cfg).passed
    path = tmp_path / "conv.txt"
    CALIBRATED.flipped("delta_mu_s1").save(path)
    assert not run_suite(SuiteConfig(suite="deltamu", samples=3, conventions=str(path))).passed


def test_unknown_model():
    with pytest.raises(UsageError):
        run_suite(SuiteConfig(suite="amm", model="su7"))


def test_cli_exit_codes(tmp_path, capsys):
    report = tmp_path / "r.json"
    assert cli.main(["--suite", "cartan", "--samples", "4", "--report", str(report)]) == 0
    assert json.loads(report.read_text())["passed"]
    assert cli.main(["--suite", "cartan", "--samples", "4", "--tol.fd", "1e-14"]) == 1
    assert cli.main(["--suite", "cartan", "--samples", "4", "--tol.fd=1e-14"]) == 1
    assert cli.main(["--suite", "nope"]) == 2
    assert cli.main(["--suite", "loop", "--grid", "48"]) == 2
    assert cli.main(["--suite", "amm", "--tol.fd", "-1"]) == 2
    assert cli.main(["--suite", "amm", "--bogus"]) == 2
    assert cli.main([]) == 2
    assert "FAIL" in capsys.readouterr().out


def test_cli_config_file_with_overrides(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"suite": "period", "samples": 8}))
    assert cli.main(["--config", str(cfg), "--quiet"]) == 0
    assert capsys.readouterr().out.strip() == "PASS"
    conv = tmp_path / "conv.txt"
    assert cli.main(["--config", str(cfg), "--conventions", str(conv), "--quiet"]) == 0
    assert conv.exists()
    cfg.write_text("{not json")
    assert cli.main(["--config", str(cfg)]) == 2

import json
import os
import subprocess
import sys

import pytest

from joyce_hkt.catalog import ALL_CHECKS, catalog
from joyce_hkt.cli import ConfigError, dumps, main, parse_config, run


def _strip_timing(text):
    doc = json.loads(text)
    doc.pop("timing", None)
    for r in doc.get("reports", []):
        r.pop("timing", None)
    return json.dumps(doc, sort_keys=True)


def test_preset_expansion():
    cfg = parse_config({"preset": "su5-einstein"})
    assert cfg.factors == (("A", 4),)
    assert cfg.center_dim == 0
    assert cfg.metric == {"kind": "einstein"}
    assert cfg.checks == ALL_CHECKS
    job_report = run(parse_config({"preset": "su5-einstein", "checks": ["hypercomplex"]}))
    assert job_report["space"]["m"] == 2


def test_coeff_length_error():
    doc = {"algebra": {"factors": [["A", 4]]}, "metric": {"kind": "layer", "coeffs": [1, 2, 3]}}
    with pytest.raises(ConfigError) as e:
        parse_config(doc)
    assert any("coeffs" in m and "3" in m and "2" in m for m in e.value.errors)


def test_default_tolerance():
    assert parse_config({"preset": "su3-group"}).tolerance == 1e-9


def test_all_errors_reported():
    doc = {"algebra": {"factors": [["A", 2]]}, "tolerance": -1, "bogus": 1, "checks": ["nope"]}
    with pytest.raises(ConfigError) as e:
        parse_config(doc)
    assert len(e.value.errors) >= 3


def test_syntax_error():
    with pytest.raises(ConfigError):
        parse_config("{not json")


def test_unknown_preset():
    with pytest.raises(ConfigError):
        parse_config({"preset": "no-such"})


def test_catalog_contents():
    names = {p["name"] for p in catalog()}
    assert {"su3-group", "su5-group", "su4-mod-su2", "su3xsu3-product", "u4-remark-frame"} <= names
    u4 = next(p for p in catalog() if p["name"] == "u4-remark-frame")
    assert u4["interpretive"] and u4["note"]
    for p in catalog():
        parse_config({"preset": p["name"]})


def test_su3_group_all_pass():
    rep = run(parse_config({"preset": "su3-group"}))
    assert all(c["verdict"] == "pass" for c in rep["checks"])
    assert rep["summary"]["all_matched"]


def test_su5_einstein_strong_expected_fail():
    rep = run(parse_config({"preset": "su5-einstein", "checks": ["strong"], "expected": {"strong": "fail"}}))
    (chk,) = rep["checks"]
    assert chk["verdict"] == "fail" and chk["matches"]
    # the preset's own expectation carries over when only checks are narrowed
    rep = run(parse_config({"preset": "su5-einstein", "checks": ["strong"]}))
    assert rep["checks"][0]["expected"] == "fail" and rep["summary"]["all_matched"]


def test_su4_mod_su2_einstein_lambda():
    rep = run(parse_config({"preset": "su4-mod-su2", "checks": ["hkt", "einstein"], "expected": {}}))
    verdicts = {c["name"]: c for c in rep["checks"]}
    assert verdicts["hkt"]["verdict"] == "pass"
    assert verdicts["einstein"]["verdict"] == "pass"
    assert verdicts["einstein"]["witnesses"]["lambda"] == pytest.approx(1.0)


def test_report_round_trip():
    rep = run(parse_config({"preset": "su3-group", "checks": ["hkt"]}))
    text = dumps(rep)
    assert dumps(json.loads(text)) == text
    assert rep["schema_version"] == "1.0"


def test_exit_codes(tmp_path, capsys):
    assert main(["verify", "--preset", "su3-group", "--json-only"]) == 0
    assert main(["verify", "--preset", "su5-group", "--json-only"]) == 0
    bad = tmp_path / "mismatch.json"
    bad.write_text(json.dumps({"preset": "su5-einstein", "checks": ["strong"], "expected": {"strong": "pass"}}))
    assert main(["verify", "--config", str(bad), "--json-only"]) == 1
    invalid = tmp_path / "invalid.json"
    invalid.write_text(json.dumps({"algebra": {"factors": [["A", 4]]}, "metric": {"kind": "layer", "coeffs": [1]}}))
    assert main(["verify", "--config", str(invalid), "--json-only"]) == 2
    capsys.readouterr()
    assert main(["verify", "--config", str(invalid), "--json-only"]) == 2
    assert "errors" in json.loads(capsys.readouterr().out)
    assert main(["verify", "--config", str(tmp_path / "missing.json")]) == 2


def test_internal_error_exit(monkeypatch, capsys):
    import joyce_hkt.cli as cli

    def boom(cfg):
        raise RuntimeError("boom")

    monkeypatch.setattr(cli, "run", boom)
    assert cli.main(["verify", "--preset", "su3-group"]) == 3
    assert "internal error" in capsys.readouterr().err


def test_streams(capsys):
    main(["verify", "--preset", "su3-group"])
    cap = capsys.readouterr()
    json.loads(cap.out)
    assert "hkt" in cap.err
    main(["verify", "--preset", "su3-group", "--quiet"])
    cap = capsys.readouterr()
    assert cap.out == "" and cap.err


def test_decompose_command(capsys):
    assert main(["decompose", "--preset", "su5-group", "--json-only"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["command"] == "decompose"


def test_catalog_list(capsys):
    assert main(["catalog", "--json-only"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert len(doc["presets"]) == len(catalog())


def test_determinism_subprocess():
    cmd = [sys.executable, "-m", "joyce_hkt.cli", "verify", "--preset", "su5-einstein", "--seed", "7", "--json-only"]
    a = subprocess.run(cmd, capture_output=True, text=True, check=False)
    b = subprocess.run(cmd, capture_output=True, text=True, check=False)
    assert a.returncode == b.returncode == 0
    assert _strip_timing(a.stdout) == _strip_timing(b.stdout)


def test_perturbed_metric_seed_determinism():
    doc = {
        "algebra": {"factors": [["A", 4]]},
        "metric": {"kind": "perturbed", "base": {"kind": "reference"}, "seed": 3, "size": 0.01},
        "checks": ["hkt"],
        "expected": {"hkt": "fail"},
    }
    r1, r2 = run(parse_config(doc)), run(parse_config(doc))
    r1.pop("timing"), r2.pop("timing")
    assert dumps(r1) == dumps(r2)
    assert r1["summary"]["all_matched"]

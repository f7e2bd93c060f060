import csv
import io
import json
import math

import pytest

from gammaquant import fixtures
from gammaquant.cli import main
from gammaquant.harness import (
    CHECKS,
    VerificationReport,
    VerifyConfig,
    check_tau_table,
    run_verify,
    sweep,
)

CHECK_NAMES = [
    "tau_table", "a_coefficients", "e_divisibility", "q_fixtures", "median_crosscheck",
    "p_family", "small_x_limits", "m_pow_x_limit", "derivative_asymptotics",
    "j_expansion", "oracle_consistency",
]


@pytest.fixture(scope="module")
def report():
    return run_verify()


def test_report_structure(report):
    assert [c.name for c in report.checks] == CHECK_NAMES
    assert len(CHECKS) == len(CHECK_NAMES)
    assert {d["name"] for d in report.diagnostics} >= {"tau2_numeric", "tau_degrees", "j2_identity", "z_third_coefficient"}
    for c in report.checks:
        assert c.status in ("pass", "fail")
        assert set(c.as_dict()) >= {"name", "status", "observed", "expected", "tolerance", "detail"}


def test_report_json_is_deterministic(report):
    a = json.loads(report.to_json())
    b = json.loads(run_verify().to_json())
    for doc in (a, b):
        for c in doc["checks"]:
            c["observed"] = None if isinstance(c["observed"], dict) and "seconds" in c["observed"] else c["observed"]
            c["detail"] = None
    assert a == b
    assert "timestamp" not in a["environment"]
    assert "timestamp" in json.loads(report.to_json(timestamp=True))["environment"]


def test_report_csv(report):
    rows = list(csv.reader(io.StringIO(report.to_csv())))
    assert rows[0][:2] == ["name", "status"]
    assert [r[0] for r in rows[1:]] == CHECK_NAMES


def test_report_text(report):
    text = report.to_text()
    assert text.count("[PASS]") + text.count("[FAIL]") == len(CHECK_NAMES)


def test_tau_check_respects_order():
    assert check_tau_table(VerifyConfig(order=1)).passed
    assert not check_tau_table(VerifyConfig(order=3)).passed


def test_tau_override_to_computed_value_passes():
    cfg = VerifyConfig(tau_overrides={2: fixtures.TAU2_NUMERIC})
    assert check_tau_table(cfg).passed


def test_corrupted_tau_fails():
    cfg = VerifyConfig(order=4, tau_overrides={2: fixtures.TAU2_NUMERIC, 3: "433/38880*L - 8/1215*L^3 - 1/4321*L^5"})
    c = check_tau_table(cfg)
    assert not c.passed
    assert list(c.observed["mismatches"]) == [3]


def test_config_from_dict():
    cfg = VerifyConfig.from_dict({"order": 5, "tau_overrides": {"2": "1"}})
    assert cfg.order == 5 and cfg.tau_overrides == {2: "1"}
    with pytest.raises(ValueError):
        VerifyConfig.from_dict({"orde": 5})


def _rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_sweep_infinity():
    text = sweep("infinity", [25, 100, 400], [0.3], orders=[1, 3])
    assert "\r\n" in text
    rows = _rows(text)
    assert list(rows[0]) == ["x", "p", "L_p", "oracle_m", "expansion_o1", "expansion_o3",
                             "abs_err_o1", "abs_err_o3", "note"]
    errs = [float(r["abs_err_o3"]) for r in rows]
    assert errs[0] > errs[1] > errs[2]
    assert all(float(r["abs_err_o3"]) < float(r["abs_err_o1"]) for r in rows)


def test_sweep_zero():
    rows = _rows(sweep("zero", [0.04, 0.02], [0.25, 0.5]))
    assert list(rows[0])[:4] == ["x", "p", "oracle_log_m", "u_oracle"]
    for r in rows:
        u = float(r["u_oracle"])
        assert u == pytest.approx(math.exp(float(r["oracle_log_m"]) - math.log(float(r["p"])) / float(r["x"])))
        assert float(r["abs_err_o2"]) < float(r["abs_err_o0"])


def test_sweep_edge_cases():
    assert sweep("zero", [], [0.5]).count("\r\n") == 1
    rows = _rows(sweep("zero", [2.0], [0.5]))
    assert rows[0]["note"].startswith("regime")
    rows = _rows(sweep("zero", [0.45], [0.5], orders=[2]))
    assert rows[0]["abs_err_o2"] != ""
    with pytest.raises(ValueError):
        sweep("middle", [1.0], [0.5])


def test_sweep_is_deterministic():
    assert sweep("infinity", [50], [0.1, 0.9]) == sweep("infinity", [50], [0.1, 0.9])


def test_cli_quantile(capsys):
    assert main(["quantile", "--x", "1", "--p", "0.5"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["value"] == pytest.approx(math.log(2), rel=1e-14)
    assert main(["quantile", "--x", "0.1", "--p", "0.5", "--log-domain"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["value"] < -6


def test_cli_coeffs(capsys):
    assert main(["coeffs", "--order", "3", "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["tau"][0] == {"n": -2, "poly": "1"}
    assert [t["n"] for t in doc["tau"]] == list(range(-2, 4))
    assert doc["a"][0]["poly"] == "1/3 + 1/6*L^2"
    assert main(["coeffs", "--order", "2"]) == 0
    assert "tau_2 = 8/405 - 7/810*L^2 - 1/270*L^4" in capsys.readouterr().out


def test_cli_expansions(capsys):
    assert main(["expand-infinity", "--x", "100", "--p", "0.5", "--order", "2"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["m"] == pytest.approx(100 - 1 / 3 + 8 / 40500)
    assert main(["expand-zero", "--x", "0.05", "--p", "0.5"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["log_m"] == pytest.approx(20 * math.log(0.5) - 0.5772156649, abs=0.05)


def test_cli_sweep_to_file(tmp_path, capsys):
    out = tmp_path / "s.csv"
    assert main(["sweep", "--kind", "infinity", "--x", "25,100", "--p", "0.5", "--output", str(out)]) == 0
    assert out.read_bytes().count(b"\r\n") == 3


def test_cli_verify_exit_codes(tmp_path, capsys):
    assert main(["verify"]) == 1
    capsys.readouterr()
    assert main(["verify", "--order", "1", "--format", "json"]) in (0, 1)
    json.loads(capsys.readouterr().out)
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"bogus": 1}))
    assert main(["verify", "--config", str(cfg)]) == 2
    assert main(["verify", "--tau-override", "2"]) == 2
    assert main(["verify", "--config", str(tmp_path / "missing.json")]) == 2


def test_cli_usage_errors(capsys):
    assert main([]) == 2
    assert main(["quantile", "--x", "1", "--p", "1.5"]) == 2
    assert main(["expand-infinity", "--x", "100", "--p", "0.5", "--order", "9", "--table-order", "7"]) in (0, 2)

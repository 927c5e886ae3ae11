import io
import json

import pytest

from njl import cli
from njl.reports import BoundReport


def run(argv):
    out = io.StringIO()
    code = cli.main(argv, stdout=out)
    return code, out.getvalue()


def test_verify_passes_and_writes_json(tmp_path):
    path = tmp_path / "report.json"
    code, text = run(["verify", "--model", "su2", "--L", "2", "--suite", "algebra", "--suite", "sumrule",
                      "--out", str(path)])
    assert code == 0
    assert "PASS" in text and "FAIL" not in text
    doc = json.loads(path.read_text())
    assert doc["summary"]["passed"] is True and doc["summary"]["failed"] == 0
    assert set(doc["suites"]) == {"algebra", "sumrule"}


def test_failing_report_gives_exit_one(monkeypatch):
    def failing(cfg):
        return [BoundReport.inequality("forced", 2.0, 1.0, 0.0, {})]

    monkeypatch.setitem(cli.RUNNERS, "algebra", failing)
    code, text = run(["verify", "--suite", "algebra"])
    assert code == 1
    assert "FAIL" in text


def test_empty_suite_selection_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        run(["verify"])
    assert exc.value.code == 2


def test_infeasible_lattice_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        run(["verify", "--nu", "3", "--L", "2", "--suite", "lro"])
    assert exc.value.code == 2


@pytest.mark.parametrize("body", ["{not json", json.dumps({"model": "SU3", "bogus": 1}),
                                  json.dumps({"suites": []})])
def test_malformed_config_is_usage_error(tmp_path, body):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(body)
    with pytest.raises(SystemExit) as exc:
        run(["run", str(cfg)])
    assert exc.value.code == 2


def test_run_is_deterministic(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"model": "SU2", "nu": 1, "L": 1, "suites": ["domination", "neel"],
                               "samples": 5, "beta": [1.0], "g": [1.0]}))
    outs = []
    for k in range(2):
        path = tmp_path / f"out{k}.json"
        assert run(["run", str(cfg), "--out", str(path)])[0] == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_integrals_subcommand(tmp_path):
    path = tmp_path / "ints.json"
    code, text = run(["integrals", "--nu", "2", "--qmc-log2", "12", "--out", str(path)])
    assert code == 0
    doc = json.loads(path.read_text())
    rows = {r["name"]: r for r in doc["integrals"]}
    assert rows["I"]["divergent"] is True
    assert rows["J"]["value"] == pytest.approx(0.9091728, abs=1e-6)
    assert "I_2: divergent" in text


def test_sweep_csv_rows_and_determinism():
    argv = ["sweep", "--model", "su2", "--L", "1", "--kappa", "0.1", "0.2", "--g", "1.0", "2.0", "--beta", "2"]
    code, first = run(argv)
    assert code == 0
    lines = first.strip().splitlines()
    header = lines[0].split(",")
    assert header[:7] == ["model", "nu", "L", "kappa", "g", "m", "beta"]
    assert "nn_correlator" in header
    assert len(lines) == 5
    assert run(argv)[1] == first


def test_config_rejects_unknown_suite():
    with pytest.raises(cli.UsageError):
        cli.RunConfig(suites=["nope"])

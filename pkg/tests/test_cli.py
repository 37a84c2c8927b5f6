import json
import subprocess
import sys

import pytest
from conftest import dihedral_table

from tripspan import reports
from tripspan.cli import main
from tripspan.config import BUDGET_ENV, RunConfig
from tripspan.groups import GroupSpec, random_dense
from tripspan.witness import recheck_witness


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_g_csv(capsys):
    code, out, _ = run(capsys, "g", "--k", "1..3", "--format", "csv")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "k,g,ratio"
    assert lines[1].startswith("1,3,") and lines[2].startswith("2,5,")
    assert lines[3] == "3,6,1.0"
    code, out, _ = run(capsys, "g", "--k", "12..12", "--format", "csv")
    assert out.splitlines()[1] == "12,12,1.0"


def test_g_json(capsys):
    code, out, _ = run(capsys, "g", "--k", "5")
    assert code == 0
    assert json.loads(out) == {"rows": [{"k": 5, "g": 8, "ratio": round(8 / 60 ** 0.5, 6)}]}


@pytest.mark.parametrize("argv", [
    ("g", "--k", "3..1"),
    ("g", "--k", "abc"),
    ("g",),
    ("nonsense",),
    ("witness", "--group", "zq:5", "--k", "4"),
    ("witness", "--group", "zn:64", "--k", "4", "--density", "1.5"),
    ("g", "--k", "3", "--format", "svg"),
    ("verify", "--suite", "nothing"),
    ("g", "--k", "3", "--workers", "0"),
])
def test_usage_errors_exit_1(capsys, argv):
    code = None
    try:
        code = main(list(argv))
    except SystemExit as exc:
        code = exc.code
    assert code == 1
    assert capsys.readouterr().err


def test_h(capsys):
    code, out, _ = run(capsys, "h", "--m", "12", "--format", "csv")
    assert out.splitlines()[1] == "12,12,4,4,4"
    code, out, _ = run(capsys, "h", "--triple", "3,3,3")
    assert json.loads(out)["h"] == 7


def test_witness_k3(capsys):
    code, out, err = run(capsys, "witness", "--group", "zn:2048", "--k", "10",
                         "--variant", "k3", "--recheck")
    assert code == 0
    doc = json.loads(out)
    assert doc["size_total"] == 13 and doc["certificate"]["span_count"] >= 10
    assert doc["recheck"]["ok"]
    assert recheck_witness(doc)["ok"]


def test_witness_power_sqrt(capsys):
    code, out, _ = run(capsys, "witness", "--group", "zqm:3:8", "--k", "9", "--variant", "sqrt")
    assert code == 0 and json.loads(out)["size_total"] <= 12


def test_witness_not_found_exit_2(capsys):
    code, out, err = run(capsys, "witness", "--group", "zn:7", "--k", "100")
    assert code == 2
    assert json.loads(out)["status"] == "pattern-not-found"
    assert "pattern not found" in err


def test_witness_table_group(capsys, tmp_path):
    path = tmp_path / "d64.json"
    path.write_text(json.dumps({"cayley": dihedral_table(64).tolist()}))
    code, _, _ = run(capsys, "witness", "--group", f"table:{path}", "--k", "5")
    assert code == 1  # a table group needs --subgroup
    code, out, _ = run(capsys, "witness", "--group", f"table:{path}", "--k", "5",
                       "--subgroup", "1", "--recheck")
    assert code == 0 and json.loads(out)["recheck"]["ok"]


def test_witness_system_file(capsys, tmp_path):
    S = random_dense(GroupSpec.cyclic(256), "9/10", 3)
    path = tmp_path / "S.json"
    path.write_text(json.dumps(S.to_json()))
    code, out, _ = run(capsys, "witness", "--group", "zn:256", "--k", "4",
                       "--system", str(path), "--recheck")
    assert code in (0, 2)
    if code == 0:
        doc = json.loads(out)
        assert recheck_witness(doc, S)["ok"]
    code, _, _ = run(capsys, "witness", "--group", "zn:255", "--k", "4", "--system", str(path))
    assert code == 1


def test_isoperimetry(capsys):
    code, out, err = run(capsys, "isoperimetry", "--k", "7", "--mode", "brute")
    assert code == 0 and json.loads(out)["rows"][0]["minimum"] == 18
    assert "search space" in err
    code, out, _ = run(capsys, "isoperimetry", "--k", "7", "--mode", "uniqueness")
    doc = json.loads(out)
    assert doc["count"] == 1 and doc["minimum"] == 18
    code, out, _ = run(capsys, "isoperimetry", "--k", "1", "--format", "csv")
    assert out.splitlines()[1] == "1,6,3,6"


def test_budget_exit_3(capsys, monkeypatch):
    code, _, err = run(capsys, "isoperimetry", "--k", "7", "--mode", "brute", "--budget", "10")
    assert code == 3 and "budget" in err
    monkeypatch.setenv(BUDGET_ENV, "10")
    code, _, _ = run(capsys, "verify", "--suite", "compression")
    assert code == 3


def test_verify_suites(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "lowerbound")
    assert code == 0 and json.loads(out)["passed"]
    code, out, _ = run(capsys, "verify", "--suite", "compression")
    doc = json.loads(out)
    assert code == 0 and doc["counterexamples"] == [] and doc["instances_checked"] == 12348


def test_counterexample_exit_4(capsys, monkeypatch):
    fake = {"instances_checked": 1, "max_params": {},
            "counterexamples": [{"A": [1], "B": [1], "ell": 1}]}
    monkeypatch.setattr(reports, "verify_compression", lambda *a, **k: dict(fake))
    code, out, err = run(capsys, "verify", "--suite", "compression")
    assert code == 4 and not json.loads(out)["passed"]


def test_lowerbound(capsys):
    code, out, _ = run(capsys, "lowerbound", "--n", "64", "--k", "3", "--format", "csv")
    assert code == 0 and out.splitlines()[1] == "64,3,64,6,6"


def test_pattern(capsys):
    code, out, _ = run(capsys, "pattern", "--group", "zn:200", "--h", "3", "--density", "0.9")
    assert code == 0
    assert json.loads(out)["status"] == "ok"
    code, out, _ = run(capsys, "pattern", "--group", "zn:20", "--h", "6", "--density", "0.2")
    assert code == 2


def test_svg_outputs(capsys, tmp_path):
    target = tmp_path / "fig" / "g.svg"
    code, out, _ = run(capsys, "g", "--k", "1..40", "--format", "svg", "--out", str(target))
    assert code == 0
    assert target.read_text().lstrip().startswith("<?xml")
    assert target.with_suffix(".csv").read_text().startswith("k,g,ratio\n")
    assert json.loads(target.with_suffix(".json").read_text()) == json.loads(out)
    for argv in (("isoperimetry", "--k", "7", "--mode", "uniqueness"),
                 ("witness", "--group", "zn:2048", "--k", "10"),
                 ("lowerbound",)):
        path = tmp_path / f"{argv[0]}.svg"
        assert run(capsys, *argv, "--format", "svg", "--out", str(path))[0] == 0
        assert "<svg" in path.read_text()


def test_svg_is_reproducible(capsys, tmp_path):
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    run(capsys, "isoperimetry", "--k", "1..30", "--format", "svg", "--out", str(a))
    run(capsys, "isoperimetry", "--k", "1..30", "--format", "svg", "--out", str(b))
    assert a.read_bytes() == b.read_bytes()


def test_output_identical_across_workers(capsys):
    outs = []
    for w in ("1", "3"):
        outs.append(run(capsys, "verify", "--suite", "compression", "--workers", w)[1])
        outs.append(run(capsys, "isoperimetry", "--k", "6", "--mode", "brute", "--workers", w)[1])
    assert outs[0] == outs[2] and outs[1] == outs[3]


def test_out_file(capsys, tmp_path):
    path = tmp_path / "g.csv"
    code, out, _ = run(capsys, "g", "--k", "1..3", "--format", "csv", "--out", str(path))
    assert code == 0 and out == ""
    assert path.read_text().splitlines()[3] == "3,6,1.0"


def test_report_config_validation():
    with pytest.raises(ValueError):
        RunConfig(node_budget=0)
    with pytest.raises(ValueError):
        RunConfig(output_format="xml")
    assert reports.parse_range("4") == range(4, 5)


def test_console_script_module():
    proc = subprocess.run([sys.executable, "-m", "tripspan", "g", "--k", "3", "--format", "csv"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout.splitlines()[1] == "3,6,1.0"

"""Command-line reports and exit codes."""

import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from polybound.cli import main

SAMPLES = Path(__file__).resolve().parent.parent / "samples"


def run(*argv):
    out = io.StringIO()
    code = main(["--format", "json", *argv], out=out)
    text = out.getvalue()
    return code, (json.loads(text) if text else None)


@pytest.fixture(autouse=True)
def _in_samples(monkeypatch):
    monkeypatch.chdir(SAMPLES)
    monkeypatch.delenv("POLYBOUND_WINDOW", raising=False)


def test_analyze_taimanov():
    code, rep = run("analyze", "builtin:taimanov", "--window", "100")
    assert code == 0
    assert rep["cancellative"] is False
    assert rep["cancellative_verdict"]["witness"] is not None
    assert rep["idempotents"] == [0]


def test_analyze_cyclic():
    code, rep = run("analyze", "builtin:cyclic:6")
    assert code == 0 and rep["exhaustive"] is True and rep["group"] is True


def test_analyze_nat_plus():
    code, rep = run("analyze", "builtin:nat-plus", "--window", "200")
    assert rep["finite_to_one_shifts"]["status"] == "verified"


def test_cover_verify_example():
    code, rep = run("cover", "verify", "builtin:zpm", "--file", "ex.cover", "--window", "1000")
    assert code == 0 and rep["status"] == "verified" and rep["scope"] == "window"


def test_cover_verify_refuted(tmp_path):
    bad = tmp_path / "bad.cover"
    bad.write_text("x = 0\n")
    code, rep = run("cover", "verify", "builtin:cyclic:3", "--file", str(bad))
    assert code == 1 and rep["witness"] == 1


def test_cover_search_nat_none():
    code, rep = run("cover", "search", "builtin:nat-plus", "--deg", "3", "--coeffs", "0..10",
                    "--size", "5", "--window", "200")
    assert code == 2 and rep["status"] == "none-within-bounds"


def test_cover_product():
    code, rep = run("cover", "product", "cayley:c2.tbl", "cayley:c2.tbl", "--trivial")
    assert code == 0 and rep["status"] == "verified" and rep["exhaustive"] is True


def test_printed_certificate_reverifies(tmp_path):
    code, rep = run("cover", "search", "cayley:s3.tbl", "--deg", "2", "--size", "6")
    assert code == 0
    path = tmp_path / "found.cover"
    path.write_text("\n".join(rep["cover"]) + "\n")
    code, rep = run("cover", "verify", "cayley:s3.tbl", "--file", str(path))
    assert code == 0 and rep["exhaustive"] is True


def test_cover_pipeline_commands(tmp_path):
    out = tmp_path / "c4.cover"
    code, _ = run("cover", "search", "cayley:c4.tbl", "--deg", "2", "--size", "4",
                  "--out", str(out))
    assert code == 0 and out.exists()
    assert run("cover", "prune", "cayley:c4.tbl", "--file", str(out))[0] == 0
    assert run("cover", "regularize", "cayley:c4.tbl", "--file", str(out))[0] == 0
    code, rep = run("cover", "transport", "cayley:c4.tbl", "--trivial", "--classes", "0,2;1,3")
    assert code == 0 and rep["status"] == "verified"
    code, rep = run("cover", "group-extract", "cayley:c4.tbl", "--trivial")
    assert code == 0 and rep["identity"] == 0


def test_zariski_commands(tmp_path):
    code, rep = run("zariski", "report", "cayley:s3.tbl")
    assert code == 0 and rep["all_isolated"] is True and rep["exhaustive"] is True
    code, rep = run("zariski", "isolate", "builtin:int-plus", "--point", "0", "--deg", "3")
    assert code == 2 and rep["status"] == "none-within-bounds"
    cert = tmp_path / "c4.cert"
    code, rep = run("zariski", "isolate", "cayley:c4.tbl", "--point", "2", "--out", str(cert))
    assert code == 0 and rep["cover_verdict"]["status"] == "verified"
    code, rep = run("zariski", "verify", "cayley:c4.tbl", "--file", str(cert))
    assert code == 0 and rep["status"] == "verified"


def test_lab_avoider_reports_exhaustion():
    code, rep = run("lab", "avoider", "builtin:nat-plus", "--steps", "20", "--window", "500")
    assert code == 2
    assert rep["sequence"] == [0, 1, 3, 10, 41, 206]
    assert rep["reverified"] is True
    assert rep["status"] == "window exhausted at step 6"
    assert len(rep["constraint_counts"]) == 6


def test_lab_filter_taimanov():
    code, rep = run("lab", "filter", "builtin:taimanov", "--base", "cofinite", "--shifts", "none",
                    "--iterate", "1")
    assert code == 0 and rep["witness_pair"] == [0, 1]


def test_lab_filter_scenario():
    code, rep = run("lab", "filter", "builtin:taimanov", "--base", "scenario:taimanov.scn",
                    "--window", "200")
    assert code == 0 and rep["witness_pair"] == [0, 1]


def test_lab_l0_check():
    code, rep = run("lab", "l0-check", "builtin:nat-plus", "--from-avoider", "20", "--blocks",
                    "2", "--window", "500", "--avoider-window", "1300")
    assert [c["condition"] for c in rep["conditions"]] == [1, 2, 3, 4]
    assert all(c["holds"] for c in rep["conditions"])
    assert rep["avoider_status"] == "window exhausted at step 7"
    assert code == 2


def test_usage_errors():
    assert run("analyze", "builtin:nope")[0] == 3
    assert run("analyze", "product(builtin:cyclic:2")[0] == 3
    assert main(["frobnicate"], out=io.StringIO()) == 3
    assert run("cover", "search", "builtin:nat-plus", "--deg", "4", "--coeffs", "0..40",
               "--guard", "100", "--window", "50")[0] == 3


def test_window_from_environment(monkeypatch):
    monkeypatch.setenv("POLYBOUND_WINDOW", "37")
    assert run("analyze", "builtin:nat-plus")[1]["window"] == 37


def test_text_report_is_deterministic():
    argv = ["zariski", "report", "cayley:c4.tbl"]
    a, b = io.StringIO(), io.StringIO()
    main(argv, out=a)
    main(argv, out=b)
    assert a.getvalue() == b.getvalue()
    assert "exit_code: 0" in a.getvalue()


def test_console_script():
    res = subprocess.run([sys.executable, "-m", "polybound.cli", "analyze", "builtin:cyclic:2"],
                         capture_output=True, text=True, cwd=SAMPLES)
    assert res.returncode == 0 and "group: True" in res.stdout

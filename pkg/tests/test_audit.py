"""Audit checks, findings, report determinism, and the CLI."""
import json
from pathlib import Path

from nippaudit.audit import (dataset_fingerprint, emit_report,
                             reproduce_table1, run_audit)
from nippaudit.cli import main as cli_main
from nippaudit.ingest import parse_appendix, parse_main_table

FIXTURES = Path(__file__).parent / "fixtures"


def load(tag: str):
    ds = parse_main_table((FIXTURES / f"main_{tag}.txt").read_text())
    parse_appendix((FIXTURES / f"appendix_{tag}.txt").read_text(), ds)
    return ds


def test_clean_dataset_has_no_findings():
    report = run_audit(load("clean"))
    assert report.findings == []
    assert report.genus_count == 2
    assert reproduce_table1(load("clean")) == []


def test_golden_dataset_findings():
    report = run_audit(load("golden"))
    got = [(f.prime, f.field_name, f.expected, f.tabulated)
           for f in report.findings]
    assert got == [
        (2, "density", "3072", "98304"),
        (2, "splitting", "A+(22)+(608/33) [2M-scales]",
         "[2A]+[(58/3)+(38/29)]"),
        (19, "splitting", "(1)+(3/4)+(11)+(304/33) [M-scales]",
         "[(1)+(3/4)+(22)]+[(304/33)]"),
    ]
    assert report.summary() == {"density": 1, "splitting": 2}
    assert report.flagged_genera() == [(1216, 15)]
    assert reproduce_table1(load("golden")) == [(1216, 15)]


def test_column_checks_catch_tampered_values():
    text = ("GENUS 16 1 1/384\n"
            "FORM 1,1,1,1,0,0,0,0,0,0 8 2:-1 384\n")  # level and hasse wrong
    ds = parse_main_table(text)
    report = run_audit(ds, checks=("columns",))
    got = {(f.field_name, f.expected, f.tabulated) for f in report.findings}
    assert got == {("level", "4", "8"), ("hasse", "1", "-1")}


def test_aut_and_mass_checks():
    text = ("GENUS 16 1 1/192\n"
            "FORM 1,1,1,1,0,0,0,0,0,0 4 2:1 192\n")  # aut and mass wrong
    ds = parse_main_table(text)
    report = run_audit(ds, checks=("columns", "mass"))
    got = {(f.field_name, f.expected, f.tabulated) for f in report.findings}
    assert got == {("aut", "384", "192"), ("mass", "1/384", "1/192")}


def test_membership_check_flags_mixed_genus():
    text = ("GENUS 64 1 1/96\n"
            "FORM 1,1,1,4,0,0,0,0,0,0 16 2:1 0\n"
            "FORM 1,1,2,2,0,0,0,0,0,0 16 2:1 0\n")  # same disc, other genus
    ds = parse_main_table(text)
    report = run_audit(ds, checks=("membership",))
    assert [f.field_name for f in report.findings] == ["membership"]


def test_audit_is_deterministic():
    a = emit_report(run_audit(load("golden")), "machine")
    b = emit_report(run_audit(load("golden")), "machine")
    assert a == b
    doc = json.loads(a)
    assert doc["finding_count"] == 3
    assert doc["flagged_genera"] == [[1216, 15]]
    assert doc["dataset_fingerprint"] == dataset_fingerprint(load("golden"))


def test_disc_filters():
    report = run_audit(load("golden"), disc_max=1000)
    assert report.genus_count == 0
    report = run_audit(load("golden"), disc_min=1216, disc_max=1216)
    assert report.genus_count == 1


def test_human_report_mentions_findings():
    text = emit_report(run_audit(load("golden")), "human")
    assert "1216#15" in text
    assert "recomputed 3072, tabulated 98304" in text


def test_cli_end_to_end(tmp_path, capsys):
    norm = tmp_path / "dataset.json"
    rc = cli_main(["ingest",
                   "--main", str(FIXTURES / "main_golden.txt"),
                   "--appendix", str(FIXTURES / "appendix_golden.txt"),
                   "--out", str(norm)])
    assert rc == 0
    rc = cli_main(["audit", "--dataset", str(norm),
                   "--out", str(tmp_path / "report.json")])
    assert rc == 2  # findings present
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["summary"] == {"density": 1, "splitting": 2}
    rc = cli_main(["table1", "--dataset", str(norm)])
    assert rc == 2
    assert capsys.readouterr().out.splitlines()[-1] == "1216#15"

    clean = tmp_path / "clean.json"
    cli_main(["ingest", "--main", str(FIXTURES / "main_clean.txt"),
              "--appendix", str(FIXTURES / "appendix_clean.txt"),
              "--out", str(clean)])
    assert cli_main(["audit", "--dataset", str(clean),
                     "--out", str(tmp_path / "clean_report.json")]) == 0


def test_cli_queries(capsys):
    assert cli_main(["density", "--coeffs", "1,1,11,11,1,0,0,1,0,8",
                     "--p", "2", "--nipp-normalized"]) == 0
    assert capsys.readouterr().out.strip() == "3072"
    assert cli_main(["mass", "--coeffs", "1,1,1,1,0,0,0,0,0,0"]) == 0
    assert capsys.readouterr().out.strip() == "1/384"
    assert cli_main(["aut", "--coeffs", "1,1,1,1,1,1,1,1,1,1"]) == 0
    assert capsys.readouterr().out.strip() == "240"


def test_cli_error_exit_code(capsys):
    assert cli_main(["audit", "--dataset", "/nonexistent.json"]) == 1
    assert "error:" in capsys.readouterr().err

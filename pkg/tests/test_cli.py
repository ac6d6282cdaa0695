import json

import pytest

from matext.catalog import vamos
from matext.cli import main
from matext.lp import GE, LE, LinearProgram
from matext.masks import mask_of


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv)
    return code, json.loads(out)


def test_check_psm_exit_codes(capsys):
    code, rep = run_json(capsys, "check-psm", "Vamos")
    assert code == 2
    assert rep["verdict"] is False
    assert rep["schema"] == "matext-report/1"
    assert rep["refuting_triples"]
    code, rep = run_json(capsys, "check-psm", "AG_3_2")
    assert code == 0 and rep["verdict"] is True


def test_check_dl_refuted_with_pair(capsys):
    code, rep = run_json(capsys, "check-dl", "Vamos")
    assert code == 2
    assert rep["verdict"] is False
    assert rep["refuting_pairs"]


def test_check_ak_sequence_file(tmp_path, capsys):
    from matext.akci import AKSequence, AKStep

    seq = AKSequence([AKStep(x=mask_of([0, 1, 2, 3]), y=mask_of([4, 5]))])
    path = tmp_path / "seq.json"
    path.write_text(seq.to_json(8))
    code, rep = run_json(capsys, "check-ak", "Vamos", "--sequence", str(path))
    assert code == 2
    assert rep["verdict"] is False
    assert rep["certificate"]["status"] == "infeasible"


def test_check_ci_feasible_exit_zero(capsys):
    code, rep = run_json(capsys, "check-ci", "T3", "--x", "0,1", "--y", "3,6")
    assert code == 0
    assert rep["verdict"] is True


def test_check_ci_infeasible_exit_two(capsys):
    code, rep = run_json(capsys, "check-ci", "Vamos", "--x", "0,1,2,3", "--y", "4,5")
    assert code == 2
    assert rep["verdict"] is False


def test_tiny_budget_never_silently_passes(capsys):
    code, rep = run_json(
        capsys, "check-dl", "Vamos", "--depth", "2", "--budget", "1", "--cut-budget", "2"
    )
    assert code in (2, 3)
    assert rep["verdict"] in (False, "inconclusive")


def test_unknown_matroid_is_usage_error(capsys):
    code = main(["check-psm", "no_such_matroid"])
    capsys.readouterr()
    assert code == 1


def test_ss_bound_report(capsys):
    code, rep = run_json(capsys, "ss-bound", "--matroid", "U_2_3", "--dealer", "0")
    assert code == 0
    assert rep["bound"]["sigma_lower"] == "1"
    assert rep["structure"]["dealer"] == 0


def test_report_reproducible_modulo_timestamp(capsys):
    _, a = run_json(capsys, "check-psm", "Vamos")
    _, b = run_json(capsys, "check-psm", "Vamos")
    a.pop("timestamp"), b.pop("timestamp")
    assert a == b


def test_lp_solve_and_verify_roundtrip(tmp_path, capsys):
    lp = LinearProgram(1)
    lp.add_row({1: 1}, GE, 2)
    lp.add_row({1: 1}, LE, 1)
    lp_path = tmp_path / "prog.json"
    lp_path.write_text(lp.to_json())
    cert_path = tmp_path / "cert.json"
    rep_path = tmp_path / "solve.rep"
    code = main(["lp", "solve", str(lp_path), "--out", str(rep_path)])
    capsys.readouterr()
    assert code == 2
    report = json.loads(rep_path.read_text())
    assert report["verified"] is True
    cert_path.write_text(json.dumps(report["outcome"]))
    code2, rep2 = run_json(capsys, "lp", "verify", str(lp_path), str(cert_path))
    assert code2 == 0 and rep2["verified"] is True
    # a tampered certificate fails verification
    bad = dict(report["outcome"])
    bad["farkas"] = {"0": "0", "1": "0"}
    cert_path.write_text(json.dumps(bad))
    code3, rep3 = run_json(capsys, "lp", "verify", str(lp_path), str(cert_path))
    assert code3 == 1 and rep3["verified"] is False


def test_catalog_list_and_export_import(tmp_path, capsys):
    code, out = run(capsys, "catalog", "list")
    assert code == 0
    assert any(line.startswith("Vamos\t") for line in out.splitlines())
    path = tmp_path / "vamos.cat"
    code, _ = run(capsys, "catalog", "export", "Vamos", "--out", str(path))
    assert code == 0
    code, out = run(capsys, "catalog", "import", str(path))
    assert code == 0 and json.loads(out)["imported"]
    code, out = run(capsys, "catalog", "verify", str(path))
    assert code == 0 and json.loads(out)["violations"] == []


def test_catalog_file_as_matroid_source(tmp_path, capsys):
    from matext.catalog import export_string

    path = tmp_path / "v.cat"
    path.write_text(export_string(vamos()))
    code, rep = run_json(capsys, "check-psm", str(path))
    assert code == 2 and rep["verdict"] is False


def test_budget_env_override(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("MATEXT_BUDGET", "1")
    code, rep = run_json(capsys, "check-dl", "T3", "--depth", "2", "--cut-budget", "2")
    assert rep["config"]["budget"] == 1
    monkeypatch.setenv("MATEXT_BUDGET", "nope")
    code = main(["check-dl", "T3"])
    capsys.readouterr()
    assert code == 1

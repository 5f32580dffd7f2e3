import json
import subprocess
import sys

import pytest

from voa.cli import main
from voa.identities import IdentityFileError, run_identity_file
from voa.library import DATA_DIR

APPENDIX_A = DATA_DIR / "identities" / "appendix_a"


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_expr_pass(capsys):
    code, out, _ = run_cli(capsys, "verify", "n4.alg",
                           "--expr", "NO(J,J) - NO(J,J)")
    assert code == 0
    assert json.loads(out.splitlines()[0])["passed"] is True


def test_verify_expr_fail(capsys):
    code, out, _ = run_cli(capsys, "verify", "n4.alg", "--expr", "NO(J,J)")
    assert code == 1
    assert json.loads(out.splitlines()[0])["passed"] is False


def test_verify_identity_file(capsys):
    code, out, _ = run_cli(capsys, "verify", "n4.alg",
                           str(APPENDIX_A / "u30.id"))
    assert code == 0


def test_verify_corrupted_file(tmp_path, capsys):
    bad = tmp_path / "bad.id"
    bad.write_text("v := NO(J, Xq)\nassert_zero v\n")
    code, _, err = run_cli(capsys, "verify", "n4.alg", str(bad))
    assert code == 2
    assert "error" in err


def test_identity_file_requires_assertion(n4, tmp_path):
    f = tmp_path / "noop.id"
    f.write_text("v := NO(J, J)\n")
    with pytest.raises(IdentityFileError):
        run_identity_file(n4, f)


def test_identity_singular_with_gens(n4, tmp_path):
    f = tmp_path / "sing.id"
    f.write_text("v := 4 U_0_0 - 2 T - 2 d J + NO(J, J)\n"
                 "assert_singular v | J Qp Qm T U_0_0 V_0_0 @ k=-3/2\n")
    res = run_identity_file(n4, f)
    assert res["passed"]


def test_identity_decouples_at_level(n4, tmp_path):
    f = tmp_path / "dec16.id"
    f.write_text("assert_decouples U_2_0 | H T U_0_0 U_1_0 S0p_0_0 S0m_0_0 "
                 "@ k=16\n")
    res = run_identity_file(n4, f)
    assert not res["passed"]  # U_2_0 does not decouple at k=16


def test_enumerate_fractional_weight(capsys):
    code, out, _ = run_cli(capsys, "enumerate", "n4.alg",
                           "--weight", "3/2", "--charge", "0")
    rec = json.loads(out.splitlines()[0])
    assert code == 0 and sorted(rec["monomials"]) == ["Qm", "Qp"]


def test_identity_decouples(n4, tmp_path):
    f = tmp_path / "dec.id"
    f.write_text("assert_decouples U_2_0 | H Qp Qm T U_0_0 U_1_0 A_0_0 A_1_0 "
                 "B_0_0 B_1_0 V_0_0 V_1_0 S0p_0_0 S0m_0_0 S1p_0_0 S1m_0_0 "
                 "S0p_2_0 S0m_2_0 S1p_1_0 S1m_1_0 S2p_1_0 S2m_1_0 @ generic\n")
    res = run_identity_file(n4, f)
    assert res["passed"]
    assert res["exceptional_levels"] == ["16"]


def test_enumerate_cli(capsys):
    code, out, _ = run_cli(capsys, "enumerate", "sl2.alg",
                           "--weight", "2", "--charge", "0")
    assert code == 0
    rec = json.loads(out.splitlines()[0])
    assert rec["count"] == 3
    code, out, _ = run_cli(capsys, "enumerate", "sl2.alg", "--weight", "0")
    assert json.loads(out.splitlines()[0])["monomials"] == ["1"]


def test_enumerate_mod_cli(capsys):
    code, out, _ = run_cli(capsys, "enumerate", "n4.alg", "--weight", "2",
                           "--mod", "2")
    rec = json.loads(out.splitlines()[0])
    # charge-even weight 2: dJ, T, :JJ:, :JpJm: plus :JpJp:, :JmJm:
    assert code == 0 and rec["count"] == 6


def test_enumerate_gf_cli(capsys):
    code, out, _ = run_cli(capsys, "enumerate", "--gf", "2", "0",
                           "--trunc", "10")
    rec = json.loads(out.splitlines()[0])
    assert rec["series"]["2"] == 1 and rec["series"]["10"] == 5
    assert code == 0


def test_ope_cli(capsys):
    code, out, _ = run_cli(capsys, "ope", "n4.alg", "--left", "T",
                           "--right", "T")
    rec = json.loads(out.splitlines()[0])
    assert rec["poles"] == {"4": "3*k", "2": "2 T", "1": "d T"}


def test_ope_at_level_cli(capsys):
    code, out, _ = run_cli(capsys, "ope", "n4.alg", "--left", "T",
                           "--right", "T", "--level", "2")
    rec = json.loads(out.splitlines()[0])
    assert rec["poles"]["4"] == "6"


def test_unknown_suite_exit_2(capsys):
    code, _, err = run_cli(capsys, "suite", "nosuchsuite")
    assert code == 2


def test_suite_report_determinism(capsys):
    runs = []
    for _ in range(2):
        code, out, _ = run_cli(capsys, "suite", "gf-counts", "--serial")
        assert code == 0
        runs.append(out)
    assert runs[0] == runs[1]
    for line in runs[0].splitlines():
        json.loads(line)  # every line is valid JSON


def test_suite_parallel_matches_serial(capsys):
    _, serial, _ = run_cli(capsys, "suite", "cc-tables", "--serial")
    _, parallel, _ = run_cli(capsys, "suite", "cc-tables", "--jobs", "2")
    assert serial == parallel


def test_console_script_entrypoint():
    proc = subprocess.run([sys.executable, "-m", "voa.cli", "--version"],
                          capture_output=True, text=True)
    assert proc.returncode == 0


def test_decouple_cli(capsys):
    code, out, _ = run_cli(
        capsys, "decouple", "sl2.alg", "--target", "U_4_0",
        "--gens", "J,U_0_0,U_1_0,U_2_0,U_3_0")
    rec = json.loads(out.splitlines()[0])
    assert code == 0 and rec["feasible"] and rec["exceptionalLevels"] == ["0"]


def test_singular_search_cli(capsys):
    code, out, _ = run_cli(
        capsys, "singular", "n4.alg", "--weight", "2", "--charge", "0",
        "--gens", "J,Qp,Qm,T,U_0_0,U_1_0,U_2_0,A_0_0,A_1_0,A_2_0,"
                  "B_0_0,B_1_0,B_2_0,V_0_0,V_1_0,V_2_0")
    rec = json.loads(out.splitlines()[0])
    assert code == 0
    assert rec["genericDimension"] == 0
    assert "-3/2" in rec["exceptionalLevels"]


def test_report_out_path(tmp_path, capsys):
    out_file = tmp_path / "report.jsonl"
    code = main(["suite", "gf-counts", "--serial", "--out", str(out_file)])
    captured = capsys.readouterr()
    assert code == 0 and captured.out == ""
    lines = out_file.read_text().splitlines()
    assert json.loads(lines[-1])["passed"] is True


def test_singular_cli(capsys):
    code, out, _ = run_cli(
        capsys, "singular", "n4.alg",
        "--expr", "4 U_0_0 - 2 T - 2 d J + NO(J, J)",
        "--gens", "J,Qp,Qm,T,U_0_0,U_1_0,U_2_0,A_0_0,B_0_0,V_0_0",
        "--level=-3/2")
    assert code == 0
    assert json.loads(out.splitlines()[0])["passed"] is True

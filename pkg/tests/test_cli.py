import json
import subprocess
import sys

import pytest

from motivic_tori.cli import main
from motivic_tori.ring import dumps


def run_cli(capsys, *args):
    code = main(list(args))
    out, err = capsys.readouterr()
    return code, out, err


def test_check_thm15_default_context(capsys):
    code, out, _ = run_cli(capsys, "check", "thm15")
    assert code == 0
    assert "witness marks = (0,0,0,0,2): (0,0,0,0,2)" in out
    assert "A1=True A2=True" in out


def test_check_thm16_m2(capsys):
    assert run_cli(capsys, "check", "thm16", "--m", "2")[0] == 0


def test_missing_context_is_input_error(capsys):
    code, out, err = run_cli(capsys, "check", "thm15", "--context", "missing.json")
    assert code == 2 and out == "" and "missing.json" in err


def test_malformed_context_reports_location(tmp_path, capsys):
    bad = tmp_path / "ctx.json"
    bad.write_text('{"group": {"degree": 4,\n  "generators": [[1,0,2,3] [0,1,3,2]]}}')
    code, out, err = run_cli(capsys, "check", "thm15", "--context", str(bad))
    assert code == 2 and out == ""
    assert f"{bad}:2:" in err


def test_context_file_is_used(tmp_path, capsys):
    path = tmp_path / "ctx.json"
    path.write_text(json.dumps({
        "group": {"degree": 4, "generators": [[1, 0, 2, 3], [0, 1, 3, 2]], "names": ["s1", "s2"]},
        "labels": {"E1": ["s1"], "E2": ["s2"], "E12": ["s1*s2"], "K": [], "F": ["s1", "s2"]},
        "axioms": {"A1": False}}))
    code, out, _ = run_cli(capsys, "check", "thm15", "--context", str(path))
    assert code == 0 and "A1=False" in out and "UNEQUAL (model only)" in out


def test_unknown_command_rejected(capsys):
    code, out, _ = run_cli(capsys, "check", "thm99")
    assert code == 2 and out == ""
    assert run_cli(capsys, "frobnicate")[0] == 2


@pytest.mark.parametrize("args,expected", [
    (("compute", "qs-class", "--gset", "regular"),
     "L^4 - [K]*L^3 + (3*[K] - [E1] - [E2] - [E12])*L^2 - [K]*L + (-1 - [K] + [E1] + [E2] + [E12])"),
    (("compute", "marks", "--elem", "2+[K]-[E1]-[E2]-[E12]"), "(0,0,0,0,2)"),
    (("compute", "p1-class", "--gset", "coset:E12"), "L^2 + [E12]*L + 1"),
    (("compute", "burnside-mul", "--elem", "[E1]", "--elem", "[E2]"), "[K]"),
    (("compute", "qs-class", "--gset", "coset:E1+coset:E2"),
     "L^4 + (-[E1] - [E2])*L^3 + (-2 + [K] + [E1] + [E2])*L^2 + (-2*[K] + [E1] + [E2])*L + (1 + [K] - [E1] - [E2])"),
])
def test_compute(capsys, args, expected):
    code, out, _ = run_cli(capsys, *args)
    assert code == 0 and out == expected + "\n"


def test_compute_gset_json_fragment(capsys):
    frag = '{"gset": {"transitive": [{"stabilizer": ["s1"]}, {"stabilizer": ["s2"]}]}}'
    a = run_cli(capsys, "compute", "qs-class", "--gset", frag)
    b = run_cli(capsys, "compute", "qs-class", "--gset", "index")
    assert a[0] == 0 and a[1] == b[1]


def test_compute_torus_class(capsys):
    code, out, _ = run_cli(capsys, "compute", "torus-class", "--torus", "norm-one:E12")
    assert code == 0 and out.splitlines() == ["L + (1 - [E12])", "stably rational: yes"]


def test_compute_bad_input(capsys):
    assert run_cli(capsys, "compute", "marks", "--elem", "[Q]")[0] == 2
    assert run_cli(capsys, "compute", "qs-class", "--gset", "cosets:E1")[0] == 2
    assert run_cli(capsys, "compute", "burnside-mul", "--elem", "[K]")[0] == 2


def test_compute_is_deterministic(capsys):
    outs = {run_cli(capsys, "compute", "qs-class", "--gset", "regular", "--json")[1] for _ in range(3)}
    assert len(outs) == 1


def test_json_report_round_trips(capsys):
    code, out, _ = run_cli(capsys, "check", "lemma-t", "--json")
    assert code == 0
    assert dumps(json.loads(out)) + "\n" == out


def test_strict_turns_discrepancies_into_failures(capsys):
    assert run_cli(capsys, "check", "lemma-t")[0] == 0
    assert run_cli(capsys, "check", "lemma-t", "--strict")[0] == 1


def test_torsion_exit_code_reflects_failures(capsys):
    assert run_cli(capsys, "check", "remark", "--algebra", "E1")[0] == 0
    assert run_cli(capsys, "check", "remark", "--algebra", "E", "--n", "4")[0] == 1


def test_out_file(tmp_path, capsys):
    path = tmp_path / "r.json"
    code, out, _ = run_cli(capsys, "check", "basics", "--json", "--out", str(path))
    assert code == 0 and out == ""
    assert json.loads(path.read_text())["exit_code"] == 0


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "motivic_tori", "compute", "marks",
                           "--elem", "2+[K]-[E1]-[E2]-[E12]"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "(0,0,0,0,2)\n"

import json
import subprocess
import sys

import pytest

from conftest import CORPUS
from specdef import globalctl
from specdef.cli import main

RUNNING = str(CORPUS / "running.pl")

GOLDEN = {
    "full": ["shfr", "hom-emb", "id", "id", "analyze"],
    "polyvariant-ai": ["shfr", "one-step", "base-form", "id", "analyze"],
    "abstract-spec": ["shfr", "derive-then-aexec", "base-form", "id", "analyze"],
    "classical-pd": ["pd", "hom-emb", "hom-emb-msg", "id", "apd"],
}
KEYS = ("domain", "unfold", "generalize", "widen", "engine")


@pytest.mark.parametrize("preset", sorted(GOLDEN))
def test_print_config_presets(preset, capsys):
    assert main(["--preset", preset, "--print-config"]) == 0
    cfg = json.loads(capsys.readouterr().out)
    assert [cfg[k] for k in KEYS] == GOLDEN[preset]
    assert cfg["preset"] == preset


def test_override_clears_preset(capsys):
    main(["--preset", "full", "--generalize", "hom-emb-msg", "--print-config"])
    cfg = json.loads(capsys.readouterr().out)
    assert cfg["preset"] is None and cfg["generalize"] == "hom-emb-msg"


def test_summary_and_outputs(tmp_path, capsys):
    out, dot, js = tmp_path / "o.pl", tmp_path / "g.dot", tmp_path / "t.json"
    assert main([RUNNING, "--preset", "full", "-o", str(out), "--dot", str(dot),
                 "--json", str(js)]) == 0
    err = capsys.readouterr().err
    assert "answers: 3  specializations: 3  generalizations: 3  updates: 0  time:" in err
    assert out.read_text().count("sp_tw") >= 3
    assert dot.read_text().startswith("digraph")
    assert set(json.loads(js.read_text())) == {"answers", "deps", "gen", "spec"}


def test_check_passes(capsys):
    assert main([RUNNING, "--check", "20"]) == 0
    assert "mismatches 0" in capsys.readouterr().err


def test_parse_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.pl"
    bad.write_text("p(X :- q.\n")
    assert main([str(bad)]) == 1
    assert main([str(tmp_path / "missing.pl")]) == 1
    assert main([]) == 1


def test_conflicting_entry_is_a_user_error(tmp_path):
    f = tmp_path / "c.pl"
    f.write_text(":- entry p(X) : (ground(X), var(X)).\np(a).\n")
    assert main([str(f)]) == 1


def test_internal_error_exit_code(monkeypatch):
    monkeypatch.setattr(globalctl, "MAX_ST", 1)
    assert main([RUNNING]) == 2


def test_oracle_mismatch_exit_code(capsys):
    # without success propagation shfr lets var/1 succeed too early
    assert main([RUNNING, "--engine", "apd", "--check", "20"]) == 3
    assert "mismatches 0" not in capsys.readouterr().err


def test_trace(capsys):
    main([RUNNING, "--trace"])
    assert "exec" in capsys.readouterr().err


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "specdef", RUNNING, "--preset", "classical-pd"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and "var(" in r.stdout


def test_exec_table_option(tmp_path, capsys):
    t = tmp_path / "t.exec"
    t.write_text("two(X) ~> true.\n")
    src = tmp_path / "p.pl"
    src.write_text(":- entry p(X).\np(X) :- two(X).\ntwo(a).\n")
    assert main([str(src), "--exec-table", str(t), "--preset", "abstract-spec"]) == 0
    assert capsys.readouterr().out.splitlines()[1:] == ["sp_p(A)."]

import json

import pytest

from conftest import CORPUS, GRAPH_FILES, SCHEME_FILES
from treeaut import __version__
from treeaut.cli import run

ALL_FILES = [f"{n}.tg" for n in SCHEME_FILES] + [f"{n}.eig" for n in GRAPH_FILES]


def call(capsys, *argv):
    code = run([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def as_json(capsys, *argv):
    code, out, _ = call(capsys, *argv, "--format", "json")
    assert code == 0
    return json.loads(out)


@pytest.mark.parametrize("fname", ALL_FILES)
def test_analyze_matches_golden(capsys, fname):
    got = as_json(capsys, "analyze", CORPUS / fname)
    stem = fname.rsplit(".", 1)[0]
    want = json.loads((CORPUS / "expected" / f"{stem}.json").read_text())
    assert got == want


def test_report_header(capsys):
    d = as_json(capsys, "analyze", CORPUS / "e4.tg", "--seed", "5")
    assert d["schema_version"] == 1 and d["tool_version"] == __version__
    assert d["seed"] == 5 and d["kind"] == "scheme"
    d = as_json(capsys, "analyze", CORPUS / "biregular.eig")
    assert d["kind"] == "nonrooted"


def test_mode_selection(capsys):
    d = as_json(capsys, "analyze", CORPUS / "rigid_chain.tg", "--mode", "reduced", "--no-oracle")
    assert set(d["verdicts"]["STRONG_COFINALITY"]) == {"GROUP_REDUCED"}
    assert d["oracle"] is None
    code, out, _ = call(capsys, "analyze", CORPUS / "rigid_chain.tg")
    assert code == 0 and "PAPER_LITERAL" in out and "GROUP_REDUCED" in out


def test_text_output_is_deterministic(capsys):
    a = call(capsys, "analyze", CORPUS / "binary.tg", "--seed", "2")
    b = call(capsys, "analyze", CORPUS / "binary.tg", "--seed", "2")
    assert a == b and a[0] == 0


def test_acl_command(capsys):
    d = as_json(capsys, "acl", CORPUS / "e4.tg", "--fix", "e0.c0", "--enumerate")
    assert d["closure"]["finite"] is False and d["closure"]["witness_cycle"][0]["from"] == "v"
    code, out, _ = call(capsys, "acl", CORPUS / "e4.tg", "--fix", "e0.c0/e0.c1", "--node", "e0.c0")
    assert code == 0 and "orbit of e0.c0: 1" in out
    d = as_json(capsys, "acl", CORPUS / "star.tg", "--fix", "e0.c0,e0.c1", "--enumerate")
    assert d["closure"] == {"finite": True, "members": ["", "e0.c0", "e0.c1"]}


def test_canon_and_witness(capsys):
    d = as_json(capsys, "canon", CORPUS / "e4.tg")
    assert d["classes"] == ["r", "v"]
    d = as_json(capsys, "witness", CORPUS / "binary.tg")
    assert d["applicable"] and d["witness"]["shape"] == "INFINITE_BRANCH"
    code, out, _ = call(capsys, "witness", CORPUS / "star.tg")
    assert code == 0 and out.startswith("NOT_APPLICABLE")


def test_oracle_command(capsys):
    d = as_json(capsys, "oracle", CORPUS / "binary.tg", "--check", "group-order")
    assert d["enumerated"] == d["formula"] == 128
    d = as_json(capsys, "oracle", CORPUS / "binary.tg", "--check", "orbits")
    assert d["mismatches"] == 0
    d = as_json(capsys, "oracle", CORPUS / "e6.tg", "--check", "signs")
    assert d["homomorphism_breaks"] == 0 and d["levels"] == d["levels_with_preimage"]
    d = as_json(capsys, "oracle", CORPUS / "star.tg", "--check", "wap")
    assert d["status"] == "PASS"


def test_nonrooted_command(capsys):
    d = as_json(capsys, "nonrooted", CORPUS / "omega_loop.eig")
    assert d["conditions"]["finite_closures"] == {"PAPER_LITERAL": True, "GROUP_REDUCED": True}
    code, _, err = call(capsys, "nonrooted", CORPUS / "star.tg")
    assert code == 1 and err


def test_exit_codes(capsys, tmp_path):
    assert call(capsys, "analyze", tmp_path / "missing.tg")[0] == 1
    bad = tmp_path / "bad.tg"
    bad.write_text("root = v; class v { child v * }")
    code, _, err = call(capsys, "analyze", bad)
    assert code == 1 and "line 1" in err
    invalid = tmp_path / "invalid.tg"
    invalid.write_text("root = v; class v { child w * 1; }")
    assert call(capsys, "analyze", invalid)[0] == 2
    assert call(capsys, "acl", CORPUS / "e4.tg", "--fix", "e3.c0")[0] == 2
    assert call(capsys, "oracle", CORPUS / "e4.tg", "--check", "wap")[0] == 3
    assert call(capsys, "acl", CORPUS / "binary.tg", "--fix", "e0.c0", "--enumerate", "--budget", "3")[0] == 0
    assert call(capsys, "analyze", CORPUS / "binary.tg", "--depth", "30")[0] == 3
    assert call(capsys, "frobnicate")[0] == 1
    assert call(capsys)[0] == 1

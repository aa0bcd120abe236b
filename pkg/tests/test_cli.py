from __future__ import annotations

import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from gpdatlas.cli import results_block, run

SPECS = Path(__file__).resolve().parents[1] / "specs"


def invoke(*argv: str) -> tuple[int, str]:
    out = io.StringIO()
    code = run([str(a) for a in argv], out=out)
    return code, out.getvalue()


def invoke_json(*argv: str) -> tuple[int, dict]:
    code, text = invoke(*argv, "--format", "json")
    return code, json.loads(text)


def spec(name: str) -> str:
    return str(SPECS / name)


# ------------------------------------------------------------- exit codes

@pytest.mark.parametrize("argv,code", [
    (["validate", "d3.json"], 0),
    (["validate", "malformed.json"], 1),
    (["validate", "invalid_split.json"], 2),
    (["pi0", "invalid_split.json"], 2),
    (["homology", "a_z2.yaml", "--budget", "2"], 3),
    (["pi1", "rombitos.json", "--base", "zz"], 1),
    (["jmap", "d3.json"], 2),  # not irreducible
])
def test_exit_codes(argv, code):
    got, _ = invoke(argv[0], spec(argv[1]), *argv[2:])
    assert got == code


def test_missing_file_is_a_parse_error(tmp_path):
    code, rep = invoke_json("pi0", tmp_path / "nope.json")
    assert code == 1 and "cannot read" in rep["error"]


@pytest.mark.parametrize("doc", [
    "[1, 2, 3]",
    '{"version": "v2", "atlas": {"kind": "gl", "n": 2, "m": 2}}',
    '{"version": "v1"}',
    '{"version": "v1", "atlas": {"kind": "nonsense"}}',
    '{"version": "v1", "atlas": {"kind": "gl", "n": 2, "m": 2}, "options": {"pipeline": ["fold"]}}',
    "version: v1\natlas: {kind: explicit, points: [a], locals: [{label: L, components: [{objects: [z]}]}]}\n",
    ": : :\n\t- [",
])
def test_malformed_documents(tmp_path, doc):
    p = tmp_path / "bad.yaml"
    p.write_text(doc)
    assert invoke("validate", p)[0] == 1


def test_budget_from_environment(monkeypatch):
    monkeypatch.setenv("GPDATLAS_BUDGET", "10")
    assert invoke("nerve", spec("d3.json"), "--dim", "3")[0] == 3


# --------------------------------------------------------------- examples

def test_validate_d3_is_not_good():
    code, rep = invoke_json("validate", spec("d3.json"))
    assert code == 0
    assert rep["results"]["validation"]["valid"] is True
    assert rep["results"]["predicates"]["good"]["value"] is False


def test_validate_circle_has_infimum():
    _, rep = invoke_json("validate", spec("sphere1.json"))
    assert rep["results"]["predicates"]["infimum"]["value"] is True


def test_pi1_weak_d3_text():
    code, text = invoke("pi1", spec("d3.json"), "--weak")
    assert code == 0
    assert "free of rank 2 (detected)" in text


def test_pi1_both_prints_generator_images():
    code, rep = invoke_json("pi1", spec("d3.json"), "--both")
    assert code == 0
    res = rep["results"]
    assert len(res["generator_images"]) == 2
    assert res["strong"]["abelianization"]["free_rank"] == 2
    _, text = invoke("pi1", spec("d3.json"), "--both")
    assert "strong" in text and "weak" in text


def test_pi1_base_by_label_and_index():
    a = invoke_json("pi1", spec("rombitos.json"), "--strong", "--base", "c", "--no-timing")[1]["results"]
    b = invoke_json("pi1", spec("rombitos.json"), "--strong", "--base", "2", "--no-timing")[1]["results"]
    assert a == b


def test_homology_rombitos():
    code, rep = invoke_json("homology", spec("rombitos.json"), "--max-dim", "4")
    assert code == 0
    assert [g["text"] for g in rep["results"]["groups"]] == ["Z", "Z", "0", "0"]


def test_homology_uses_max_dim_option_from_yaml():
    code, rep = invoke_json("homology", spec("a_z2.yaml"))
    assert code == 0
    assert [g["text"] for g in rep["results"]["groups"]] == ["Z", "Z/2", "0", "Z/2", "0"]


def test_pi0_gl25_has_four_components():
    code, rep = invoke_json("pi0", spec("gl25.json"))
    assert code == 0 and rep["results"]["count"] == 4


def test_p_check_on_explicit_yaml():
    code, rep = invoke_json("p-check", spec("z4_over_z2.yaml"))
    assert code == 0
    assert rep["results"]["hypotheses"]["all_locals_simply_connected"] is False
    assert rep["results"]["consistent"] is True


def test_jmap_on_circle():
    code, rep = invoke_json("jmap", spec("sphere1.json"))
    assert code == 0
    assert rep["results"]["injective"] is True and rep["results"]["equivalence_holds"] is True


def test_nerve_counts_text():
    code, text = invoke("nerve", spec("sphere1.json"), "--dim", "3")
    assert code == 0
    assert "dim 1: 6 nondegenerate simplices" in text


def test_pipeline_is_echoed(tmp_path):
    doc = json.loads((SPECS / "d3.json").read_text())
    doc.setdefault("options", {})["pipeline"] = ["regularize", "irreducibilize", "dedupe"]
    p = tmp_path / "d3p.json"
    p.write_text(json.dumps(doc))
    code, rep = invoke_json("pi1", p, "--weak")
    assert code == 0
    assert rep["pipeline"] == ["regularize", "irreducibilize", "dedupe"]
    assert rep["results"]["weak"]["presentation"]["description"] == "free of rank 2 (detected)"


def test_selfcheck_reports_seeds():
    code, rep = invoke_json("selfcheck", "--seed", "3", "--count", "4")
    assert code == 0
    assert rep["results"]["seeds"] == [3, 4, 5, 6]
    assert rep["results"]["ok"] is True


# ------------------------------------------------------------ determinism

@pytest.mark.parametrize("argv", [
    ["validate", "d3.json"],
    ["pi1", "d3.json", "--both"],
    ["homology", "rombitos.json"],
    ["nerve", "sphere1.json", "--weak"],
    ["p-check", "sphere1.json"],
])
def test_results_block_is_byte_stable(argv):
    args = [argv[0], spec(argv[1]), *argv[2:], "--format", "json"]
    first, second = io.StringIO(), io.StringIO()
    run(args, out=first)
    run(args, out=second)
    assert results_block(first.getvalue()) == results_block(second.getvalue())
    no_time = [*args, "--no-timing"]
    a, b = io.StringIO(), io.StringIO()
    run(no_time, out=a)
    run(no_time, out=b)
    assert a.getvalue() == b.getvalue()


def test_report_echoes_command_and_digest():
    import hashlib

    _, rep = invoke_json("pi0", spec("d3.json"))
    assert rep["command"]["name"] == "pi0"
    assert rep["input"]["sha256"] == hashlib.sha256((SPECS / "d3.json").read_bytes()).hexdigest()
    assert rep["exit_code"] == 0
    assert "timing_seconds" in rep


# ---------------------------------------------------------------- exports

def test_json_export_round_trip(tmp_path):
    out = tmp_path / "s1.json"
    code, _ = invoke("nerve", spec("sphere1.json"), "--dim", "3", "--export", "json", "--output", out)
    assert code == 0
    direct = invoke_json("homology", spec("sphere1.json"), "--max-dim", "3", "--no-timing")[1]["results"]
    imported = invoke_json("homology", out, "--no-timing")[1]["results"]
    assert imported["groups"] == direct["groups"]
    assert imported["chain_ranks"] == direct["chain_ranks"]


def test_dot_export_to_stdout():
    code, text = invoke("nerve", spec("sphere1.json"), "--dim", "2", "--export", "dot")
    assert code == 0
    assert text.lstrip().startswith("digraph")
    assert text.count(" -> v") == 6


def test_console_script_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "gpdatlas.cli", "pi0", spec("d3.json"), "--no-timing"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert "1 component(s)" in proc.stdout

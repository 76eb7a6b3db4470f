import json
import os
import subprocess
import sys
from pathlib import Path

import jsonschema
import pytest

SCHEMA = json.loads((Path(__file__).resolve().parent.parent / "docs" / "report-schema.json").read_text())


def run(*args, cwd=None):
    proc = subprocess.run([sys.executable, "-m", "modyangian.cli", *map(str, args)],
                          capture_output=True, text=True, cwd=cwd, timeout=600)
    return proc


def records(text):
    return [json.loads(line) for line in text.splitlines() if line.strip()]


@pytest.fixture(scope="module")
def built(tmp_path_factory):
    d = tmp_path_factory.mktemp("cache")
    proc = run("build-basis", "--N", 3, "--p", 3, "--D", 4, "--cache-dir", d)
    assert proc.returncode == 0, proc.stderr
    return d, json.loads(proc.stdout)


def test_build_basis_reports_dimensions(built):
    d, info = built
    assert info["dimensions"] == [1, 4, 14, 40, 105]
    assert info["complete_degree"] == 4
    assert Path(info["cache"]).name == "basis-N3-p3-D4.bin"


def test_build_is_byte_identical(built, tmp_path):
    d, info = built
    out = tmp_path / "again.bin"
    assert run("build-basis", "--N", 3, "--p", 3, "--D", 4, "--out", out).returncode == 0
    assert out.read_bytes() == Path(info["cache"]).read_bytes()


@pytest.mark.parametrize("p", ["2", "9", "x"])
def test_bad_prime_is_rejected(p):
    proc = run("build-basis", "--p", p)
    assert proc.returncode == 2
    assert "--p" in proc.stderr


def test_bad_configuration_is_rejected():
    assert run("build-basis", "--N", 2).returncode == 2
    assert run("verify", "--D", 3, "--K", 4).returncode == 2


def test_verify_current(tmp_path):
    out = tmp_path / "current.jsonl"
    proc = run("verify", "--suite", "current", "--N", 3, "--L", 2, "--p", 3, "--out", out)
    assert proc.returncode == 0, proc.stderr
    recs = records(out.read_text())
    assert len(recs) == 2 and all(r["status"] == "PASS" for r in recs)
    for r in recs:
        jsonschema.validate(r, SCHEMA)


def test_verify_presentation_uses_cache(built):
    d, _ = built
    proc = run("verify", "--suite", "presentation", "--N", 3, "--p", 3, "--D", 4, "--K", 3,
               "--cache-dir", d, "--no-build")
    assert proc.returncode == 0, proc.stderr
    recs = records(proc.stdout)
    assert {r["status"] for r in recs} <= {"PASS", "NOT-APPLICABLE"}
    assert {"hihj", "eifj", "PBW map", "HC center"} <= {r["tag"] for r in recs}
    for r in recs:
        jsonschema.validate(r, SCHEMA)
        assert r["params"]["D"] == 4


def test_all_suites_produce_valid_records(built):
    d, _ = built
    proc = run("verify", "--suite", "all", "--N", 3, "--p", 3, "--D", 4, "--K", 2, "--L", 2,
               "--cache-dir", d, "--no-build")
    assert proc.returncode == 0, proc.stderr
    recs = records(proc.stdout)
    assert {r["suite"] for r in recs} >= {"current", "presentation", "lemma", "center", "gr",
                                          "automorphisms"}
    for r in recs:
        jsonschema.validate(r, SCHEMA)
    assert "FAIL=0" in proc.stderr


def test_missing_cache_with_no_build(tmp_path):
    proc = run("verify", "--suite", "center", "--D", 3, "--K", 2, "--cache-dir", tmp_path,
               "--no-build")
    assert proc.returncode != 0
    assert "no usable basis cache" in proc.stderr


def test_corrupted_cache_is_refused(built, tmp_path):
    d, info = built
    bad = tmp_path / "basis-N3-p3-D4.bin"
    data = bytearray(Path(info["cache"]).read_bytes())
    data[-2] ^= 0xFF
    bad.write_bytes(bytes(data))
    proc = run("verify", "--suite", "center", "--D", 4, "--K", 2, "--cache-dir", tmp_path,
               "--no-build")
    assert proc.returncode != 0
    assert "checksum" in proc.stderr


def test_budget_exceeded_leaves_no_partial_file(tmp_path):
    proc = run("build-basis", "--D", 4, "--budget-rows", 20, "--cache-dir", tmp_path)
    assert proc.returncode != 0
    assert list(tmp_path.iterdir()) == []


def test_config_file_with_flag_override(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"N": 4, "L": 2, "p": 5, "suite": "current"}))
    proc = run("verify", "--config", cfg, "--p", 3)
    assert proc.returncode == 0, proc.stderr
    recs = records(proc.stdout)
    assert all(r["params"] == {"N": 4, "L": 2, "p": 3} for r in recs)


def test_self_test_suite(tmp_path):
    proc = run("verify", "--suite", "self-test", "--D", 3, "--K", 2)
    assert proc.returncode == 0, proc.stderr
    recs = records(proc.stdout)
    assert [r["id"] for r in recs] == ["harness-self-test[relation]", "harness-self-test[rule]"]
    assert all(r["status"] == "PASS" for r in recs)


# -- report ---------------------------------------------------------------------

def make_record(status="PASS", N=3, p=3, D=4, suite="center"):
    return {"schema": "modyangian-report/1", "id": "x", "tag": "t", "suite": suite,
            "params": {"N": N, "p": p, "D": D}, "status": status,
            "counterexample": "diff" if status == "FAIL" else None,
            "compared": 1, "skipped": 0, "wall_time": 0.0, "note": ""}


def write(path, recs):
    path.write_text("".join(json.dumps(r) + "\n" for r in recs))
    return path


def test_report_empty_input():
    proc = run("report")
    assert proc.returncode == 0
    assert len(proc.stdout.splitlines()) == 1


def test_report_groups_disjoint_parameters(tmp_path):
    a = write(tmp_path / "a.jsonl", [make_record(), make_record()])
    b = write(tmp_path / "b.jsonl", [make_record(N=4)])
    proc = run("report", a, b)
    assert proc.returncode == 0
    rows = proc.stdout.splitlines()[1:]
    assert len(rows) == 2
    assert rows[0].split()[:5] == ["center", "3", "3", "4", "2"]


def test_report_fail_exit_code(tmp_path):
    a = write(tmp_path / "a.jsonl", [make_record(), make_record("FAIL", D=5)])
    assert run("report", a).returncode == 1


def test_report_warns_on_malformed_file(tmp_path):
    good = write(tmp_path / "good.jsonl", [make_record()])
    bad = tmp_path / "bad.jsonl"
    bad.write_text("{not json\n")
    proc = run("report", good, bad, tmp_path / "missing.jsonl")
    assert proc.returncode == 0
    assert proc.stderr.count("warning") == 2
    assert len(proc.stdout.splitlines()) == 2


def test_console_script_is_installed():
    proc = subprocess.run(["modyangian", "--help"], capture_output=True, text=True)
    if proc.returncode == 127 or not proc.stdout:
        pytest.skip("console script not on PATH")
    assert "build-basis" in proc.stdout

from __future__ import annotations

import json
from pathlib import Path

import pytest

from alcmod.cli import run
from alcmod.parser_io import parse_ontology, serialize_ontology, serialize_signature
from alcmod.syntax import Signature
from helpers import CYCLIC, CYCLIC_SIGMA, RUNNING, RUNNING_SIGMA, axioms
from test_acceptance import GM_STAR


@pytest.fixture
def files(tmp_path: Path):
    onto = tmp_path / "running.ofn"
    onto.write_text(RUNNING, encoding="utf-8")
    sig = tmp_path / "sig.txt"
    sig.write_text(serialize_signature(RUNNING_SIGMA), encoding="utf-8")
    return tmp_path, onto, sig


def test_gm_star_writes_the_single_axiom(files):
    tmp, onto, sig = files
    out = tmp / "out.ofn"
    assert run(["gm-star", "--ontology", str(onto), "--signature", str(sig), "--out", str(out)]) == 0
    assert set(parse_ontology(out.read_text(encoding="utf-8")).axioms) == axioms(GM_STAR)


def test_family_then_gm(tmp_path):
    onto = tmp_path / "o3.ofn"
    assert run(["family", "--n", "3", "--out", str(onto)]) == 0
    sig = onto.with_suffix(".sig")
    assert sig.exists()
    out, report = tmp_path / "gm.ofn", tmp_path / "gm.json"
    code = run(["gm", "--ontology", str(onto), "--signature", str(sig), "--out", str(out), "--report", str(report)])
    assert code == 0
    assert len(parse_ontology(out.read_text(encoding="utf-8"))) == 8
    assert json.loads(report.read_text(encoding="utf-8"))["result_axioms"] == 8


def test_check_against_itself(files, capsys):
    _, onto, sig = files
    code = run(["check", "--ontology", str(onto), "--against", str(onto), "--signature", str(sig),
                "--samples", "20", "--depth", "2", "--seed", "1"])
    assert code == 0
    assert capsys.readouterr().out.startswith("inseparable")


def test_check_reports_separation(tmp_path, capsys):
    onto, empty, sig = tmp_path / "o.ofn", tmp_path / "empty.ofn", tmp_path / "sig.txt"
    onto.write_text("SubClassOf(A B)\n", encoding="utf-8")
    empty.write_text("", encoding="utf-8")
    sig.write_text(serialize_signature(Signature.of(["A", "B"])), encoding="utf-8")
    code = run(["check", "--ontology", str(onto), "--against", str(empty), "--signature", str(sig)])
    assert code == 0
    assert capsys.readouterr().out.startswith("separable")


def test_normalize_prints_clauses_and_definers(files, capsys):
    _, onto, _ = files
    assert run(["normalize", "--ontology", str(onto)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert sum(1 for l in lines if l.startswith("SubClassOf")) == 9
    assert sum(1 for l in lines if l.startswith("# _D")) == 4


def test_dm_output_is_subset_of_input(files):
    tmp, onto, sig = files
    out = tmp / "dm.ofn"
    assert run(["dm", "--ontology", str(onto), "--signature", str(sig), "--out", str(out)]) == 0
    src = set(serialize_ontology(parse_ontology(RUNNING)).splitlines())
    assert set(out.read_text(encoding="utf-8").splitlines()) <= src


def test_ui_report_carries_status(tmp_path):
    onto, sig, report = tmp_path / "c.ofn", tmp_path / "c.sig", tmp_path / "r.json"
    onto.write_text(CYCLIC, encoding="utf-8")
    sig.write_text(serialize_signature(CYCLIC_SIGMA), encoding="utf-8")
    assert run(["ui", "--ontology", str(onto), "--signature", str(sig), "--out", str(tmp_path / "u.ofn"),
                "--report", str(report)]) == 0
    data = json.loads(report.read_text(encoding="utf-8"))
    assert data["ui_status"] == "Approximate"
    assert {"input_length", "cl_length", "ri_size", "stage_times_ms", "subsumption_budget_hit"} <= data.keys()


def test_locality(files, capsys):
    _, onto, sig = files
    assert run(["locality", "--ontology", str(onto), "--signature", str(sig)]) == 0
    assert len(parse_ontology(capsys.readouterr().out)) == 5


def test_outputs_are_deterministic(files):
    tmp, onto, sig = files
    texts = []
    for i in range(2):
        out, rep = tmp / f"o{i}.ofn", tmp / f"r{i}.json"
        run(["gm", "--ontology", str(onto), "--signature", str(sig), "--out", str(out), "--report", str(rep)])
        data = json.loads(rep.read_text(encoding="utf-8"))
        data.pop("stage_times_ms")
        texts.append((out.read_text(encoding="utf-8"), data))
    assert texts[0] == texts[1]


def test_verify_rewrites_flag(files):
    tmp, onto, sig = files
    out = tmp / "v.ofn"
    assert run(["gm-star", "--ontology", str(onto), "--signature", str(sig), "--out", str(out), "--verify-rewrites"]) == 0
    assert set(parse_ontology(out.read_text(encoding="utf-8")).axioms) == axioms(GM_STAR)


class TestErrors:
    def test_missing_file(self, tmp_path):
        assert run(["gm", "--ontology", str(tmp_path / "nope"), "--signature", str(tmp_path / "nope")]) == 1

    def test_parse_error(self, files):
        tmp, _, sig = files
        bad = tmp / "bad.ofn"
        bad.write_text("SubClassOf(A", encoding="utf-8")
        assert run(["gm", "--ontology", str(bad), "--signature", str(sig)]) == 1

    def test_unknown_command(self):
        assert run(["frobnicate"]) == 1

    def test_bench_signature_too_large(self, files):
        _, onto, _ = files
        assert run(["bench", "--ontology", str(onto), "--sig-size", "99"]) == 1

    def test_family_needs_positive_n(self, tmp_path):
        assert run(["family", "--n", "0", "--out", str(tmp_path / "f.ofn")]) == 1

    def test_budget_exhaustion(self, files):
        _, onto, sig = files
        code = run(["check", "--ontology", str(onto), "--against", str(onto), "--signature", str(sig),
                    "--max-tableau-nodes", "1"])
        assert code == 2

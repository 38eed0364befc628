"""Command-line interface: commands, exit codes, JSON and SVG output."""

import json
import os
import xml.etree.ElementTree as ET

import pytest
from click.testing import CliRunner

from polymorse import cli


@pytest.fixture()
def runner():
    return CliRunner()


def test_homs_text_pentagon(runner):
    res = runner.invoke(cli.main, [
        "homs", "--surface", "bl2", "--from", "0,0,0", "--to", "0,-1,1"])
    assert res.exit_code == 0
    assert "dim 1" in res.output
    assert "generator V(0,0)  carrier E1, E5" in res.output
    assert res.output.count("M2:") == 2
    assert "M1:" not in res.output


def test_homs_text_hexagon(runner):
    res = runner.invoke(cli.main, [
        "homs", "--surface", "bl3", "--from", "0,0,0,0", "--to", "0,0,0,1"])
    assert res.exit_code == 0
    assert "dim 3" in res.output
    for edge in ("E2", "E6", "E4"):
        assert f"carrier {edge}" in res.output


def test_homs_identity(runner):
    res = runner.invoke(cli.main, [
        "homs", "--surface", "bl2", "--from", "0,0,0", "--to", "0,0,0"])
    assert res.exit_code == 0
    assert "dim 1" in res.output
    assert "carrier P" in res.output


def test_homs_json(runner):
    res = runner.invoke(cli.main, [
        "homs", "--surface", "bl2", "--from", "0,0,0", "--to", "0,-1,1",
        "--format", "json"])
    assert res.exit_code == 0
    blob = json.loads(res.output)
    assert blob["surface"] == "bl2"
    assert blob["diff"] == [0, -1, 1]
    assert len(blob["generators"]) == 1
    assert blob["generators"][0]["carrier"] == ["E1", "E5"]
    assert blob["generators"][0]["degree"] == 0
    assert len(blob["rejected"]) == 2


def test_homs_bad_vector_length_exits_2(runner):
    res = runner.invoke(cli.main, [
        "homs", "--surface", "bl2", "--from", "0,0", "--to", "0,0,1"])
    assert res.exit_code == 2
    assert "Usage" in res.output
    assert "--from" in res.output


def test_homs_non_integer_vector_exits_2(runner):
    res = runner.invoke(cli.main, [
        "homs", "--surface", "bl2", "--from", "0,0,x", "--to", "0,0,1"])
    assert res.exit_code == 2


def test_unknown_surface_exits_2(runner):
    res = runner.invoke(cli.main, [
        "homs", "--surface", "nope", "--from", "0,0,0", "--to", "0,0,1"])
    assert res.exit_code == 2
    assert "cannot load surface" in res.output


def test_numeric_failure_exits_3(runner, monkeypatch):
    def boom(*a, **k):
        raise ArithmeticError("synthetic blowup")

    monkeypatch.setattr(cli.mc, "hom_space", boom)
    res = runner.invoke(cli.main, [
        "homs", "--surface", "bl2", "--from", "0,0,0", "--to", "0,0,1"])
    assert res.exit_code == 3
    assert "numeric failure" in res.output


def test_compose_weight_line(runner):
    res = runner.invoke(cli.main, ["compose", "--surface", "bl2"])
    assert res.exit_code == 0
    assert "96 entries (14 nontrivial)" in res.output
    assert "weight 1/2 (kappa = log 2) = 0.500000000000" in res.output
    assert "weight 1 (kappa = 0) = 1.000000000000" in res.output
    assert "meeting (3, 3)" in res.output


def test_compose_json_counts_and_determinism(runner):
    args = ["compose", "--surface", "f1", "--format", "json"]
    res1 = runner.invoke(cli.main, args)
    res2 = runner.invoke(cli.main, args)
    assert res1.exit_code == 0
    assert res1.output == res2.output
    blob = json.loads(res1.output)
    assert blob["surface"] == "f1"
    assert blob["entry_count"] == 52
    assert blob["nontrivial_count"] == 4
    rows = {tuple(map(tuple, row["triple"])): row["entries"]
            for row in blob["table"]}
    assert all(isinstance(v, list) for v in rows.values())


def test_compose_collection_file(runner, tmp_path):
    coll = tmp_path / "coll.json"
    coll.write_text("[[0,0,0],[0,0,1],[0,0,2]]")
    res = runner.invoke(cli.main, [
        "compose", "--surface", "bl2", "--collection", str(coll),
        "--format", "json"])
    assert res.exit_code == 0
    blob = json.loads(res.output)
    assert blob["collection"] == [[0, 0, 0], [0, 0, 1], [0, 0, 2]]
    row = next(r for r in blob["table"]
               if r["triple"] == [[0, 0, 0], [0, 0, 1], [0, 0, 2]])
    ent = next(e for e in row["entries"]
               if e["I"] == [1, 0] and e["J"] == [0, 1])
    assert ent["weight"] == "1/2"
    assert ent["tree"]["meeting"] == [3.0, 3.0]


def test_compose_no_trace(runner):
    res = runner.invoke(cli.main, [
        "compose", "--surface", "f1", "--no-trace", "--format", "json"])
    assert res.exit_code == 0
    blob = json.loads(res.output)
    trees = [e["tree"] for row in blob["table"] for e in row["entries"]]
    assert all(t in (None, "trivial") for t in trees)


def test_compose_svg_output(runner, tmp_path):
    out = tmp_path / "figs"
    res = runner.invoke(cli.main, [
        "compose", "--surface", "bl2", "--svg-dir", str(out)])
    assert res.exit_code == 0
    files = sorted(os.listdir(out))
    # strict triples with at least one product
    assert files == [
        "bl2_m2_0_1_3.svg", "bl2_m2_0_1_4.svg", "bl2_m2_0_2_3.svg",
        "bl2_m2_0_2_4.svg", "bl2_m2_0_3_4.svg", "bl2_m2_1_3_4.svg",
        "bl2_m2_2_3_4.svg"]
    ns = "{http://www.w3.org/2000/svg}"
    for name in files:
        root = ET.parse(out / name).getroot()
        assert root.tag == f"{ns}svg"
        assert root.get("width") == "800"
        assert root.get("height") == "800"
        assert root.findall(f"{ns}polygon")
        assert root.findall(f".//{ns}marker")
    tree_fig = ET.parse(out / "bl2_m2_0_3_4.svg").getroot()
    assert tree_fig.findall(f"{ns}polyline")


def test_compose_svg_deterministic(runner, tmp_path):
    outs = []
    for sub in ("a", "b"):
        out = tmp_path / sub
        res = runner.invoke(cli.main, [
            "compose", "--surface", "f1", "--svg-dir", str(out)])
        assert res.exit_code == 0
        outs.append(out)
    for name in os.listdir(outs[0]):
        assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()


@pytest.mark.parametrize("preset", ["cp2", "p1p1", "f1", "bl2"])
def test_verify_passes(runner, preset):
    res = runner.invoke(cli.main, ["verify", "--surface", preset])
    assert res.exit_code == 0
    assert res.output.count("PASS") == 4
    assert "all checks passed" in res.output


def test_verify_json_report(runner):
    res = runner.invoke(cli.main, [
        "verify", "--surface", "bl2", "--format", "json"])
    assert res.exit_code == 0
    blob = json.loads(res.output)
    assert blob["ok"] is True
    assert set(blob["checks"]) == {
        "dim_match", "functoriality", "exceptionality", "associativity"}
    assert all(c["status"] == "pass" for c in blob["checks"].values())
    assert blob["checks"]["dim_match"]["report"]["pairs"] == 25
    assert blob["checks"]["functoriality"]["report"]["pairs_checked"] == 96
    assert blob["checks"]["associativity"]["report"]["triples_checked"] == 206


def test_verify_failure_exits_1(runner, monkeypatch):
    def fail(*a, **k):
        raise AssertionError("hom/section dimension mismatch: pair [0, 1]")

    monkeypatch.setattr(cli.mv, "verify_dim_match", fail)
    res = runner.invoke(cli.main, ["verify", "--surface", "cp2"])
    assert res.exit_code == 1
    assert "FAIL" in res.output
    assert "counterexample" in res.output
    assert "verification failed" in res.output


def test_verify_threaded_output_identical(runner, monkeypatch):
    res1 = runner.invoke(cli.main, [
        "verify", "--surface", "f1", "--format", "json"])
    monkeypatch.setenv("POLYMORSE_THREADS", "4")
    res2 = runner.invoke(cli.main, [
        "verify", "--surface", "f1", "--format", "json"])
    assert res1.exit_code == res2.exit_code == 0
    assert res1.output == res2.output


def test_thread_count_parsing(monkeypatch):
    monkeypatch.delenv("POLYMORSE_THREADS", raising=False)
    assert cli._thread_count() == 1
    monkeypatch.setenv("POLYMORSE_THREADS", "6")
    assert cli._thread_count() == 6
    monkeypatch.setenv("POLYMORSE_THREADS", "junk")
    assert cli._thread_count() == 1
    monkeypatch.setenv("POLYMORSE_THREADS", "0")
    assert cli._thread_count() == 1

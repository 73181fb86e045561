import json
import subprocess
import sys

import pytest

from divcar.cli import main
from divcar.graph import serialize

from conftest import graph


def write_corpus(tmp_path, apis, apps):
    (tmp_path / "apis.jsonl").write_text("".join(json.dumps({"api": a, "tags": t}) + "\n" for a, t in apis.items()))
    (tmp_path / "apps.jsonl").write_text("".join(json.dumps({"app": m, "apis": s}) + "\n" for m, s in apps.items()))
    return str(tmp_path / "apis.jsonl"), str(tmp_path / "apps.jsonl")


@pytest.fixture(scope="module")
def synth_files(tmp_path_factory):
    d = tmp_path_factory.mktemp("synth")
    assert main(["gen", "--out", str(d)]) == 0
    assert main(["build", "--apis", str(d / "apis.jsonl"), "--apps", str(d / "apps.jsonl"),
                 "--out", str(d / "g.json")]) == 0
    return d


def test_build_reports_stats(tmp_path, capsys):
    apis, apps = write_corpus(tmp_path, {"a": ["q1"], "b": ["q2"], "c": ["q1"]}, {"m1": ["a", "b"], "m2": ["a", "b", "c"]})
    assert main(["build", "--apis", apis, "--apps", apps, "--out", str(tmp_path / "g.json")]) == 0
    stats = json.loads(capsys.readouterr().out)
    assert stats["vertices"] == 3 and stats["edges"] == 3 and stats["component_coverage"] == 1.0


def test_build_errors_exit_2(tmp_path):
    apis, apps = write_corpus(tmp_path, {"a": ["q1"], "b": ["q2"]}, {"m1": ["a"], "m2": ["b"]})
    assert main(["build", "--apis", apis, "--apps", apps, "--out", str(tmp_path / "g.json")]) == 2
    apis, apps = write_corpus(tmp_path, {"a": ["q1"]}, {"m1": ["a", "zzz"]})
    assert main(["build", "--apis", apis, "--apps", apps, "--out", str(tmp_path / "g.json")]) == 2
    assert main(["build", "--apis", str(tmp_path / "missing"), "--apps", apps, "--out", "x"]) == 2


def test_query_exit_codes(tmp_path, capsys):
    g = graph({"a": ["k1"], "b": [], "c": [], "d": [], "e": ["k2"]},
              [("a", "b", 1), ("b", "c", 1), ("c", "d", 1), ("d", "e", 1)])
    path = tmp_path / "g.json"
    path.write_bytes(serialize(g))
    assert main(["query", "--graph", str(path), "--keywords", "k1,qXYZ"]) == 3
    assert main(["query", "--graph", str(path), "--keywords", "k1,k2", "--z", "1", "--p", "2"]) == 4
    capsys.readouterr()
    assert main(["query", "--graph", str(path), "--keywords", "k1,k2", "--z", "3", "--p", "all"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["lists"][0]["apis"] == ["a", "b", "c", "d", "e"]
    assert doc["found"] == 1 and doc["k"] == 10
    (tmp_path / "bad.json").write_text("{not json")
    assert main(["query", "--graph", str(tmp_path / "bad.json"), "--keywords", "k1"]) == 2


def test_query_deterministic_across_jobs(synth_files):
    outs = []
    for jobs in ("1", "8"):
        out = synth_files / f"q{jobs}.json"
        assert main(["query", "--graph", str(synth_files / "g.json"), "--keywords", "kw0003,kw0009,kw0018",
                     "--z", "20", "--jobs", jobs, "--out", str(out)]) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_gen_is_deterministic(tmp_path):
    for d in ("a", "b"):
        assert main(["gen", "--out", str(tmp_path / d), "--n-apis", "60", "--n-apps", "100", "--n-keywords", "10"]) == 0
    assert (tmp_path / "a/apis.jsonl").read_bytes() == (tmp_path / "b/apis.jsonl").read_bytes()
    assert (tmp_path / "a/apps.jsonl").read_bytes() == (tmp_path / "b/apps.jsonl").read_bytes()
    assert main(["gen", "--out", str(tmp_path / "c"), "--n-apps", "0"]) == 2


def test_verify(capsys):
    assert main(["verify", "--instances", "50", "--seed", "3"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["mismatches"] == [] and doc["violations"] == []


def test_eval_and_sweep(synth_files, capsys):
    files = ["--apis", str(synth_files / "apis.jsonl"), "--apps", str(synth_files / "apps.jsonl")]
    assert main(["eval", *files, "--app", "app0008", "--seed", "1", "--no-timing"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["instances"][0]["mp"] == pytest.approx(0.35)
    assert "wall_time_seconds" not in doc["instances"][0]
    assert main(["sweep", *files, "--z", "3", "--p", "30", "--r", "3", "--n-eval-apps", "2", "--no-timing"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("z,p,r,K,theta,seed") and len(lines) == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "divcar.cli", "verify", "--instances", "5"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["instances"] == 5

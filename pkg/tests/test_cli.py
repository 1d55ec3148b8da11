import csv
import io
import json
import subprocess
import sys

import jsonschema
import pytest
from oracles import random_lts

from eqspectre.cli import BENCH_HEADER, main
from eqspectre.lts import write_aut


def run(*argv):
    out = io.StringIO()
    code = main(list(map(str, argv)), out=out)
    return code, out.getvalue()


@pytest.fixture()
def fig3_path(data_dir):
    return data_dir / "fig3.aut"


@pytest.fixture(scope="module")
def schema(data_dir_module):
    return json.loads((data_dir_module / "verdict.schema.json").read_text())


@pytest.fixture(scope="module")
def data_dir_module():
    from conftest import DATA
    return DATA


def test_check_fig3(fig3_path):
    code, out = run("check", fig3_path, 0, 1)
    assert code == 1
    assert "0 <= 1: E T 1S" in out
    assert "equivalent: E T 1S" in out
    assert "<τ>⋀{¬<ec_A>T}" in out


def test_check_diagonal(fig3_path):
    code, out = run("check", fig3_path, 0, 0)
    assert code == 0
    assert "equivalent: E T F RV IF PF R FT RT 1S RS 2S B" in out


def test_check_require(fig3_path):
    assert run("check", fig3_path, 0, 1, "--require", "1S", "T")[0] == 0
    assert run("check", fig3_path, 0, 1, "--require", "F")[0] == 1


def test_check_names(fig3_path, data_dir):
    code, out = run("check", fig3_path, "S", "S'", "--names", data_dir / "fig3.names")
    assert code == 1 and "S vs S'" in out


def test_check_json_schema(fig3_path, schema):
    code, out = run("check", fig3_path, 0, 1, 1, 2, "--format", "json")
    doc = json.loads(out)
    jsonschema.validate(doc, schema)
    first = doc["pairs"][0]
    assert first["budgets"]["forward"] == [[2, 2, 0, 0, 1, 1]]
    assert first["certificates"]["forward"]["F"] == "<τ>⋀{¬<ec_A>T}"
    assert first["equivalences"] == ["E", "T", "1S"]


def test_check_all_pairs_and_jobs(fig3_path, schema):
    _, serial = run("check", fig3_path, "--all-pairs", "--format", "json")
    _, parallel = run("check", fig3_path, "--all-pairs", "--format", "json", "--jobs", "2")
    a, b = json.loads(serial), json.loads(parallel)
    jsonschema.validate(a, schema)
    for x in a["pairs"] + b["pairs"]:
        x.pop("stats")
    assert a == b and len(a["pairs"]) == 3


def _verdicts(doc):
    return [(p["preorders"], p["equivalences"]) for p in doc["pairs"]]


@pytest.mark.parametrize("extra", [["--variant", "clever"], ["--mode", "capped"],
                                   ["--variant", "clever", "--mode", "capped", "--cap", "4"]])
def test_variants_agree(data_dir, extra):
    # the shipped random fixtures were drawn with random_lts(seed) for seeds 101..103
    files = sorted(data_dir.glob("*.aut"))
    files = [f for f in files if f.name != "peterson.aut"]
    assert len(files) == 4
    for f in files:
        base = json.loads(run("check", f, "--all-pairs", "--format", "json")[1] or '{"pairs": []}')
        other = json.loads(run("check", f, "--all-pairs", "--format", "json", *extra)[1] or '{"pairs": []}')
        assert _verdicts(base) == _verdicts(other)


def test_check_csv(fig3_path):
    code, out = run("check", fig3_path, "--all-pairs", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 1 and len(rows) == 3
    assert rows[0]["equivalences"] == "E T 1S" and rows[0]["budgets_forward"] == "(2,2,0,0,1,1)"
    code, out = run("check", fig3_path, 0, 1, "--format", "csv", "--limit-positions", "2")
    assert code == 3 and "reachable" in list(csv.DictReader(io.StringIO(out)))[0]["error"]


def test_shipped_random_fixtures_match_generator(data_dir):
    for seed in (101, 102, 103):
        assert (data_dir / f"random_{seed}.aut").read_text() == write_aut(random_lts(seed))


def test_custom_coordinate(fig3_path):
    code, out = run("check", fig3_path, 0, 1, "--format", "json", "--variant", "clever",
                    "--coordinate", "X=inf,inf,inf,2,1,1")
    doc = json.loads(out)
    assert doc["pairs"][0]["variant"] == "full"
    assert doc["pairs"][0]["custom"]["X"] == {"forward": False, "backward": True}


def test_errors(tmp_path, fig3_path):
    assert run("check", tmp_path / "missing.aut", 0, 1)[0] == 2
    bad = tmp_path / "bad.aut"
    bad.write_text("des (0,1,2)\n(0,a,9)\n")
    assert run("check", bad, 0, 1)[0] == 2
    assert run("check", fig3_path, 0, 7)[0] == 2
    assert run("check", fig3_path, "nobody", 1)[0] == 2
    assert run("check", fig3_path, 0)[0] == 2
    assert run("check", fig3_path, 0, 1, "--mode", "capped", "--cap", "2")[0] == 2
    assert run("frobnicate")[0] == 2


def test_weak_without_internal_action(tmp_path):
    f = tmp_path / "plain.aut"
    f.write_text('des (0,1,2)\n(0,"a",1)\n')
    assert run("check", f, "--weak", 0, 1)[0] == 2


def test_resource_limit(fig3_path):
    code, out = run("check", fig3_path, 0, 1, "--limit-positions", "3")
    assert code == 3 and "aborted" in out


def test_quotient(tmp_path, fig3_path):
    for notion, count in (("B", 3), ("1S", 2), ("E", 2), ("T", 2)):
        code, out = run("quotient", fig3_path, "--notion", notion)
        assert code == 0 and out.startswith(f"{count} classes")
    target = tmp_path / "q.aut"
    code, out = run("quotient", fig3_path, "--notion", "1S", "--output", target, "--format", "json")
    assert json.loads(out)["classes"] == [["0", "1"], ["2"]]
    assert target.read_text().startswith("des (0, 4, 2)")


def test_bench(tmp_path, fig3_path):
    code, out = run("bench", fig3_path)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert out.splitlines()[0] == ",".join(BENCH_HEADER)
    assert code == 0
    row = rows[0]
    assert (row["system"], row["states"], row["bisimquot"]) == ("fig3", "3", "3")
    assert (row["enabledness"], row["trace"], row["simulation"]) == ("2", "2", "2")
    assert len(row["time_s"].split(".")[1]) == 3


def test_bench_empty_and_errors(tmp_path, fig3_path):
    code, out = run("bench")
    assert out == ",".join(BENCH_HEADER) + "\n" and code == 0
    code, out = run("bench", tmp_path / "nope.aut", fig3_path)
    lines = out.splitlines()
    assert len(lines) == 3 and lines[1].startswith("nope,error") and lines[2].startswith("fig3,3")
    assert code == 2


def test_bench_quotient_sizes_ordered(tmp_path):
    files = []
    for seed in range(6):
        f = tmp_path / f"s{seed}.aut"
        f.write_text(write_aut(random_lts(seed + 300)))
        files.append(f)
    _, out = run("bench", *files, "--jobs", "2")
    for row in csv.DictReader(io.StringIO(out)):
        b, s, t, e = (int(row[k]) for k in ("bisimquot", "simulation", "trace", "enabledness"))
        assert b >= s >= t >= e


def test_game_dump(fig3_path):
    code, out = run("game-dump", fig3_path, 0, 1)
    doc = json.loads(out)
    assert code == 0
    first = doc["positions"][0]
    assert first["label"] == "<0,{1}>a" and first["budgets"] == [[2, 2, 0, 0, 1, 1]]
    code, out = run("game-dump", fig3_path, 0, 1, "--format", "dot")
    assert out.startswith("digraph")


def test_spectrum():
    code, out = run("spectrum")
    assert code == 0 and len(out.splitlines()) == 13 and "failures" in out
    doc = json.loads(run("spectrum", "--format", "json")[1])
    assert doc[2] == {"name": "F", "title": "failures", "coordinate": ["inf", 2, 0, 0, 1, 1]}
    assert run("spectrum", "--format", "csv")[1].splitlines()[0] == "name,title,e1,e2,e3,e4,e5,e6"


def test_console_entry_point(fig3_path):
    proc = subprocess.run([sys.executable, "-m", "eqspectre", "check", str(fig3_path), "0", "1"],
                          capture_output=True, text=True, env={"EQSPECTRE_LOG": "debug", "PATH": ""})
    assert proc.returncode == 1
    assert "1S" in proc.stdout
    assert "DEBUG" in proc.stderr

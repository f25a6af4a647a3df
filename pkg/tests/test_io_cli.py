from __future__ import annotations

import csv
import io
import json
import math

import numpy as np
import pytest

from sdpath import io as sio
from sdpath.bench import COLUMNS, parse_terrain_spec, run_bench
from sdpath.cli import main
from sdpath.discretize import hybrid_select
from sdpath.pipeline import SDPSolver
from sdpath.terrain import dump_terrain, geometry_params

from .conftest import T1_TEXT, one_face


def test_single_node_path_json():
    p = SDPSolver(one_face(), 0, 1.0, "uniform").query(0)
    data = json.loads(sio.export_path_json(p))
    assert data["schema_version"] == 1
    assert len(data["nodes"]) == 1 and data["length"] == 0.0
    assert data["nodes"][0]["on"] == "vertex:0"


def test_path_json_roundtrip():
    p = SDPSolver(one_face(), 0, 1.0, "uniform").query((1, 1))
    text = sio.export_path_json(p, epsilon=1.0, scheme="uniform", algo="bushwhack")
    data = sio.load_path_json(text)
    assert data["length"] == p.length
    assert data["length"] == pytest.approx(1.943651, abs=1e-6)
    assert abs(sio.path_length_from_json(data) - data["length"]) <= 1e-12 * data["length"]
    assert [n["on"] for n in data["nodes"]] == ["vertex:0", "face:0"]


def test_edge_label_precision():
    sp = SDPSolver(one_face(), 0, 1.0, "uniform")
    p = sp.query((1.0 / 3.0, 0.0))
    on = p.points[-1].on
    assert on.startswith("edge:")
    t = on.split("@")[1]
    assert len(t.replace("0.", "", 1).lstrip("0")) <= 12


def test_numbers_seventeen_digits():
    assert sio.dumps({"a": 0.1}).strip() == '{\n  "a": 0.10000000000000001\n}'
    assert json.loads(sio.dumps({"a": 1 / 3}))["a"] == 1 / 3


def test_tree_json():
    sp = SDPSolver(one_face(), 0, 1.0, "uniform", "dijkstra")
    data = json.loads(sio.export_tree_json(sp.tree))
    ids = {n["id"]: n for n in data["nodes"]}
    assert ids[0]["parent"] is None and ids[0]["dist"] == 0.0
    assert ids[1]["dist"] == math.sqrt(13)


def test_load_path_json_rejects_version():
    with pytest.raises(ValueError):
        sio.load_path_json('{"schema_version": 7}')


def test_bench_empty_eps():
    out = run_bench([parse_terrain_spec("random:n=6:seed=1")], [], ["uniform"], ["bushwhack"])
    assert out.splitlines() == [",".join(COLUMNS)]


def test_bench_rows_and_bounds():
    corpus = [parse_terrain_spec("random:n=10:seed=2"), parse_terrain_spec("star:k=3")]
    out = run_bench(corpus, [1.0], ["uniform", "geometric"], ["bushwhack"], n_queries=3)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 4
    for r in rows:
        assert int(r["max_nodes_per_edge"]) < float(r["bound_per_edge"])
    again = run_bench(corpus, [1.0], ["uniform", "geometric"], ["bushwhack"], n_queries=3)
    strip = lambda text: [r[:10] + r[12:] for r in csv.reader(io.StringIO(text))]  # noqa: E731
    assert strip(out) == strip(again)
    for name in ("random:n=10:seed=2", "star:k=3"):
        u, g = [r for r in rows if r["terrain"] == name]
        gp = geometry_params(parse_terrain_spec(name).mesh)
        smaller = "uniform" if int(u["nodes_total"]) <= int(g["nodes_total"]) else "geometric"
        assert smaller == hybrid_select(gp, 1.0).scheme


@pytest.fixture
def ter(tmp_path):
    p = tmp_path / "t1.ter"
    p.write_text(T1_TEXT)
    return p


def test_cli_validate(ter, tmp_path, capsys):
    assert main(["validate", str(ter)]) == 0
    bad = tmp_path / "bad.ter"
    bad.write_text("v 0 0 0\nv 2 0 0\nv 0 2 0\nv 2 2 1\nf 0 1 2\nf 0 1 3\n")
    assert main(["validate", str(bad)]) == 2
    broken = tmp_path / "broken.ter"
    broken.write_text("v 0 0\n")
    assert main(["validate", str(broken)]) == 2


def test_cli_params(ter, capsys):
    assert main(["params", str(ter), "--eps", "1"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["hybrid_choice"] == "uniform"
    assert data["L"] == pytest.approx(math.sqrt(18))


def test_cli_discretize(ter, tmp_path, capsys):
    out = tmp_path / "pts.csv"
    assert main(["discretize", str(ter), "--eps", "1", "--scheme", "uniform", "--out", str(out)]) == 0
    text = capsys.readouterr().out
    assert "nodes_total=50" in text
    assert len(out.read_text().splitlines()) == 48
    assert main(["discretize", str(ter), "--eps", "1", "--scheme", "geometric", "--counts-only"]) == 0


def test_cli_query_and_export(ter, tmp_path, capsys):
    assert main(["query", str(ter), "--source", "0", "--point", "1,1", "--eps", "1"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["length"] == pytest.approx(math.sqrt(34 / 9))
    assert data["source"]["on"] == "vertex:0"
    out = tmp_path / "p.json"
    assert main(["export", str(ter), "--source", "0", "--point", "1,1", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["length"] == data["length"]
    assert main(["export", str(ter), "--source", "0", "--point", "1,1"]) == 4


def test_cli_solve(ter, capsys):
    assert main(["solve", str(ter), "--source", "0.5,0.5", "--algo", "dijkstra"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["source"] == 3 and data["algo"] == "dijkstra"


def test_cli_exit_codes(ter, tmp_path, capsys):
    assert main(["query", str(ter), "--source", "1", "--point", "0.2,0.2"]) == 3
    assert main(["query", str(ter), "--source", "0", "--point", "9,9"]) == 2
    assert main(["query", str(ter), "--source", "0", "--point", "1,1", "--eps", "3"]) == 4
    assert main(["query", str(tmp_path / "missing.ter"), "--source", "0", "--point", "1,1"]) == 2
    with pytest.raises(SystemExit) as info:
        main(["query", str(ter), "--bogus"])
    assert info.value.code == 4
    with pytest.raises(SystemExit) as info:
        main(["query", str(ter), "--source", "0", "--point", "1,1", "--scheme", "nope"])
    assert info.value.code == 4


def test_cli_gen(tmp_path, capsys):
    out = tmp_path / "star.ter"
    assert main(["gen", "star", "--k", "4", "--out", str(out)]) == 0
    assert main(["validate", str(out)]) == 0
    assert main(["gen", "random", "--n", "12", "--seed", "3"]) == 0
    text = capsys.readouterr().out
    assert text.count("\nf ") > 0


def test_cli_bench(tmp_path):
    out = tmp_path / "b.csv"
    assert main(["bench", "random:n=6:seed=1", "--eps", "1", "--schemes", "uniform", "--out", str(out)]) == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 1 and rows[0]["scheme"] == "uniform"


def test_dump_terrain_cli_roundtrip(tmp_path):
    p = tmp_path / "t.ter"
    p.write_text(dump_terrain(one_face()))
    assert main(["validate", str(p)]) == 0
    assert np.array_equal(one_face().vertices, np.array([[0, 0, 4.0], [3, 0, 2.0], [0, 3, 2.0]]))

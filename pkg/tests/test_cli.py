import csv
import json
import subprocess
import sys

import pytest

from complexspread.cli import REGION_COLUMNS, main
from complexspread.netgen import read_edge_list


def rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


@pytest.fixture(scope="module")
def sweep_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("sweep") / "res"
    code = main(["sweep", "--k", "4", "--n", "60", "--step", "0.5", "--trials", "12",
                 "--seed", "3", "--out", str(out)])
    assert code == 0
    return out


def test_net_build_and_rewire(tmp_path):
    ring = tmp_path / "ring.txt"
    assert main(["net", "build", "--n", "50", "--k", "4", "--out", str(ring)]) == 0
    assert read_edge_list(ring).n == 50
    rw = tmp_path / "rw.txt"
    assert main(["net", "rewire", "--in", str(ring), "--fraction", "1", "--seed", "2",
                 "--out", str(rw)]) == 0
    assert read_edge_list(rw).topology.tag() == "rewired:ring:100"
    hexf = tmp_path / "hex.txt"
    assert main(["net", "build", "--topology", "hex", "--rows", "8", "--cols", "16",
                 "--out", str(hexf)]) == 0
    assert read_edge_list(hexf).k == 6


def test_simulate_writes_jsonl(tmp_path):
    out = tmp_path / "ts.jsonl"
    assert main(["simulate", "--n", "80", "--k", "4", "--p1", "1", "--p2", "1",
                 "--out", str(out)]) == 0
    lines = [json.loads(x) for x in out.read_text().splitlines()]
    assert lines[0] == {"step": 0, "cumulative_adopters": 2, "influential_count": 2}
    assert lines[-1]["cumulative_adopters"] == 80


def test_simulate_logistic_stdout(capsys):
    assert main(["simulate", "--n", "40", "--k", "4", "--m", "3", "--T", "unbounded"]) == 0
    first = json.loads(capsys.readouterr().out.splitlines()[0])
    assert first["step"] == 0


def test_sweep_and_classify(sweep_dir, tmp_path):
    out = tmp_path / "regions.csv"
    assert main(["classify", "--results", str(sweep_dir), "--rule", "ks", "--out", str(out)]) == 0
    table = rows(out)
    assert list(table[0]) == REGION_COLUMNS
    assert len(table) == 6
    assert {r["region_margin"] for r in table} <= {"1", "2", "3", "4"}
    full = [r for r in table if r["p1"] == "1.0"][0]
    assert full["region_margin"] == "3" and full["region_ks"] == "3"


def test_sweep_from_config(tmp_path):
    cfg = tmp_path / "spec.json"
    cfg.write_text(json.dumps({"k": 4, "n": 40, "trials": 2, "points": [[0.2, 0.4]]}))
    out = tmp_path / "res"
    assert main(["sweep", "--config", str(cfg), "--seed", "5", "--out", str(out)]) == 0
    spec = json.loads((out / "spec.json").read_text())["spec"]
    assert spec["seed"] == 5 and spec["points"] == [[0.2, 0.4]]


def test_boundary_csv(tmp_path):
    out = tmp_path / "b.csv"
    assert main(["boundary", "--k", "8", "--step", "0.25", "--out", str(out)]) == 0
    table = rows(out)
    assert list(table[0]) == ["network_type", "k", "i", "T", "p1", "p2_star", "reachable"]
    clustered = [r for r in table if r["network_type"] == "clustered"]
    assert float(clustered[0]["p2_star"]) == pytest.approx(1 / 3)
    assert {r["network_type"] for r in table} == {"random", "clustered"}


def test_speed_and_bootstrap(sweep_dir, tmp_path, capsys):
    out = tmp_path / "speed.csv"
    assert main(["speed", "--results", str(sweep_dir), "--out", str(out)]) == 0
    assert len(rows(out)) == 12
    assert main(["bootstrap-ratio", "--results", str(sweep_dir), "--reps", "50"]) == 0
    printed = capsys.readouterr().out.strip()
    assert printed.startswith("{") or printed.startswith("no cell")


def test_preset_emit(capsys):
    assert main(["preset", "c2010"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert len(doc) == 8 and doc[0]["topology"] == "hex"


def test_exit_codes(tmp_path):
    assert main(["simulate", "--p1", "0.1"]) == 1
    assert main(["classify", "--results", str(tmp_path / "nowhere")]) == 2
    assert main(["net", "build", "--topology", "moore", "--out", str(tmp_path / "x")]) == 1
    with pytest.raises(SystemExit) as exc:
        main(["no-such-command"])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main(["boundary", "--k", "eight"])
    assert exc.value.code == 1


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "complexspread", "boundary", "--k", "4",
                           "--step", "0.5"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("network_type,k,i,T,p1,p2_star,reachable")
    bad = subprocess.run([sys.executable, "-m", "complexspread", "sweep"], capture_output=True)
    assert bad.returncode == 1

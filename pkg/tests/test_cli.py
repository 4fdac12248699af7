import json
import subprocess
import sys

import pytest

from hashgnn.cli import bench_scaling, main, parse_grid
from hashgnn.exceptions import ConfigError
from hashgnn.graph import generate_synthetic, save_graph
from hashgnn.sketch import read_embedding


@pytest.fixture
def fixture_files(tmp_path):
    g = generate_synthetic(120, 8, communities=2, attrs_per_node=5, universe_size=40, rng=0)
    save_graph(g, tmp_path / "g.edges", tmp_path / "g.attrs")
    return tmp_path / "g.edges", tmp_path / "g.attrs"


def test_embed_byte_identical(tmp_path, fixture_files):
    edges, attrs = fixture_files
    outs = []
    for name in ("a.emb", "b.emb"):
        code = main(["embed", "--edges", str(edges), "--attrs", str(attrs), "--out", str(tmp_path / name),
                     "--T", "2", "--K", "16", "--seed", "3"])
        assert code == 0
        outs.append((tmp_path / name).read_bytes())
    assert outs[0] == outs[1]
    assert outs[0].startswith(b"#gnn v1 nodes=120 K=16 T=2 seed=3 universe=40\n")
    assert (tmp_path / "a.emb.map").read_text().splitlines()[0] == "0 0"


def test_embed_threads_do_not_change_output(tmp_path, fixture_files):
    edges, attrs = fixture_files
    for threads in ("1", "3"):
        main(["embed", "--edges", str(edges), "--attrs", str(attrs), "--out", str(tmp_path / threads),
              "--K", "8", "--threads", threads])
    assert (tmp_path / "1").read_bytes() == (tmp_path / "3").read_bytes()


def test_embed_checkpoints(tmp_path, fixture_files):
    edges, attrs = fixture_files
    out = tmp_path / "e"
    main(["embed", "--edges", str(edges), "--attrs", str(attrs), "--out", str(out), "--T", "3", "--K", "4",
          "--checkpoints"])
    final, _ = read_embedding(out)
    last, _ = read_embedding(f"{out}.iter3")
    assert (final.rows == last.rows).all()
    assert read_embedding(f"{out}.iter1")[0].iteration == 1


def test_exit_codes(tmp_path, fixture_files, capsys):
    edges, attrs = fixture_files
    out = str(tmp_path / "o")
    assert main(["embed", "--edges", str(edges), "--attrs", str(tmp_path / "missing"), "--out", out]) == 3
    assert main(["embed", "--edges", str(edges), "--out", out, "--K", "0"]) == 2
    assert main(["linkpred", "--edges", str(edges), "--ratio", "1.5"]) == 2
    (tmp_path / "bad.attrs").write_text("#universe 3\n0 7\n")
    assert main(["embed", "--edges", str(edges), "--attrs", str(tmp_path / "bad.attrs"), "--out", out]) == 4
    (tmp_path / "loop.edges").write_text("1 1\n")
    assert main(["embed", "--edges", str(tmp_path / "loop.edges"), "--out", out]) == 4
    assert main(["embed", "--edges", str(edges), "--out", str(tmp_path / "no" / "dir" / "x")]) == 5
    with pytest.raises(SystemExit) as info:
        main(["embed", "--edges", str(edges)])
    assert info.value.code == 2


def test_module_entry_point(tmp_path, fixture_files):
    edges, _ = fixture_files
    proc = subprocess.run(
        [sys.executable, "-m", "hashgnn", "linkpred", "--edges", str(edges), "--ratio", "2"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 2 and "ratio" in proc.stderr


def test_linkpred_report(tmp_path, fixture_files, capsys):
    edges, attrs = fixture_files
    args = ["linkpred", "--edges", str(edges), "--attrs", str(attrs), "--K", "16", "--trials", "1", "--seed", "5"]
    assert main(args) == 0
    first = json.loads(capsys.readouterr().out)
    assert main(args) == 0
    second = json.loads(capsys.readouterr().out)
    assert set(first) == {"auc_mean", "auc_per_trial", "embed_seconds_mean", "score_seconds_mean", "config"}
    assert first["auc_per_trial"] == second["auc_per_trial"]
    assert first["config"] == {"T": 2, "K": 16, "seed": 5, "train_ratio": 0.8, "trials": 1}

    out = tmp_path / "r.json"
    assert main(["linkpred", "--edges", str(edges), "--attrs", str(attrs), "--K", "8", "--ratio", "0.9",
                 "--trials", "5", "--out", str(out)]) == 0
    assert len(json.loads(out.read_text())["auc_per_trial"]) == 5


def test_linkpred_grid(fixture_files, capsys):
    edges, attrs = fixture_files
    assert main(["linkpred", "--edges", str(edges), "--attrs", str(attrs), "--K", "8", "--trials", "1",
                 "--grid", "T=1..3"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert [r["config"]["T"] for r in doc["grid"]] == [1, 2, 3]
    assert doc["best_T"] in (1, 2, 3)


def test_parse_grid():
    assert parse_grid("T=1..5") == [1, 2, 3, 4, 5]
    assert parse_grid("T=2,4") == [2, 4]
    for bad in ("K=1..2", "T=0..2", "T=a"):
        with pytest.raises(ConfigError):
            parse_grid(bad)


def test_synth_then_embed_large_fixture(tmp_path, capsys):
    prefix = str(tmp_path / "s")
    assert main(["synth", "--out", prefix, "--nodes", "3273", "--avg-degree", "20"]) == 0
    assert main(["embed", "--edges", prefix + ".edges", "--attrs", prefix + ".attrs", "--out", prefix + ".emb",
                 "--T", "3", "--K", "200"]) == 0
    err = capsys.readouterr().err
    assert all(f"iteration {t}:" in err for t in (1, 2, 3))
    emb, _ = read_embedding(prefix + ".emb")
    assert emb.rows.shape == (3273, 200)


def test_bench_scaling_table(capsys):
    assert main(["bench-scaling", "--sizes", "200,400", "--grid", "T=1..3", "--K", "4"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("# bench-scaling K=4")
    assert lines[1].split("\t") == ["nodes", "T=1", "T=2", "T=3"]
    cells = [c for line in lines[2:] for c in line.split("\t")[1:]]
    assert len(cells) == 6 and all(float(c) > 0 for c in cells)


def test_bench_scaling_budget_skips(capsys):
    assert main(["bench-scaling", "--sizes", "300", "--K", "64", "--memory-budget", "0.01"]) == 0
    assert "skipped" in capsys.readouterr().out


@pytest.mark.slow
def test_bench_scaling_complexity():
    table = bench_scaling([1000, 10_000], [1, 2, 3], 64, 42)
    for T in (1, 2, 3):
        assert 5 <= table[10_000, T] / table[1000, T] <= 20
    for n in (1000, 10_000):
        assert table[n, 1] < table[n, 2] < table[n, 3]

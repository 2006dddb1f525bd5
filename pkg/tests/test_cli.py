import json

import pytest

from segprune import __version__
from segprune.cli import main
from segprune.formats import ingest_scores, read_manifest
from segprune.report import read_l_curve_csv


def run(*argv) -> int:
    return main([str(a) for a in argv])


def test_version(capsys):
    with pytest.raises(SystemExit) as exc:
        run("--version")
    assert exc.value.code == 0
    assert __version__ in capsys.readouterr().out


def test_simulate_stream_and_prune(tmp_path):
    stream = tmp_path / "scores.jsonl"
    assert run("simulate", "stream", "--n", 12, "--epochs", 20,
               "--seed", 5, "--out", stream) == 0
    store = ingest_scores(stream)
    assert store.sample_count == 12 and store.epoch_count == 20

    manifest_path = tmp_path / "keep.json"
    assert run("prune", "--stream", stream, "--strategy", "ambiguous",
               "--p", 0.4, "--out", manifest_path) == 0
    manifest = read_manifest(manifest_path)
    assert manifest.scoring_epoch == 20
    assert len(manifest.kept) == 7
    assert len(manifest.kept) + len(manifest.dropped) == 12


def test_simulate_stream_appends_not_truncates(tmp_path):
    stream = tmp_path / "scores.jsonl"
    run("simulate", "stream", "--n", 3, "--epochs", 2, "--seed", 1, "--out", stream)
    first = stream.read_text()
    run("simulate", "stream", "--n", 3, "--epochs", 2, "--seed", 1, "--out", stream)
    assert stream.read_text() == first * 2


def test_volumes_score_roundtrip(tmp_path):
    out = tmp_path / "vols"
    assert run("simulate", "volumes", "--n", 3, "--epochs", 2, "--seed", 7,
               "--dims", "16x16", "--out", out) == 0
    assert len(list((out / "truth").glob("*.ddt1"))) == 3
    assert len(list((out / "epoch_0002").glob("*.ddt1"))) == 3

    stream = tmp_path / "scored.jsonl"
    for epoch in (1, 2):
        assert run("score", "--pred", out / f"epoch_{epoch:04d}",
                   "--truth", out / "truth", "--epoch", epoch,
                   "--extra", "el2n", "--extra", "el2nx",
                   "--out", stream) == 0
    store = ingest_scores(stream)
    assert store.sample_count == 3 and store.epoch_count == 2
    assert store.metric_names == ("dice", "el2n", "el2nx")
    assert not store.warnings


def test_stop_scan_outputs(tmp_path):
    stream = tmp_path / "scores.jsonl"
    run("simulate", "stream", "--n", 20, "--epochs", 140, "--seed", 3,
        "--eta", 0.001, "--onset-max", 10, "--tau0", 5, "--out", stream)
    csv_path = tmp_path / "lcurve.csv"
    sentinel = tmp_path / "STOP"
    assert run("stop-scan", "--stream", stream, "--window", 10,
               "--csv", csv_path, "--signal-file", sentinel) == 0
    points = read_l_curve_csv(csv_path.read_text())
    assert len(points) >= 2
    assert sentinel.exists()
    stop_epoch = int(sentinel.read_text().strip())
    assert stop_epoch in {e for e, _ in points}


def test_report_datamap_files(tmp_path):
    stream = tmp_path / "scores.jsonl"
    run("simulate", "stream", "--n", 10, "--epochs", 15, "--seed", 2, "--out", stream)
    prefix = tmp_path / "map"
    assert run("report", "datamap", "--stream", stream, "--p", 0.4,
               "--prefix", prefix) == 0
    csv_text = (tmp_path / "map.csv").read_text()
    svg_text = (tmp_path / "map.svg").read_text()
    assert len(csv_text.strip().splitlines()) == 11
    assert svg_text.count("<circle") == 10


def test_report_lcurve_rerender_is_byte_identical(tmp_path):
    stream = tmp_path / "scores.jsonl"
    run("simulate", "stream", "--n", 15, "--epochs", 60, "--seed", 4, "--out", stream)
    first = tmp_path / "a"
    assert run("report", "lcurve", "--stream", stream, "--window", 10,
               "--prefix", first) == 0
    second = tmp_path / "b"
    assert run("report", "lcurve", "--from-csv", tmp_path / "a.csv",
               "--prefix", second) == 0
    assert (tmp_path / "b.csv").read_bytes() == (tmp_path / "a.csv").read_bytes()
    assert (tmp_path / "b.svg").read_bytes() == (tmp_path / "a.svg").read_bytes()


def test_report_listing_stdout_and_file(tmp_path, capsys):
    stream = tmp_path / "scores.jsonl"
    run("simulate", "stream", "--n", 30, "--epochs", 25, "--seed", 6, "--out", stream)
    capsys.readouterr()
    assert run("report", "listing", "--stream", stream, "--k", 5) == 0
    out = capsys.readouterr().out
    assert "hardest 5 by dad:" in out and "easiest 5 by dad:" in out

    path = tmp_path / "listing.txt"
    assert run("report", "listing", "--stream", stream, "--k", 5, "--out", path) == 0
    assert path.read_text() == out


def test_random_strategy_requires_seed(tmp_path, capsys):
    stream = tmp_path / "scores.jsonl"
    run("simulate", "stream", "--n", 5, "--epochs", 12, "--seed", 1, "--out", stream)
    code = run("prune", "--stream", stream, "--strategy", "random",
               "--p", 0.2, "--out", tmp_path / "m.json")
    assert code == 2
    assert "error:" in capsys.readouterr().err

    assert run("prune", "--stream", stream, "--strategy", "random",
               "--p", 0.2, "--seed", 99, "--out", tmp_path / "m.json") == 0
    manifest = json.loads((tmp_path / "m.json").read_text())
    assert manifest["seed"] == 99


def test_missing_stream_exits_2(tmp_path, capsys):
    code = run("prune", "--stream", tmp_path / "absent.jsonl",
               "--strategy", "hard", "--p", 0.1, "--out", tmp_path / "m.json")
    assert code == 2
    assert "error:" in capsys.readouterr().err

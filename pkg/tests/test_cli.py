import json

import pytest

from logbench.cli import main


@pytest.fixture(scope="module")
def synth_dirs(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli_synth")
    code = main(["synth", "--format", "hdfs", "--templates", "4",
                 "--lines", "500", "--anomaly-rate", "0.2", "--seed", "1",
                 "--out", str(root)])
    assert code == 0
    log = next(root.glob("*.log"))
    labels = next(root.glob("*labels*.csv"))
    return {"root": root, "log": log, "labels": labels}


def test_synth_prints_paths(tmp_path, capsys):
    code = main(["synth", "--format", "bgl", "--lines", "50",
                 "--out", str(tmp_path), "--name", "tiny"])
    captured = capsys.readouterr()
    assert code == 0
    assert "log:" in captured.out
    assert (tmp_path / "tiny.log").exists()


def test_load_writes_tables(tmp_path, capsys, synth_dirs):
    out = tmp_path / "loaded"
    code = main(["load", "--format", "hdfs", "--log", str(synth_dirs["log"]),
                 "--labels", str(synth_dirs["labels"]),
                 "--out", str(out), "--csv"])
    captured = capsys.readouterr()
    assert code == 0
    assert "events:" in captured.out
    assert "sequences:" in captured.out
    assert "validation:" in captured.out
    for name in ("events.table.json", "events.csv",
                 "sequences.table.json", "sequences.csv"):
        assert (out / name).exists(), name


def test_enhance_chain(tmp_path, capsys, synth_dirs):
    loaded = tmp_path / "loaded"
    assert main(["load", "--format", "hdfs", "--log", str(synth_dirs["log"]),
                 "--labels", str(synth_dirs["labels"]),
                 "--out", str(loaded)]) == 0
    capsys.readouterr()

    out = tmp_path / "enhanced"
    code = main(["enhance", "--table", str(loaded / "events.table.json"),
                 "--chain", "normalize,tokenize,drain,aggregate",
                 "--out", str(out)])
    captured = capsys.readouterr()
    assert code == 0
    assert "drain:" in captured.out
    assert "templates" in captured.out
    assert (out / "templates.json").exists()
    assert (out / "events.table.json").exists()
    assert (out / "sequences.table.json").exists()

    store = json.loads((out / "templates.json").read_text())
    assert store["templates"]


def test_enhance_rejects_bad_chain(tmp_path, capsys, synth_dirs):
    loaded = tmp_path / "loaded"
    assert main(["load", "--format", "hdfs", "--log", str(synth_dirs["log"]),
                 "--out", str(loaded)]) == 0
    capsys.readouterr()
    code = main(["enhance", "--table", str(loaded / "events.table.json"),
                 "--chain", "tokenize,wat", "--out", str(tmp_path / "o")])
    captured = capsys.readouterr()
    assert code == 1
    assert "config error:" in captured.err

    code = main(["enhance", "--table", str(loaded / "events.table.json"),
                 "--chain", "drain,spell", "--out", str(tmp_path / "o")])
    assert code == 1


def test_detect_runs_config(tmp_path, capsys, synth_dirs):
    cfg = tmp_path / "run.ini"
    out = tmp_path / "out"
    cfg.write_text(f"""
[loader]
format = hdfs
log = {synth_dirs["log"]}
labels = {synth_dirs["labels"]}

[enhance]
chain = normalize, tokenize, drain, aggregate

[features]
source = event_ids

[detect]
kind = dt

[split]
fraction = 0.5

[output]
dir = {out}
""")
    code = main(["detect", "--config", str(cfg)])
    captured = capsys.readouterr()
    assert code == 0
    assert f"artifacts in {out}" in captured.out
    assert (out / "report.json").exists()


def test_bench_subcommands(tmp_path, capsys, synth_dirs):
    log = str(synth_dirs["log"])
    labels = str(synth_dirs["labels"])

    code = main(["bench", "--task", "loading", "--format", "hdfs",
                 "--log", log, "--log", log, "--labels", labels,
                 "--repeats", "1"])
    assert code == 0

    out_csv = tmp_path / "parsers.csv"
    code = main(["bench", "--task", "parsers", "--format", "hdfs",
                 "--log", log, "--labels", labels,
                 "--parsers", "drain,spell", "--mode", "parser_internal",
                 "--repeats", "1", "--out", str(out_csv)])
    captured = capsys.readouterr()
    assert code == 0
    assert out_csv.exists()
    assert "csv ->" in captured.out

    code = main(["bench", "--task", "offload", "--format", "hdfs",
                 "--log", log, "--labels", labels, "--parsers", "drain",
                 "--repeats", "1"])
    assert code == 0


def test_exit_code_config_error(capsys):
    assert main([]) == 1
    assert main(["load", "--format", "raw"]) == 1  # missing --log/--out
    assert main(["bench", "--task", "parsers"]) == 1  # needs --log
    captured = capsys.readouterr()
    assert "config error:" in captured.err


def test_exit_code_io_error(tmp_path, capsys):
    code = main(["load", "--format", "raw", "--log",
                 str(tmp_path / "nope.log"), "--out", str(tmp_path / "o")])
    captured = capsys.readouterr()
    assert code == 2
    assert "io error:" in captured.err

    assert main(["detect", "--config", str(tmp_path / "missing.ini")]) == 2


def test_exit_code_stage_error(tmp_path, capsys):
    log = tmp_path / "plain.log"
    log.write_text("alpha one\nbeta two\ngamma three\ndelta four\n")
    cfg = tmp_path / "run.ini"
    cfg.write_text(f"""
[loader]
format = raw
log = {log}

[enhance]
chain = tokenize, aggregate

[output]
dir = {tmp_path / "out"}
""")
    code = main(["detect", "--config", str(cfg)])
    captured = capsys.readouterr()
    assert code == 3
    assert "aggregate" in captured.err

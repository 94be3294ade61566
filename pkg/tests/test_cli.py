from dynmatch.cli import main
from dynmatch.streams import generate_stream, write_stream


def test_generated_run_writes_all_artifacts(tmp_path, capsys):
    out = tmp_path / "out"
    code = main([
        "--mode", "general",
        "--eps", "0.5",
        "--beta", "24",
        "--lambda", "0.5",
        "--stream-kind", "random",
        "--n-left", "10",
        "--n-right", "10",
        "--steps", "150",
        "--seed", "3",
        "--checkpoint-every", "50",
        "--validate-every", "5",
        "--out-dir", str(out),
        "--deterministic-timing",
        "--no-plots",
    ])
    assert code == 0
    assert (out / "metrics.csv").exists()
    assert (out / "summary.json").exists()
    assert (out / "ratio.dat").exists()
    stdout = capsys.readouterr().out
    assert "beta=24" in stdout
    assert "steps=150" in stdout


def test_stream_file_replay(tmp_path):
    stream = generate_stream(
        "forest_union",
        {"n_left": 20, "n_right": 20, "steps": 120, "alpha": 2},
        seed=9,
    )
    stream_path = tmp_path / "updates.txt"
    write_stream(stream, stream_path)
    out = tmp_path / "out"
    code = main([
        "--mode", "small_arboricity",
        "--eps", "0.5",
        "--alpha", "2",
        "--stream-file", str(stream_path),
        "--checkpoint-every", "40",
        "--out-dir", str(out),
        "--deterministic-timing",
        "--no-plots",
    ])
    assert code == 0
    lines = (out / "metrics.csv").read_text().splitlines()
    assert len(lines) == 4


def test_bad_configuration_exits_with_usage_error(tmp_path, capsys):
    code = main([
        "--mode", "general",
        "--eps", "0.9",
        "--out-dir", str(tmp_path / "out"),
    ])
    assert code == 2
    assert "error:" in capsys.readouterr().err


def test_missing_stream_parameter_is_a_usage_error(tmp_path):
    code = main([
        "--stream-kind", "sliding_window",
        "--beta", "24",
        "--lambda", "0.5",
        "--out-dir", str(tmp_path / "out"),
    ])
    assert code == 2

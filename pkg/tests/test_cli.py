"""End-to-end command-line behavior."""

import numpy as np
import pytest

from fcmseg import GrayImage, LabelMap, read_pgm, write_pgm
from fcmseg.bench import read_csv
from fcmseg.cli import main

from conftest import make_phantom


@pytest.fixture
def phantom_path(tmp_path):
    path = tmp_path / "phantom.pgm"
    write_pgm(make_phantom(40, 30), path)
    return path


class TestSegment:
    def test_happy_path(self, phantom_path, tmp_path, capsys):
        out = tmp_path / "labels.pgm"
        code = main(
            [
                "segment",
                "--clusters", "4",
                "--m", "2",
                "--epsilon", "0.005",
                "--seed", "1",
                "--engine", "parallel",
                str(phantom_path),
                str(out),
            ]
        )
        assert code == 0
        assert out.is_file()
        printed = capsys.readouterr().out
        assert "iterations:" in printed
        assert "converged:" in printed
        levels = set(read_pgm(out).pixels.tolist())
        assert levels <= {0.0, 85.0, 170.0, 255.0}

    def test_engines_write_identical_bytes(self, phantom_path, tmp_path):
        out_seq = tmp_path / "seq.pgm"
        out_par = tmp_path / "par.pgm"
        args = ["--clusters", "4", "--seed", "3"]
        assert main(["segment", *args, "--engine", "sequential",
                     str(phantom_path), str(out_seq)]) == 0
        assert main(["segment", *args, "--engine", "parallel",
                     str(phantom_path), str(out_par)]) == 0
        assert out_seq.read_bytes() == out_par.read_bytes()

    def test_missing_input_fails(self, tmp_path, capsys):
        code = main(["segment", str(tmp_path / "nope.pgm"), str(tmp_path / "out.pgm")])
        assert code != 0
        assert "error:" in capsys.readouterr().err

    def test_bad_config_fails(self, phantom_path, tmp_path, capsys):
        code = main(
            ["segment", "--m", "0.5", str(phantom_path), str(tmp_path / "out.pgm")]
        )
        assert code != 0
        assert "error:" in capsys.readouterr().err


def write_mask(path, bits2d):
    arr = np.where(np.asarray(bits2d, dtype=bool), 255, 0).astype(np.float64)
    write_pgm(GrayImage(arr.shape[1], arr.shape[0], arr.reshape(-1)), path)


@pytest.fixture
def truth_setup(tmp_path):
    """Ground truth quarters plus a label map that matches it exactly."""
    size = 8
    regions = {
        "wm": (slice(0, 4), slice(0, 4)),
        "gm": (slice(0, 4), slice(4, 8)),
        "csf": (slice(4, 8), slice(0, 4)),
        "background": (slice(4, 8), slice(4, 8)),
    }
    truth_dir = tmp_path / "truth"
    truth_dir.mkdir()
    ref = np.zeros((size, size), dtype=np.int32)
    for idx, name in enumerate(("wm", "gm", "csf", "background")):
        bits = np.zeros((size, size), dtype=bool)
        bits[regions[name]] = True
        write_mask(truth_dir / f"{name}.pgm", bits)
        ref[regions[name]] = idx
    # scramble cluster identity relative to the class order
    perm = np.array([2, 0, 3, 1], dtype=np.int32)
    pred = LabelMap(size, size, perm[ref.reshape(-1)], 4)
    pred_path = tmp_path / "pred.pgm"
    write_pgm(pred, pred_path)
    return pred_path, truth_dir, ref, perm


class TestDscCommand:
    def test_perfect_prediction_scores_100(self, truth_setup, capsys):
        pred_path, truth_dir, _, _ = truth_setup
        assert main(["dsc", str(pred_path), str(truth_dir)]) == 0
        out = capsys.readouterr().out
        for name in ("wm", "gm", "csf", "background"):
            assert f"{name}: 1.0000 (100.00%)" in out

    def test_partially_wrong_class(self, truth_setup, tmp_path, capsys):
        pred_path, truth_dir, ref, perm = truth_setup
        flawed = perm[ref.reshape(-1)].copy()
        # move 8 of wm's 16 pixels into gm's cluster
        wm_cluster, gm_cluster = perm[0], perm[1]
        wm_positions = np.where(flawed == wm_cluster)[0][:8]
        flawed[wm_positions] = gm_cluster
        flawed_path = tmp_path / "flawed.pgm"
        write_pgm(LabelMap(8, 8, flawed, 4), flawed_path)
        assert main(["dsc", str(flawed_path), str(truth_dir)]) == 0
        out = capsys.readouterr().out
        # wm: 8 kept of 16 -> 2*8/(8+16); gm: all 16 plus 8 strays -> 2*16/(24+16)
        assert f"wm: {16 / 24:.4f}" in out
        assert f"gm: {32 / 40:.4f}" in out
        assert "csf: 1.0000" in out
        assert "background: 1.0000" in out

    def test_missing_class_file_fails(self, truth_setup, capsys):
        pred_path, truth_dir, _, _ = truth_setup
        (truth_dir / "gm.pgm").unlink()
        assert main(["dsc", str(pred_path), str(truth_dir)]) != 0
        assert "error:" in capsys.readouterr().err

    def test_dimension_mismatch_fails(self, truth_setup, tmp_path, capsys):
        _, truth_dir, _, _ = truth_setup
        small = tmp_path / "small.pgm"
        write_pgm(LabelMap(2, 2, [0, 1, 2, 3], 4), small)
        assert main(["dsc", str(small), str(truth_dir)]) != 0
        assert "error:" in capsys.readouterr().err


class TestBenchCommand:
    def test_csv_shape_and_round_trip(self, phantom_path, tmp_path, capsys):
        out_csv = tmp_path / "bench.csv"
        code = main(
            [
                "bench",
                "--sizes", "1200,2400",
                "--runs", "3",
                "--clusters", "3",
                "--seed", "5",
                "--max-iters", "60",
                "--out", str(out_csv),
                str(phantom_path),
            ]
        )
        assert code == 0
        text = out_csv.read_text(encoding="utf-8")
        lines = text.strip().split("\n")
        assert lines[0] == "dataset_bytes,engine,run,seconds,iterations"
        assert len(lines) == 1 + 2 * 2 * 3  # sizes x engines x runs
        records = read_csv(out_csv)
        assert len(records) == 4
        by_key = {(r.dataset_bytes, r.engine): r for r in records}
        for nbytes in {r.dataset_bytes for r in records}:
            seq = by_key[(nbytes, "sequential")]
            par = by_key[(nbytes, "parallel")]
            assert seq.iterations == par.iterations
            assert seq.speedup == 1.0
            assert par.speedup == pytest.approx(seq.mean_seconds / par.mean_seconds)
        printed = capsys.readouterr().out
        assert "speedup" in printed
        assert "baseline: sequential" in printed

    def test_sizes_must_be_nondecreasing(self, phantom_path, tmp_path, capsys):
        code = main(
            [
                "bench",
                "--sizes", "2400,1200",
                "--runs", "1",
                "--out", str(tmp_path / "x.csv"),
                str(phantom_path),
            ]
        )
        assert code != 0
        assert "error:" in capsys.readouterr().err

    def test_size_suffixes(self, phantom_path, tmp_path):
        out_csv = tmp_path / "k.csv"
        code = main(
            [
                "bench",
                "--sizes", "2k",
                "--runs", "1",
                "--clusters", "2",
                "--max-iters", "40",
                "--out", str(out_csv),
                str(phantom_path),
            ]
        )
        assert code == 0
        records = read_csv(out_csv)
        assert all(r.dataset_bytes >= 2048 for r in records)


class TestCompareCommand:
    def test_reports_agreement(self, phantom_path, capsys):
        code = main(["compare", "--clusters", "3", "--seed", "2", str(phantom_path)])
        assert code == 0
        out = capsys.readouterr().out
        assert "label agreement: 100.00%" in out
        assert "cross-engine DSC: 1.0000" in out
        assert "membership max-abs difference:" in out

    def test_deterministic_output(self, phantom_path, capsys):
        main(["compare", "--seed", "7", str(phantom_path)])
        first = capsys.readouterr().out
        main(["compare", "--seed", "7", str(phantom_path)])
        second = capsys.readouterr().out
        assert first == second

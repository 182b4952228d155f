"""Command-line front end: segment, dsc, bench and compare subcommands."""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import bench as bench_mod
from . import backend, core, parallel
from .errors import DimensionMismatchError, FcmError
from .imgio import (
    GROUND_TRUTH_CLASSES,
    label_intensity,
    read_ground_truth,
    read_pgm,
    write_pgm,
)
from .metrics import BinaryMask, dsc, mask_for_class, match_clusters
from .types import FcmConfig, LabelMap

ENGINES = {
    "sequential": core.run_fcm_sequential,
    "parallel": parallel.run_fcm_parallel,
}


def _add_config_flags(sub):
    sub.add_argument("--clusters", "-c", type=int, default=4, help="number of clusters")
    sub.add_argument("--m", type=float, default=2.0, help="fuzzifier (> 1)")
    sub.add_argument("--epsilon", type=float, default=0.005, help="convergence threshold")
    sub.add_argument("--max-iters", type=int, default=500, help="iteration cap")
    sub.add_argument("--seed", type=int, default=0, help="membership initialization seed")
    sub.add_argument("--block-size", type=int, default=128, help="reduction block width")


def _config_from(args) -> FcmConfig:
    return FcmConfig(
        c=args.clusters,
        m=args.m,
        epsilon=args.epsilon,
        max_iters=args.max_iters,
        seed=args.seed,
        block_size=args.block_size,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fcmseg",
        description="Fuzzy c-means image segmentation with sequential and "
        "block-parallel engines.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    seg = sub.add_parser("segment", help="cluster an image and write the label map")
    seg.add_argument("input", help="input PGM image")
    seg.add_argument("output", help="output label-map PGM")
    _add_config_flags(seg)
    seg.add_argument(
        "--engine",
        choices=sorted(ENGINES),
        default="sequential",
        help="clustering engine",
    )

    dsc_cmd = sub.add_parser("dsc", help="Dice similarity against ground-truth masks")
    dsc_cmd.add_argument("pred", help="predicted label-map PGM (as written by segment)")
    dsc_cmd.add_argument("truth", help="ground-truth directory with per-class masks")
    dsc_cmd.add_argument("--clusters", "-c", type=int, default=4, help="number of clusters")

    bench_cmd = sub.add_parser("bench", help="time both engines over enlarged datasets")
    bench_cmd.add_argument("input", help="base PGM image to enlarge")
    _add_config_flags(bench_cmd)
    bench_cmd.add_argument(
        "--sizes",
        required=True,
        help="comma-separated target byte counts; k/K and m/M suffixes scale by 1024/1048576",
    )
    bench_cmd.add_argument("--runs", type=int, default=30, help="repetitions per engine")
    bench_cmd.add_argument("--out", required=True, help="output CSV path")

    cmp_cmd = sub.add_parser("compare", help="run both engines and report agreement")
    cmp_cmd.add_argument("input", help="input PGM image")
    _add_config_flags(cmp_cmd)

    return parser


def _parse_sizes(spec: str):
    sizes = []
    for token in spec.split(","):
        token = token.strip()
        if not token:
            continue
        scale = 1
        if token[-1] in "kK":
            scale, token = 1024, token[:-1]
        elif token[-1] in "mM":
            scale, token = 1048576, token[:-1]
        sizes.append(int(token) * scale)
    if not sizes:
        raise FcmError("no sizes given")
    return sizes


def _read_label_map(path, c: int) -> LabelMap:
    img = read_pgm(path)
    level_to_label = {label_intensity(j, c): j for j in range(c)}
    labels = np.empty(img.pixel_count, dtype=np.int32)
    for i, value in enumerate(img.pixels):
        try:
            labels[i] = level_to_label[int(value)]
        except KeyError:
            raise FcmError(
                f"intensity {int(value)} in {path} is not one of the "
                f"{c}-cluster export levels {sorted(level_to_label)}"
            ) from None
    return LabelMap(img.width, img.height, labels, c)


def cmd_segment(args) -> int:
    img = read_pgm(args.input)
    cfg = _config_from(args)
    result = ENGINES[args.engine](img, cfg)
    write_pgm(result.labels, args.output)
    print(f"engine: {args.engine} ({backend.backend_name()} kernels)")
    print(f"iterations: {result.iterations}")
    print(f"final objective: {result.objective_trace[-1]:.6g}")
    print(f"converged: {str(result.converged).lower()}")
    print(f"wrote {args.output}")
    return 0


def cmd_dsc(args) -> int:
    c = args.clusters
    if c != len(GROUND_TRUTH_CLASSES):
        raise FcmError(
            f"per-class evaluation needs {len(GROUND_TRUTH_CLASSES)} clusters, got {c}"
        )
    pred = _read_label_map(args.pred, c)
    truth = read_ground_truth(args.truth)
    first = truth[GROUND_TRUTH_CLASSES[0]]
    if (first.width, first.height) != (pred.width, pred.height):
        raise DimensionMismatchError(
            f"prediction is {pred.width}x{pred.height}, "
            f"ground truth is {first.width}x{first.height}"
        )

    # Reference label map: class index = position in GROUND_TRUTH_CLASSES.
    # Uncovered pixels fall to background; overlaps keep the lowest index.
    background = GROUND_TRUTH_CLASSES.index("background")
    ref_labels = np.full(pred.width * pred.height, background, dtype=np.int32)
    for idx in range(len(GROUND_TRUTH_CLASSES) - 1, -1, -1):
        name = GROUND_TRUTH_CLASSES[idx]
        ref_labels[truth[name].bits] = idx
    ref = LabelMap(pred.width, pred.height, ref_labels, c)

    perm = match_clusters(pred, ref, c)
    for idx, name in enumerate(GROUND_TRUTH_CLASSES):
        p = perm.index(idx)
        value = dsc(mask_for_class(pred, p), truth[name])
        print(f"{name}: {value:.4f} ({value * 100.0:.2f}%)")
    return 0


def cmd_bench(args) -> int:
    img = read_pgm(args.input)
    cfg = _config_from(args)
    sizes = _parse_sizes(args.sizes)
    records, transfer_stats = bench_mod.run_benchmark(img, sizes, args.runs, cfg)
    bench_mod.write_csv(records, args.out)
    print(bench_mod.summary_table(records, transfer_stats))
    print(f"wrote {args.out}")
    return 0


def cmd_compare(args) -> int:
    img = read_pgm(args.input)
    cfg = _config_from(args)
    seq = core.run_fcm_sequential(img, cfg)
    par = parallel.run_fcm_parallel(img, cfg)
    delta = core.membership_delta(par.membership, seq.membership)
    agree = float(np.mean(seq.labels.labels == par.labels.labels)) * 100.0
    print(f"iterations: sequential={seq.iterations} parallel={par.iterations}")
    print(f"membership max-abs difference: {delta:.3g}")
    print(f"label agreement: {agree:.2f}%")
    for j in range(cfg.c):
        value = dsc(mask_for_class(seq.labels, j), mask_for_class(par.labels, j))
        print(f"cluster {j} cross-engine DSC: {value:.4f}")
    return 0


COMMANDS = {
    "segment": cmd_segment,
    "dsc": cmd_dsc,
    "bench": cmd_bench,
    "compare": cmd_compare,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (FcmError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

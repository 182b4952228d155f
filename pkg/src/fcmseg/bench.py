"""Benchmark harness: timed engine comparison over enlarged datasets.

Timing covers the center/membership iteration loop only; membership
initialization, defuzzification and file I/O stay outside the clock.
Both engines start each run from the same seeded membership, so their
iteration counts match and timing differences are attributable.
"""

from __future__ import annotations

import csv
import statistics
import time
from dataclasses import dataclass
from pathlib import Path

from . import core, parallel
from .errors import InvalidConfigError
from .imgio import enlarge_dataset
from .types import FcmConfig, GrayImage

ENGINES = ("sequential", "parallel")
CSV_HEADER = ("dataset_bytes", "engine", "run", "seconds", "iterations")


@dataclass(frozen=True)
class BenchRecord:
    """Aggregated timings for one (dataset size, engine) pair.

    speedup is relative to the sequential baseline mean at the same size,
    so sequential records carry 1.0.
    """

    dataset_bytes: int
    engine: str
    runs: int
    mean_seconds: float
    seconds: tuple
    iterations: int
    speedup: float

    def __post_init__(self):
        if self.engine not in ENGINES:
            raise InvalidConfigError(f"unknown engine {self.engine!r}")
        if self.runs < 1 or self.runs != len(self.seconds):
            raise InvalidConfigError("runs must match the number of recorded seconds")


def _timed_loop(engine: str, x, u0, cfg: FcmConfig, workers):
    u = u0.copy()
    if engine == "sequential":
        t0 = time.perf_counter()
        _, _, iterations, _, _ = core._iterate(x, u, cfg)
        elapsed = time.perf_counter() - t0
        return elapsed, iterations, None
    t0 = time.perf_counter()
    _, _, iterations, _, _, transfers = parallel._iterate(x, u, cfg, workers)
    elapsed = time.perf_counter() - t0
    return elapsed, iterations, transfers


def run_benchmark(
    img: GrayImage,
    sizes,
    runs: int,
    cfg: FcmConfig,
    workers: int | None = None,
    progress=None,
):
    """Time both engines over every target size.

    sizes must be non-decreasing byte counts, each at least the source
    image size. Returns (records, transfer_stats) where transfer_stats
    maps dataset_bytes to (event_count, total_bytes) observed in one
    parallel run.
    """
    sizes = [int(s) for s in sizes]
    if any(b < a for a, b in zip(sizes, sizes[1:])):
        raise InvalidConfigError("sizes must be non-decreasing")
    if runs < 1:
        raise InvalidConfigError(f"runs must be >= 1, got {runs}")
    w = parallel.resolve_workers(workers)

    records = []
    transfer_stats = {}
    for target in sizes:
        big = enlarge_dataset(img, target)
        n = big.pixel_count
        u0 = core.init_membership(n, cfg).u
        by_engine = {}
        for engine in ENGINES:
            seconds = []
            iterations = 0
            for run in range(runs):
                elapsed, iterations, transfers = _timed_loop(engine, big.pixels, u0, cfg, w)
                seconds.append(elapsed)
                if transfers is not None:
                    transfer_stats[n] = (
                        len(transfers),
                        sum(nbytes for _, _, nbytes in transfers),
                    )
                if progress is not None:
                    progress(n, engine, run, elapsed, iterations)
            by_engine[engine] = (seconds, iterations)
        seq_mean = statistics.fmean(by_engine["sequential"][0])
        par_mean = statistics.fmean(by_engine["parallel"][0])
        for engine in ENGINES:
            seconds, iterations = by_engine[engine]
            records.append(
                BenchRecord(
                    dataset_bytes=n,
                    engine=engine,
                    runs=runs,
                    mean_seconds=statistics.fmean(seconds),
                    seconds=tuple(seconds),
                    iterations=iterations,
                    speedup=1.0 if engine == "sequential" else seq_mean / par_mean,
                )
            )
    return records, transfer_stats


def write_csv(records, path) -> None:
    """Write per-run rows: dataset_bytes,engine,run,seconds,iterations."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for record in records:
            for run, seconds in enumerate(record.seconds):
                writer.writerow(
                    [record.dataset_bytes, record.engine, run, repr(seconds), record.iterations]
                )


def read_csv(path):
    """Rebuild BenchRecords from a CSV produced by write_csv."""
    groups = {}
    order = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != CSV_HEADER:
            raise InvalidConfigError(f"unexpected CSV header {header!r}")
        for row in reader:
            if not row or row[0].startswith("#"):
                continue
            nbytes, engine, _, seconds, iterations = row
            key = (int(nbytes), engine)
            if key not in groups:
                groups[key] = ([], int(iterations))
                order.append(key)
            groups[key][0].append(float(seconds))

    seq_means = {
        nbytes: statistics.fmean(groups[(nbytes, "sequential")][0])
        for nbytes, engine in order
        if engine == "sequential"
    }
    records = []
    for nbytes, engine in order:
        seconds, iterations = groups[(nbytes, engine)]
        mean = statistics.fmean(seconds)
        speedup = 1.0 if engine == "sequential" else seq_means[nbytes] / mean
        records.append(
            BenchRecord(
                dataset_bytes=nbytes,
                engine=engine,
                runs=len(seconds),
                mean_seconds=mean,
                seconds=tuple(seconds),
                iterations=iterations,
                speedup=speedup,
            )
        )
    return records


def summary_table(records, transfer_stats=None) -> str:
    """Text table: one row per size with both engine means and the speedup."""
    by_size = {}
    for record in records:
        by_size.setdefault(record.dataset_bytes, {})[record.engine] = record
    lines = [
        "dataset_bytes  sequential_mean_s  parallel_mean_s  speedup  iterations",
    ]
    for nbytes in sorted(by_size):
        seq = by_size[nbytes].get("sequential")
        par = by_size[nbytes].get("parallel")
        if seq is None or par is None:
            continue
        lines.append(
            f"{nbytes:>13d}  {seq.mean_seconds:>17.6f}  {par.mean_seconds:>15.6f}  "
            f"{par.speedup:>7.2f}  {seq.iterations:>10d}"
        )
    lines.append("speedup baseline: sequential engine mean (speedup = sequential/parallel)")
    if transfer_stats:
        for nbytes in sorted(transfer_stats):
            count, total = transfer_stats[nbytes]
            lines.append(
                f"modeled transfers at {nbytes} bytes: {count} events, {total} bytes per run"
            )
    return "\n".join(lines)

"""Wall-clock harness for external TSP solvers.

Each (instance, seed, repetition) runs sequentially as a subprocess built
from a command template with ``{file}`` and ``{seed}`` placeholders, e.g.
``concorde -s {seed} {file}``.
"""
from __future__ import annotations

import csv
import io
import shlex
import subprocess
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .analysis import RuntimeModel, fit_runtime_model
from .tsplib import parse_tsplib_file

RECORD_HEADER = ["instance", "N", "seed", "repetition", "wall_seconds", "exit_status", "censored"]
SUMMARY_HEADER = ["instance", "N", "runs", "ok_runs", "min_seconds", "avg_seconds", "max_seconds"]


class ExternalCommandError(RuntimeError):
    pass


@dataclass(frozen=True)
class BenchConfig:
    command_template: str
    seeds: tuple[int, ...]
    repetitions: int = 1
    timeout_seconds: float = 3600.0

    def __post_init__(self) -> None:
        if "{file}" not in self.command_template:
            raise ValueError("command template must contain {file}")
        if not self.seeds:
            raise ValueError("at least one seed is required")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if not self.timeout_seconds > 0:
            raise ValueError("timeout must be positive")
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))

    def command(self, file: str | Path, seed: int) -> list[str]:
        text = self.command_template.format(file=shlex.quote(str(file)), seed=int(seed))
        return shlex.split(text)


@dataclass(frozen=True)
class BenchRecord:
    instance_name: str
    N: int
    seed: int
    repetition: int
    wall_seconds: float
    exit_status: int | str
    censored: bool = False

    @property
    def ok(self) -> bool:
        return self.exit_status == 0 and not self.censored


@dataclass(frozen=True)
class BenchSummary:
    instance_name: str
    N: int
    runs: int
    ok_runs: int
    min_seconds: float
    avg_seconds: float
    max_seconds: float


def run_once(config: BenchConfig, file: str | Path, seed: int) -> tuple[float, int | str, bool]:
    cmd = config.command(file, seed)
    start = time.perf_counter()
    try:
        proc = subprocess.run(cmd, stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL,
                              timeout=config.timeout_seconds, check=False)
    except subprocess.TimeoutExpired:
        return config.timeout_seconds, "timeout", True
    except OSError as exc:
        raise ExternalCommandError(f"cannot run {cmd[0]!r}: {exc}") from exc
    return time.perf_counter() - start, proc.returncode, False


def run_bench(config: BenchConfig, files: Sequence[str | Path]) -> list[BenchRecord]:
    records = []
    for file in files:
        path = Path(file)
        tf = parse_tsplib_file(path.read_text(encoding="ascii"))
        for seed in config.seeds:
            for rep in range(config.repetitions):
                wall, status, censored = run_once(config, path, seed)
                records.append(BenchRecord(path.stem, tf.dimension, seed, rep, wall, status, censored))
    return records


def summarize(records: Iterable[BenchRecord]) -> list[BenchSummary]:
    groups: dict[tuple[str, int], list[BenchRecord]] = {}
    for r in records:
        groups.setdefault((r.instance_name, r.N), []).append(r)
    out = []
    for (name, N), rs in groups.items():
        ok = [r.wall_seconds for r in rs if r.ok]
        if ok:
            lo, avg, hi = min(ok), sum(ok) / len(ok), max(ok)
        else:
            lo = avg = hi = float("nan")
        out.append(BenchSummary(name, N, len(rs), len(ok), lo, avg, hi))
    return out


def fit_summaries(summaries: Iterable[BenchSummary]) -> RuntimeModel | None:
    """Exponential fit over the per-instance averages; None when fewer than
    three instances completed."""
    pts = [(s.N, s.avg_seconds) for s in summaries if s.ok_runs > 0 and s.avg_seconds > 0]
    if len(pts) < 3:
        return None
    return fit_runtime_model(pts)


def records_csv(records: Iterable[BenchRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(RECORD_HEADER)
    for r in records:
        w.writerow([r.instance_name, r.N, r.seed, r.repetition, f"{r.wall_seconds:.6f}",
                    r.exit_status, "true" if r.censored else "false"])
    return buf.getvalue()


def summary_csv(summaries: Iterable[BenchSummary]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SUMMARY_HEADER)
    for s in summaries:
        w.writerow([s.instance_name, s.N, s.runs, s.ok_runs,
                    f"{s.min_seconds:.6f}", f"{s.avg_seconds:.6f}", f"{s.max_seconds:.6f}"])
    return buf.getvalue()


def read_points_csv(text: str) -> list[tuple[float, float]]:
    """(N, seconds) pairs from a CSV with columns N and seconds, or from a
    record CSV (successful, uncensored runs only)."""
    rows = list(csv.DictReader(io.StringIO(text)))
    if not rows:
        return []
    if "seconds" in rows[0]:
        return [(float(r["N"]), float(r["seconds"])) for r in rows]
    if "wall_seconds" in rows[0]:
        return [(float(r["N"]), float(r["wall_seconds"])) for r in rows
                if r["exit_status"] == "0" and r.get("censored", "false") != "true"]
    raise ValueError("CSV needs columns N and seconds (or a bench record CSV)")

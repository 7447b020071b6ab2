"""Scaling benchmark over seeded random instances."""

from __future__ import annotations

import csv
import io
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import astuple, dataclass, fields
from typing import Iterable, Sequence

from .blocking import is_stable
from .generator import GenParams, generate
from .model import ONE
from .solver import Algorithm, solve

HEADER = ("m", "n", "ratio", "q", "t", "trial", "seed", "algorithm", "runtime_ns", "stable", "matching_size")


@dataclass(frozen=True)
class BenchRow:
    m: int
    n: int
    ratio: int
    q: int
    t: float
    trial: int
    seed: int
    algorithm: str
    runtime_ns: int
    stable: bool | None  # None when verification was skipped
    matching_size: int

    def csv_fields(self) -> list[str]:
        out = [str(v) for v in astuple(self)]
        out[HEADER.index("stable")] = "skipped" if self.stable is None else str(self.stable).lower()
        return out


assert tuple(f.name for f in fields(BenchRow)) == HEADER


@dataclass(frozen=True)
class BenchTask:
    params: GenParams
    trial: int
    algorithm: str
    verify_upto: int


def run_trial(task: BenchTask) -> BenchRow:
    p = task.params
    inst = generate(p)
    algorithm = Algorithm(task.algorithm)
    start = time.perf_counter_ns()
    result = solve(inst, algorithm)
    elapsed = max(time.perf_counter_ns() - start, 1)
    stable = None
    if inst.n * inst.m <= task.verify_upto:
        stable = is_stable(inst, result.matching, ONE)
    return BenchRow(p.m, p.n, p.ratio, p.q, p.t, task.trial, p.seed, algorithm.value,
                    elapsed, stable, len(result.matching))


def bench_tasks(m_list: Sequence[int], ratio: int, q: int, t: float, trials: int, seed: int,
                algorithm: str = "smart", verify_upto: int = 0) -> list[BenchTask]:
    """One task per (setting, trial); trial ``k`` uses seed ``seed + k``."""
    return [
        BenchTask(GenParams(m=m, ratio=ratio, q=q, t=t, seed=seed + k), k, algorithm, verify_upto)
        for m in m_list
        for k in range(trials)
    ]


def run_bench(tasks: Iterable[BenchTask], jobs: int = 1) -> list[BenchRow]:
    """Rows in task order whatever the completion order of the workers."""
    tasks = list(tasks)
    if jobs <= 1 or len(tasks) <= 1:
        return [run_trial(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(run_trial, tasks))


def rows_to_csv(rows: Iterable[BenchRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(HEADER)
    for r in rows:
        w.writerow(r.csv_fields())
    return buf.getvalue()

"""Seed sweeps over one scenario."""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

from .sim import Outcome, SimConfig, run, with_seed


class BatchError(RuntimeError):
    def __init__(self, seed: int, cause: BaseException):
        super().__init__(f"seed {seed}: {type(cause).__name__}: {cause}")
        self.seed = seed


@dataclass(frozen=True)
class BatchSummary:
    outcomes: tuple[tuple[int, Outcome], ...]
    n_runs: int
    n_done: int
    min_J: float | None
    max_funnel: float | None
    wall_total: float
    wall_max: float

    @property
    def success_rate(self) -> float:
        return self.n_done / self.n_runs


def _one(args: tuple[SimConfig, int]) -> tuple[int, Outcome, float]:
    cfg, seed = args
    t0 = time.perf_counter()
    try:
        _, out = run(with_seed(cfg, seed))
    except Exception as exc:  # re-raised with the seed attached
        raise BatchError(seed, exc) from exc
    return seed, out, time.perf_counter() - t0


def summarize(results: Sequence[tuple[int, Outcome, float]]) -> BatchSummary:
    results = sorted(results, key=lambda r: r[0])
    js = [o.min_J for _, o, _ in results if o.min_J is not None]
    fs = [o.max_funnel for _, o, _ in results if o.max_funnel is not None]
    walls = [w for _, _, w in results]
    return BatchSummary(
        outcomes=tuple((s, o) for s, o, _ in results),
        n_runs=len(results),
        n_done=sum(o.status == "done" for _, o, _ in results),
        min_J=min(js) if js else None,
        max_funnel=max(fs) if fs else None,
        wall_total=sum(walls),
        wall_max=max(walls) if walls else 0.0,
    )


def run_batch(cfg: SimConfig, seeds: Sequence[int], workers: int = 1) -> BatchSummary:
    if not seeds:
        raise ValueError("need at least one seed")
    jobs = [(cfg, s) for s in seeds]
    if workers <= 1:
        results = [_one(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_one, jobs))
    return summarize(results)

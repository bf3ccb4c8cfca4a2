"""Benchmark harness over the synthetic uniform matrices.

A grid cell is (size, rank, method).  Every trial regenerates the input
from a derived seed; NMF methods additionally run a configurable number
of random restarts per trial and report the spread.  Cells are pure
functions of (grid, seed), so they can be dispatched to worker threads —
capped by the ``NLRM_THREADS`` environment variable — without changing
any result.  Timing cells in parallel on a busy machine inflates wall
times; the default is serial.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from statistics import mean, median
from typing import Optional

from .datagen import gen_uniform
from .errors import NlrmError
from .rng import derive_seed
from .solvers import SolverConfig, ap_solve, nmf_hals_solve, nmf_mu_solve, tap_solve

METHODS = ("tap", "ap", "mu", "hals")
TABLE1_SIZES = (200, 400, 800)
REPORT_SCHEMA = 1


@dataclass
class BenchCell:
    """Aggregated result of one (size, rank, method) grid cell."""

    family: str
    m: int
    n: int
    rank: int
    method: str
    mean_rel_error: float = float("nan")
    min_rel_error: float = float("nan")
    max_rel_error: float = float("nan")
    mean_seconds: float = float("nan")
    median_seconds: float = float("nan")
    trials: int = 0
    restarts: int = 0
    error: Optional[str] = None


@dataclass
class BenchReport:
    schema: int
    suite: str
    seed: int
    cells: list = field(default_factory=list)

    def to_dict(self):
        return {
            "schema": self.schema,
            "suite": self.suite,
            "seed": self.seed,
            "cells": [asdict(cell) for cell in self.cells],
        }


def table1_grid(scale: float = 1.0, sizes=None):
    """(size, rank) pairs of the synthetic benchmark: ranks n/20, n/10, n/5.

    ``scale`` shrinks the sizes (rank ratios kept) so the suite fits in CI
    budgets; ``sizes`` overrides the size list entirely.
    """
    if sizes is None:
        sizes = [max(20, int(round(s * scale))) for s in TABLE1_SIZES]
    grid = []
    for n in sizes:
        for divisor in (20, 10, 5):
            grid.append((n, max(1, n // divisor)))
    return grid


def run_bench(
    grid,
    methods=METHODS,
    trials: int = 1,
    restarts: int = 10,
    seed: int = 0,
    tol: float = 1e-6,
    max_iter: int = 500,
    suite: str = "custom",
    max_workers: Optional[int] = None,
) -> BenchReport:
    """Run the requested methods over ``grid`` and aggregate per cell.

    ``grid`` is a list of (size, rank) pairs; inputs are square uniform
    matrices.  Errors inside a cell are recorded on the cell, not raised.
    """
    for method in methods:
        if method not in METHODS:
            raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    if trials < 1 or restarts < 1:
        raise ValueError("trials and restarts must be >= 1")

    tasks = [(n, rank, method) for (n, rank) in grid for method in methods]
    if max_workers is None:
        max_workers = max(1, int(os.environ.get("NLRM_THREADS", "1")))

    def run(task):
        n, rank, method = task
        return _run_cell(n, rank, method, trials, restarts, seed, tol, max_iter)

    if max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            cells = list(pool.map(run, tasks))
    else:
        cells = [run(task) for task in tasks]
    return BenchReport(schema=REPORT_SCHEMA, suite=suite, seed=seed, cells=cells)


def _run_cell(n, rank, method, trials, restarts, seed, tol, max_iter):
    cell = BenchCell(family="uniform", m=n, n=n, rank=rank, method=method)
    errors = []
    seconds = []
    try:
        for trial in range(trials):
            a = gen_uniform(n, n, derive_seed(seed, trial))
            if method in ("tap", "ap"):
                cfg = SolverConfig(rank=rank, max_iter=max_iter, rel_change_tol=tol)
                solve = tap_solve if method == "tap" else ap_solve
                result = solve(a, cfg)
                errors.append(result.rel_error_x)
                seconds.append(result.trace.seconds)
            else:
                solve = nmf_mu_solve if method == "mu" else nmf_hals_solve
                for restart in range(restarts):
                    cfg = SolverConfig(
                        rank=rank,
                        max_iter=max_iter,
                        rel_change_tol=tol,
                        seed=derive_seed(seed, 1000 + trial * restarts + restart),
                    )
                    _, _, trace = solve(a, cfg)
                    errors.append(trace.records[-1].rel_error)
                    seconds.append(trace.seconds)
    except NlrmError as exc:
        cell.error = f"{type(exc).__name__}: {exc}"
        return cell
    cell.mean_rel_error = mean(errors)
    cell.min_rel_error = min(errors)
    cell.max_rel_error = max(errors)
    cell.mean_seconds = mean(seconds)
    cell.median_seconds = median(seconds)
    cell.trials = trials
    cell.restarts = restarts if method in ("mu", "hals") else 1
    return cell


CSV_HEADER = (
    "family,m,n,rank,method,mean_rel_error,min_rel_error,max_rel_error,"
    "mean_seconds,median_seconds,trials,restarts"
)


def report_csv_lines(report: BenchReport):
    """Plot-ready long-format CSV: one row per cell."""
    lines = [CSV_HEADER]
    for c in report.cells:
        lines.append(
            f"{c.family},{c.m},{c.n},{c.rank},{c.method},"
            f"{c.mean_rel_error:.17g},{c.min_rel_error:.17g},{c.max_rel_error:.17g},"
            f"{c.mean_seconds:.17g},{c.median_seconds:.17g},{c.trials},{c.restarts}"
        )
    return lines

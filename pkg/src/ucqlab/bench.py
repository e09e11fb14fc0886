"""Empirical checks of the linear-preprocessing / constant-delay contract.

The harness times `prepare_free_connex` and the inter-answer gaps of the
resulting stream over a sweep of synthetic database sizes, emits the rows
as CSV plus an aligned table, and renders size-vs-time figures.
"""

from __future__ import annotations

import csv
import math
import os
import random
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .database import Database
from .engine import prepare_free_connex
from .queries import ConjunctiveQuery


@dataclass
class BenchRow:
    query: str
    size: int
    preprocessing: float
    max_gap: float
    median_gap: float
    answers: int


@dataclass
class BenchReport:
    rows: list[BenchRow]
    seed: int

    def to_csv(self, path: str | Path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["query", "size", "preprocessing_s", "max_gap_s", "median_gap_s", "answers"]
            )
            for r in self.rows:
                writer.writerow(
                    [r.query, r.size, f"{r.preprocessing:.6f}",
                     f"{r.max_gap:.9f}", f"{r.median_gap:.9f}", r.answers]
                )

    def format_table(self) -> str:
        header = f"{'query':<12}{'size':>10}{'prep (s)':>12}{'max gap (s)':>14}{'answers':>10}"
        lines = [f"# seed={self.seed}", header, "-" * len(header)]
        for r in self.rows:
            lines.append(
                f"{r.query:<12}{r.size:>10}{r.preprocessing:>12.6f}"
                f"{r.max_gap:>14.9f}{r.answers:>10}"
            )
        return "\n".join(lines)


def random_database_for(
    q: ConjunctiveQuery, size: int, rng: random.Random
) -> Database:
    """`size` random tuples per relation over a domain scaling with size."""
    db = Database()
    domain = max(2, size)
    arities = {a.relation: a.arity for a in q.body}
    for symbol, arity in sorted(arities.items()):
        for _ in range(size):
            db.add_tuple(
                symbol, tuple(str(rng.randrange(domain)) for _ in range(arity))
            )
    return db


def _measure(q: ConjunctiveQuery, size: int, seed: int) -> BenchRow:
    rng = random.Random(seed * 1_000_003 + size)
    db = random_database_for(q, size, rng)
    start = time.perf_counter()
    prepared = prepare_free_connex(q, db)
    prep = time.perf_counter() - start
    stream = prepared.stream()
    count = sum(1 for _ in stream)
    gaps = stream.gaps
    return BenchRow(
        q.name,
        size,
        prep,
        max(gaps, default=0.0),
        statistics.median(gaps) if gaps else 0.0,
        count,
    )


def thread_budget() -> int:
    raw = os.environ.get("UCQLAB_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def run_bench(
    queries: list[ConjunctiveQuery], sizes: list[int], seed: int
) -> BenchReport:
    cells = [(q, size) for q in queries for size in sizes]
    workers = thread_budget()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda c: _measure(c[0], c[1], seed), cells))
    else:
        rows = [_measure(q, size, seed) for q, size in cells]
    return BenchReport(rows, seed)


def fit_exponent(sizes: list[int], times: list[float]) -> float:
    """Least-squares slope of log(time) against log(size)."""
    pts = [
        (math.log(s), math.log(t))
        for s, t in zip(sizes, times)
        if s > 0 and t > 0
    ]
    if len(pts) < 2:
        return 0.0
    mx = sum(x for x, _ in pts) / len(pts)
    my = sum(y for _, y in pts) / len(pts)
    denom = sum((x - mx) ** 2 for x, _ in pts)
    if denom == 0:
        return 0.0
    return sum((x - mx) * (y - my) for x, y in pts) / denom


def render_figures(report: BenchReport, outdir: str | Path) -> list[Path]:
    """Size-vs-preprocessing and size-vs-max-gap plots, one file each."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    by_query: dict[str, list[BenchRow]] = {}
    for r in report.rows:
        by_query.setdefault(r.query, []).append(r)

    paths = []
    for field_name, ylabel, fname in (
        ("preprocessing", "preprocessing (s)", "preprocessing.png"),
        ("max_gap", "max inter-answer gap (s)", "gaps.png"),
    ):
        fig, ax = plt.subplots(figsize=(6, 4))
        for name, rows in sorted(by_query.items()):
            rows = sorted(rows, key=lambda r: r.size)
            ax.plot(
                [r.size for r in rows],
                [getattr(r, field_name) for r in rows],
                marker="o",
                label=name,
            )
        ax.set_xscale("log", base=2)
        if field_name == "preprocessing":
            ax.set_yscale("log")
        ax.set_xlabel("database size (tuples per relation)")
        ax.set_ylabel(ylabel)
        ax.legend()
        fig.tight_layout()
        path = outdir / fname
        fig.savefig(path, dpi=120)
        plt.close(fig)
        paths.append(path)
    return paths

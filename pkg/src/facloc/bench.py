"""Experiment harness: mean cost ratio to the LP bound over seeded batches."""

from __future__ import annotations

import csv
import io
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from facloc.errors import ParameterError
from facloc.instances import GenSpec, generate
from facloc.lp.programs import FL_SIZE_LIMIT, lp_bound
from facloc.solvers import ALGORITHMS

#: Column order of the published comparison tables.
BENCH_ALGORITHMS = ("jv", "greedy1", "greedy2")
DEFAULT_SIZES = ((50, 20), (100, 20), (100, 30))
CSV_FIELDS = ("n_c", "n_f", "algorithm", "mean_ratio", "trials", "seed", "lp")


@dataclass(frozen=True)
class BenchRow:
    n_c: int
    n_f: int
    algorithm: str
    mean_ratio: float | None  # None when the LP bound was skipped
    trials: int
    seed: int
    wall_time: float

    @property
    def lp_skipped(self) -> bool:
        return self.mean_ratio is None


def parse_sizes(text: str) -> list[tuple[int, int]]:
    """``"50x20,100x20"`` -> ``[(50, 20), (100, 20)]`` as ``(n_c, n_f)`` pairs."""
    sizes = []
    for part in text.split(","):
        part = part.strip().lower()
        try:
            a, b = part.split("x")
            n_c, n_f = int(a), int(b)
        except ValueError:
            raise ParameterError(f"size {part!r} is not of the form <cities>x<facilities>") from None
        if n_c < 1 or n_f < 1:
            raise ParameterError(f"size {part!r} needs at least one city and one facility")
        sizes.append((n_c, n_f))
    return sizes


def _trial(spec: GenSpec, algorithms: tuple[str, ...], with_lp: bool) -> tuple[dict[str, float], dict[str, float]]:
    """Costs (or ratios when ``with_lp``) and solver wall times for one instance."""
    inst = generate(spec)
    bound = lp_bound(inst) if with_lp else 1.0
    vals, times = {}, {}
    for alg in algorithms:
        t0 = time.perf_counter()
        total = ALGORITHMS[alg](inst).solution.total
        times[alg] = time.perf_counter() - t0
        vals[alg] = total / bound if bound > 0 else (1.0 if total <= inst.tol else float("inf"))
    return vals, times


def run_bench(
    suite: str,
    sizes=DEFAULT_SIZES,
    trials: int = 15,
    seed: int = 0,
    algorithms: tuple[str, ...] = BENCH_ALGORITHMS,
    workers: int = 1,
    edge_p: float = 0.1,
) -> list[BenchRow]:
    """One row per ``(size, algorithm)``, in input order.

    Trial ``t`` of every size uses seed ``seed + t``. Rows whose instances
    exceed the dense LP guard report ``mean_ratio=None``.
    """
    if suite not in ("grid", "gnp"):
        raise ParameterError(f"suite must be grid or gnp, got {suite!r}")
    if trials < 1:
        raise ParameterError("trials must be at least 1")
    unknown = [a for a in algorithms if a not in ALGORITHMS]
    if unknown:
        raise ParameterError(f"unknown algorithms {unknown}")
    rows: list[BenchRow] = []
    for n_c, n_f in sizes:
        with_lp = n_c * n_f <= FL_SIZE_LIMIT
        specs = [GenSpec(suite, n_c=n_c, n_f=n_f, seed=seed + t, edge_p=edge_p) for t in range(trials)]
        if workers > 1:
            with ProcessPoolExecutor(workers) as pool:
                results = list(pool.map(_trial, specs, [algorithms] * trials, [with_lp] * trials))
        else:
            results = [_trial(s, algorithms, with_lp) for s in specs]
        for alg in algorithms:
            ratio = float(np.mean([r[0][alg] for r in results])) if with_lp else None
            wall = float(sum(r[1][alg] for r in results))
            rows.append(BenchRow(n_c, n_f, alg, ratio, trials, seed, wall))
    return rows


def rows_to_csv(rows: list[BenchRow]) -> str:
    """CSV without wall times, so output is byte-stable for a fixed seed."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for r in rows:
        ratio = "" if r.lp_skipped else f"{r.mean_ratio:.6f}"
        w.writerow([r.n_c, r.n_f, r.algorithm, ratio, r.trials, r.seed, "skipped" if r.lp_skipped else "ok"])
    return buf.getvalue()


def rows_to_table(rows: list[BenchRow]) -> str:
    """Human-readable table with one line per size and one column per algorithm."""
    algs = list(dict.fromkeys(r.algorithm for r in rows))
    sizes = list(dict.fromkeys((r.n_c, r.n_f) for r in rows))
    by = {(r.n_c, r.n_f, r.algorithm): r for r in rows}
    lines = [f"{'n_c':>5} {'n_f':>5} " + " ".join(f"{a:>10}" for a in algs)]
    for n_c, n_f in sizes:
        cells = []
        for a in algs:
            r = by[(n_c, n_f, a)]
            cells.append(f"{'lp=skipped':>10}" if r.lp_skipped else f"{r.mean_ratio:>10.4f}")
        lines.append(f"{n_c:>5} {n_f:>5} " + " ".join(cells))
    return "\n".join(lines) + "\n"

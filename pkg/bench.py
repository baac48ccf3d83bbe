"""Benchmark harness: solve every instance of a directory and aggregate per class.

Identical-bin datasets are summarized as the sum of bins per (class, item count)
cell, variable-sized datasets as the mean utilization per class. Thread and
time-limit sweeps add one row per setting.
"""
import glob
import logging
import os
from typing import List, Optional

import pandas as pd
from pydantic import BaseModel, Field

from config import ensure_dir
from errors import PackingError
from instance_io import load_instance
from models import utilization
from parallel import run_parallel
from search import SearchParams
from validation import validate

logger = logging.getLogger(__name__)

INSTANCE_PATTERNS = ("*.txt", "*.json", "*.ins")
SUM_OF_BINS = "sum_of_bins"
MEAN_UTILIZATION = "mean_utilization"


class InstanceRow(BaseModel):
    instance: str
    class_name: str
    items: int
    bin_types: int
    rotation_allowed: bool
    threads: int
    time_limit: float
    seed: int
    status: str = "ok"
    error: Optional[str] = None
    total_bin_area: Optional[int] = None
    bins: Optional[int] = None
    bins_by_type: str = ""
    utilization: Optional[float] = None
    time_to_best: Optional[float] = None
    elapsed: Optional[float] = None
    iterations: Optional[int] = None
    limit_trace: str = ""


class RunReport(BaseModel):
    rows: List[InstanceRow] = Field(default_factory=list)

    def frame(self):
        return pd.DataFrame([row.model_dump() for row in self.rows], columns=list(InstanceRow.model_fields))

    def aggregates(self):
        return aggregate(self.frame())

    def sweep(self):
        return sweep_summary(self.frame())

    def write(self, directory):
        ensure_dir(directory)
        paths = {
            "rows": os.path.join(directory, "rows.csv"),
            "aggregates": os.path.join(directory, "aggregates.csv"),
            "sweep": os.path.join(directory, "sweep.csv"),
            "report": os.path.join(directory, "report.json"),
        }
        self.frame().to_csv(paths["rows"], index=False)
        self.aggregates().to_csv(paths["aggregates"], index=False)
        self.sweep().to_csv(paths["sweep"], index=False)
        with open(paths["report"], "w", encoding="utf-8") as f:
            f.write(self.model_dump_json(indent=2))
        return paths


AGGREGATE_COLUMNS = ["class_name", "items", "threads", "time_limit", "seed", "metric", "value", "instances"]


def aggregate(frame):
    """Per-class table rows: sum of bins per (class, n) for identical bins, mean utilization otherwise"""
    solved = frame[frame["status"] == "ok"]
    if solved.empty:
        return pd.DataFrame(columns=AGGREGATE_COLUMNS)
    tables = []

    identical = solved[solved["bin_types"] == 1]
    if not identical.empty:
        grouped = identical.groupby(["class_name", "items", "threads", "time_limit", "seed"], as_index=False)
        bins = grouped.agg(value=("bins", "sum"), instances=("instance", "count"))
        bins["metric"] = SUM_OF_BINS
        tables.append(bins)

    variable = solved[solved["bin_types"] > 1]
    if not variable.empty:
        grouped = variable.groupby(["class_name", "threads", "time_limit", "seed"], as_index=False)
        gamma = grouped.agg(value=("utilization", "mean"), instances=("instance", "count"))
        gamma["items"] = None
        gamma["metric"] = MEAN_UTILIZATION
        tables.append(gamma)

    return pd.concat(tables, ignore_index=True)[AGGREGATE_COLUMNS]


def sweep_summary(frame):
    """Mean utilization per (threads, time limit): the scaling curves"""
    solved = frame[frame["status"] == "ok"]
    if solved.empty:
        return pd.DataFrame(columns=["threads", "time_limit", "mean_utilization", "total_bins", "instances"])
    return (solved.groupby(["threads", "time_limit"], as_index=False)
            .agg(mean_utilization=("utilization", "mean"), total_bins=("bins", "sum"),
                 instances=("instance", "count")))


def class_of(path, root):
    """Class name: first sub-directory under root, else the file-name prefix before '_'"""
    relative = os.path.relpath(path, root)
    parts = relative.split(os.sep)
    if len(parts) > 1:
        return parts[0]
    stem = os.path.splitext(parts[0])[0]
    return stem.split("_", 1)[0] if "_" in stem else "all"


def discover(directory):
    found = set()
    for pattern in INSTANCE_PATTERNS:
        found.update(glob.glob(os.path.join(directory, pattern)))
        found.update(glob.glob(os.path.join(directory, "*", pattern)))
    return sorted(found)


def _as_list(value):
    if value is None:
        return []
    if isinstance(value, (list, tuple)):
        return list(value)
    return [value]


class BenchRunner:
    def __init__(self, directory, variant=None, time_limits=(60.0,), thread_counts=(1,), seeds=(0,),
                 backend="thread", param_overrides=None):
        self.logger = logging.getLogger(__name__)
        self.directory = directory
        self.variant = variant
        self.time_limits = _as_list(time_limits)
        self.thread_counts = _as_list(thread_counts)
        self.seeds = _as_list(seeds)
        self.backend = backend
        self.param_overrides = dict(param_overrides or {})

    def _rotation(self):
        if self.variant is None:
            return None
        return self.variant == "r"

    def run(self):
        report = RunReport()
        paths = discover(self.directory)
        if not paths:
            self.logger.warning(f"No instance files found in {self.directory}")
        for path in paths:
            for time_limit in self.time_limits:
                for threads in self.thread_counts:
                    for seed in self.seeds:
                        report.rows.append(self._solve(path, float(time_limit), int(threads), int(seed)))
        return report

    def _solve(self, path, time_limit, threads, seed):
        name = os.path.splitext(os.path.basename(path))[0]
        row = dict(instance=name, class_name=class_of(path, self.directory), items=0, bin_types=0,
                   rotation_allowed=bool(self._rotation()), threads=threads, time_limit=time_limit, seed=seed)
        try:
            instance = load_instance(path, rotation_allowed=self._rotation())
            row.update(items=len(instance.copies), bin_types=len(instance.bins),
                       rotation_allowed=instance.rotation_allowed)
            params = SearchParams.for_instance(instance, time_limit=time_limit, seed=seed, **self.param_overrides)
            result = run_parallel(instance, params, workers=threads, backend=self.backend)
            best = result.best
            report = validate(instance, best)
            if not report.ok:
                raise PackingError(f"best solution failed validation: {report.violations[0]}")
            usage = best.bin_usage()
            row.update(
                total_bin_area=best.total_bin_area,
                bins=len(best.patterns),
                bins_by_type=";".join(f"{bin_id}:{usage[bin_id]}" for bin_id in sorted(usage)),
                utilization=utilization(best),
                time_to_best=result.time_to_best,
                elapsed=result.elapsed,
                iterations=sum(worker.iterations for worker in result.workers),
                limit_trace=" ".join(str(area) for area in result.limit_trace),
            )
            self.logger.info(f"{name}: {len(best.patterns)} bins, utilization {row['utilization']:.2f}% "
                             f"({threads} worker(s), {time_limit}s, seed {seed})")
        except Exception as e:
            self.logger.error(f"Benchmark run failed for {name}: {e}")
            row.update(status="failed", error=str(e))
        return InstanceRow(**row)


def bench(directory, variant=None, time_limit=60.0, threads=1, seeds=(0,), backend="thread", param_overrides=None):
    """Run every instance in directory for each (time limit, thread count, seed) combination"""
    runner = BenchRunner(directory, variant=variant, time_limits=time_limit, thread_counts=threads,
                         seeds=seeds, backend=backend, param_overrides=param_overrides)
    return runner.run()

"""Several independent searches sharing one monotonically decreasing bin-area limit.

Workers never exchange solutions. The only shared state is the goal limit
(conditional lower + read) and the store of the best feasible solution.
"""
import logging
import math
import multiprocessing
import queue
import random
import threading
import time
from dataclasses import dataclass, field
from typing import List, Optional

from errors import NoFeasibleSolutionError
from search import GdrrSearch, SearchEvent, WorkerStatus

logger = logging.getLogger(__name__)

SEED_MODULUS = 2 ** 64


def worker_seed(seed, worker):
    return (seed + worker) % SEED_MODULUS


class SharedGoal:
    """Bin-area limit shared by in-process workers; lowering is linearizable"""

    def __init__(self, limit=math.inf):
        self._lock = threading.Lock()
        self._limit = limit
        self.revision = 0
        self.history = []

    @property
    def limit(self):
        with self._lock:
            return self._limit

    def lower(self, area):
        """Lower the limit to area if strictly smaller; True when this call lowered it"""
        with self._lock:
            if area < self._limit:
                self._limit = area
                self.revision += 1
                self.history.append(area)
                return True
            return False


class ProcessSharedGoal:
    """Same contract as SharedGoal, backed by a synchronized double shared between processes"""

    def __init__(self, value):
        self._value = value
        self.history = []

    @property
    def limit(self):
        with self._value.get_lock():
            return self._value.value

    def lower(self, area):
        with self._value.get_lock():
            if area < self._value.value:
                self._value.value = area
                self.history.append(area)
                return True
            return False


class BestStore:
    """Guarded store keeping the feasible solution with the smallest total bin area"""

    def __init__(self):
        self._lock = threading.Lock()
        self._started = time.monotonic()
        self.best = None
        self.best_worker = None
        self.time_to_best = None
        self.publications = []
        self.improvements = []

    def offer(self, solution, worker):
        area = solution.total_bin_area
        with self._lock:
            self.publications.append((worker, area))
            if self.best is None or area < self.best.total_bin_area:
                self.best = solution
                self.best_worker = worker
                self.time_to_best = time.monotonic() - self._started
                self.improvements.append(area)
                return True
            return False


@dataclass
class WorkerReport:
    worker: int
    seed: int
    status: WorkerStatus
    iterations: int = 0
    accepted: int = 0
    best_area: Optional[int] = None
    time_to_best: Optional[float] = None
    limit_trace: List[int] = field(default_factory=list)
    events: list = field(default_factory=list)
    error: Optional[str] = None


@dataclass
class ParallelResult:
    best: object
    best_worker: int
    limit_trace: List[int]
    publications: list
    workers: List[WorkerReport]
    elapsed: float
    time_to_best: Optional[float]


def _report(search, seed):
    return WorkerReport(
        worker=search.worker,
        seed=seed,
        status=search.status,
        iterations=search.iterations,
        accepted=search.accepted,
        best_area=search.best.total_bin_area if search.best is not None else None,
        time_to_best=search.time_to_best,
        limit_trace=list(search.limit_trace),
        events=list(search.events),
    )


class ParallelRunner:
    """Runs one GdrrSearch per worker in daemon threads"""

    def __init__(self, instance, params, workers=1):
        self.logger = logging.getLogger(__name__)
        self.instance = instance
        self.params = params
        self.workers = workers
        self.goal = SharedGoal()
        self.store = BestStore()
        self.searches = []
        self.errors = {}

    def _work(self, search):
        try:
            search.run(deadline=self._deadline)
        except Exception as e:
            self.errors[search.worker] = f"{type(e).__name__}: {e}"

    def run(self):
        started = time.monotonic()
        self._deadline = started + self.params.time_limit
        threads = []
        for worker in range(self.workers):
            seed = worker_seed(self.params.seed, worker)
            search = GdrrSearch(self.instance, self.params, rng=random.Random(seed), goal=self.goal,
                                on_feasible=self.store.offer, worker=worker)
            self.searches.append((search, seed))
            thread = threading.Thread(target=self._work, args=(search,), daemon=True)
            threads.append(thread)

        for thread in threads:
            thread.start()
        self.logger.info(f"Started {self.workers} worker thread(s) for {self.instance.name}")
        for thread in threads:
            thread.join()

        reports = []
        for search, seed in self.searches:
            report = _report(search, seed)
            report.error = self.errors.get(search.worker)
            reports.append(report)
        return self.store, list(self.goal.history), reports, time.monotonic() - started


def _process_worker(instance, params, worker, seed, shared_limit, channel):
    goal = ProcessSharedGoal(shared_limit)

    def publish(solution, source):
        channel.put(("feasible", source, solution))

    search = GdrrSearch(instance, params, rng=random.Random(seed), goal=goal, on_feasible=publish, worker=worker)
    try:
        search.run()
        report = _report(search, seed)
    except Exception as e:
        report = _report(search, seed)
        report.error = f"{type(e).__name__}: {e}"
    report.events = [event.model_dump(mode="json") for event in report.events]
    channel.put(("done", worker, report))


def _run_processes(instance, params, workers):
    context = multiprocessing.get_context()
    shared_limit = context.Value("d", math.inf)
    channel = context.Queue()
    store = BestStore()
    started = time.monotonic()

    processes = [
        context.Process(target=_process_worker,
                        args=(instance, params, worker, worker_seed(params.seed, worker), shared_limit, channel),
                        daemon=True)
        for worker in range(workers)
    ]
    for process in processes:
        process.start()
    logger.info(f"Started {workers} worker process(es) for {instance.name}")

    reports = {}
    # drain while workers run so large solutions never block a child on a full pipe
    while len(reports) < workers:
        try:
            kind, worker, payload = channel.get(timeout=0.5)
        except queue.Empty:
            if not any(process.is_alive() for process in processes) and channel.empty():
                break
            continue
        if kind == "feasible":
            store.offer(payload, worker)
        else:
            payload.events = [SearchEvent.model_validate(event) for event in payload.events]
            reports[worker] = payload

    for process in processes:
        process.join(timeout=5)
    for worker in range(workers):
        if worker not in reports:
            reports[worker] = WorkerReport(worker=worker, seed=worker_seed(params.seed, worker),
                                           status=WorkerStatus.FAILED, error="worker exited without a report")
    ordered = [reports[worker] for worker in range(workers)]
    return store, list(store.improvements), ordered, time.monotonic() - started


def run_parallel(instance, params, workers=1, backend="thread"):
    """Run `workers` searches seeded seed+index against one shared goal; returns the global best"""
    if workers < 1:
        raise ValueError("workers must be at least 1")

    if backend == "process":
        store, trace, reports, elapsed = _run_processes(instance, params, workers)
    elif backend == "thread":
        store, trace, reports, elapsed = ParallelRunner(instance, params, workers).run()
    else:
        raise ValueError(f"Unknown backend {backend!r}")

    for report in reports:
        if report.error:
            logger.error(f"Worker {report.worker} failed: {report.error}")

    if store.best is None:
        usable = [spec for spec in instance.bins if spec.quantity is None or spec.quantity > 0]
        failures = [report.error for report in reports if report.error]
        if failures:
            cause = f"worker failed ({failures[0]})"
        elif not usable:
            cause = "no bin types available"
        else:
            cause = "bin quantities or time limit too small"
        raise NoFeasibleSolutionError(
            f"No feasible solution for {instance.name} within {params.time_limit}s "
            f"using {workers} worker(s): {cause}")

    return ParallelResult(
        best=store.best,
        best_worker=store.best_worker,
        limit_trace=trace,
        publications=list(store.publications),
        workers=reports,
        elapsed=elapsed,
        time_to_best=store.time_to_best,
    )

"""Solution comparison, late-acceptance hill climbing and the goal-driven search loop."""
import enum
import logging
import math
import random
import time
from typing import List, NamedTuple, Optional

from pydantic import BaseModel, Field

from config import emit_progress
from models import Solution, excluded_area, leftover_value
from recreate import RecreateParams, recreate
from ruin import ruin

logger = logging.getLogger(__name__)

# (max item copies, history length, average removed nodes)
PARAMETER_TIERS = ((100, 2000, 8), (300, 1000, 6), (500, 500, 4))
REFERENCE_TIME_LIMIT = 600.0
MIN_SCALED_HISTORY = 50


def tiered_defaults(copy_count):
    """History length and mu for an instance with copy_count item copies"""
    for limit, history_length, mu in PARAMETER_TIERS:
        if copy_count <= limit:
            return history_length, mu
    # larger instances keep the last tier
    return PARAMETER_TIERS[-1][1], PARAMETER_TIERS[-1][2]


def scaled_history(history_length, time_limit):
    if time_limit == REFERENCE_TIME_LIMIT:
        return history_length
    return max(MIN_SCALED_HISTORY, math.ceil(history_length * time_limit / REFERENCE_TIME_LIMIT))


class SearchParams(BaseModel):
    alpha: float = Field(default=1.2, gt=0)
    beta: float = Field(default=0.05, ge=0, lt=1)
    mu: int = Field(default=8, ge=0)
    history_length: int = Field(default=2000, ge=1)
    time_limit: float = Field(default=60.0, gt=0)
    seed: int = Field(default=0, ge=0, lt=2 ** 64)
    open_without_fit_check: bool = False
    # optional iteration budget, checked alongside the time limit
    max_iterations: Optional[int] = Field(default=None, ge=0)

    @classmethod
    def for_instance(cls, instance, time_limit=60.0, history_length=None, mu=None,
                     scale_history=True, **overrides):
        """Parameters tiered by item-copy count; explicit values win over the tiers"""
        tier_history, tier_mu = tiered_defaults(len(instance.copies))
        if history_length is None:
            history_length = scaled_history(tier_history, time_limit) if scale_history else tier_history
        return cls(
            time_limit=time_limit,
            history_length=history_length,
            mu=tier_mu if mu is None else mu,
            **overrides,
        )

    def recreate_params(self):
        return RecreateParams(alpha=self.alpha, beta=self.beta, open_without_fit_check=self.open_without_fit_check)


class Quality(NamedTuple):
    excluded_area: int
    leftover_value: float


def quality(solution, alpha):
    return Quality(excluded_area(solution), leftover_value(solution, alpha))


def compare(first, second):
    """-1 when first is superior, 1 when second is, 0 when equal.

    Less excluded area wins; leftover value breaks ties (more is better).
    Total bin area plays no part.
    """
    if first.excluded_area < second.excluded_area:
        return -1
    if first.excluded_area > second.excluded_area:
        return 1
    if first.leftover_value > second.leftover_value:
        return -1
    if first.leftover_value < second.leftover_value:
        return 1
    return 0


class FitnessRing:
    """Late-acceptance history: slot i mod length is compared against the candidate"""

    def __init__(self, length, initial):
        self.slots = [initial] * length
        self.counter = 0

    @property
    def head(self):
        return self.counter % len(self.slots)

    def reset(self, initial):
        self.slots = [initial] * len(self.slots)
        self.counter = 0


def lahc_step(candidate, ring, local_opt):
    """Returns (accepted, ring, new local optimum quality); the ring is updated in place.

    The acceptance counter only advances on acceptance, and a slot is only
    overwritten by a strictly better candidate.
    """
    slot = ring.slots[ring.head]
    versus_slot = compare(candidate, slot)
    if versus_slot <= 0 or compare(candidate, local_opt) <= 0:
        if versus_slot < 0:
            ring.slots[ring.head] = candidate
        ring.counter += 1
        return True, ring, candidate
    return False, ring, local_opt


class EventKind(enum.Enum):
    GOAL_LOWERED = "goal_lowered"
    BEST_UPDATED = "best_updated"
    LIMIT_ADOPTED = "limit_adopted"
    FINISHED = "finished"


class WorkerStatus(enum.Enum):
    PENDING = "pending"
    RUNNING = "running"
    COMPLETED = "completed"
    FAILED = "failed"


class SearchEvent(BaseModel):
    kind: EventKind
    worker: int
    iteration: int
    elapsed: float
    limit: Optional[float] = None
    bin_area: Optional[int] = None
    accepted: Optional[int] = None


class LocalGoal:
    """Bin-area limit owned by a single search"""

    def __init__(self, limit=math.inf):
        self.limit = limit
        self.history = []

    def lower(self, area):
        if area < self.limit:
            self.limit = area
            self.history.append(area)
            return True
        return False


class GdrrSearch:
    """Ruin, recreate and late acceptance under a bin-area limit lowered at every feasible solution"""

    def __init__(self, instance, params, rng=None, goal=None, on_feasible=None, worker=0):
        self.logger = logging.getLogger(__name__)
        self.instance = instance
        self.params = params
        self.rng = rng if rng is not None else random.Random(params.seed)
        self.goal = goal if goal is not None else LocalGoal()
        self.on_feasible = on_feasible
        self.worker = worker
        self.recreate_params = params.recreate_params()

        self.status = WorkerStatus.PENDING
        self.iterations = 0
        self.accepted = 0
        self.events: List[SearchEvent] = []
        self.limit_trace: List[int] = []
        # (iteration, accepted) for every candidate, used by tests and diagnostics
        self.acceptance_trace: Optional[list] = None
        self.best: Optional[Solution] = None
        self.time_to_best: Optional[float] = None
        self._started = None

    def _elapsed(self):
        return time.monotonic() - self._started

    def _record(self, kind, limit=None, bin_area=None):
        event = SearchEvent(kind=kind, worker=self.worker, iteration=self.iterations, elapsed=self._elapsed(),
                            limit=limit, bin_area=bin_area, accepted=self.accepted)
        self.events.append(event)
        emit_progress(event.model_dump(mode="json"))

    def _stop(self, deadline):
        if self.params.max_iterations is not None and self.iterations >= self.params.max_iterations:
            return True
        return time.monotonic() >= deadline

    def run(self, start=None, a_lim=math.inf, best=None, deadline=None):
        """Search until the deadline; returns the best feasible solution (or best as given)"""
        self._started = time.monotonic()
        if deadline is None:
            deadline = self._started + self.params.time_limit
        self.status = WorkerStatus.RUNNING
        self.best = best
        alpha = self.params.alpha

        local = start if start is not None else Solution.empty(self.instance)
        local_quality = quality(local, alpha)
        ring = FitnessRing(self.params.history_length, local_quality)

        try:
            while not self._stop(deadline):
                shared_limit = self.goal.limit
                if shared_limit < a_lim:
                    a_lim = shared_limit
                    local = ruin(local, a_lim, 0, self.rng)
                    local_quality = quality(local, alpha)
                    ring.reset(local_quality)
                    self._record(EventKind.LIMIT_ADOPTED, limit=a_lim)

                candidate = ruin(local, a_lim, self.params.mu, self.rng)
                candidate = recreate(candidate, a_lim, self.recreate_params, self.rng)
                candidate_quality = quality(candidate, alpha)
                self.iterations += 1

                accepted, ring, local_quality = lahc_step(candidate_quality, ring, local_quality)
                if self.acceptance_trace is not None:
                    self.acceptance_trace.append((self.iterations, accepted))
                if accepted:
                    local = candidate
                    self.accepted += 1

                if local.is_feasible and local.patterns:
                    local, a_lim = self._reach_goal(local)
                    local_quality = quality(local, alpha)
                    ring.reset(local_quality)

                if self.iterations % 5000 == 0:
                    self.logger.debug(f"Worker {self.worker}: {self.iterations} iterations, "
                                      f"{self.accepted} accepted, limit {a_lim}")
        except Exception as e:
            self.status = WorkerStatus.FAILED
            self.logger.error(f"Worker {self.worker} failed after {self.iterations} iterations: {e}")
            raise

        self.status = WorkerStatus.COMPLETED
        self._record(EventKind.FINISHED, limit=a_lim,
                     bin_area=self.best.total_bin_area if self.best is not None else None)
        return self.best

    def _reach_goal(self, feasible):
        """Store a feasible local optimum and derive the start for the next, lower goal"""
        area = feasible.total_bin_area
        if self.best is None or area < self.best.total_bin_area:
            self.best = feasible
            self.time_to_best = self._elapsed()
            self._record(EventKind.BEST_UPDATED, bin_area=area)
        if self.on_feasible is not None:
            self.on_feasible(feasible, self.worker)

        if self.goal.lower(area):
            self._record(EventKind.GOAL_LOWERED, limit=area)
            self.logger.info(f"Worker {self.worker}: goal lowered to bin area {area} "
                             f"({len(feasible.patterns)} bins) after {self.iterations} iterations")
        self.limit_trace.append(area)
        a_lim = min(area, self.goal.limit)
        return ruin(feasible, a_lim, 0, self.rng), a_lim


def gdrr(start, a_lim, params, best=None, rng=None, deadline=None, instance=None):
    """Single-worker goal-driven ruin and recreate; returns the best feasible solution found"""
    instance = instance if instance is not None else start.instance
    search = GdrrSearch(instance, params, rng=rng)
    return search.run(start=start, a_lim=a_lim, best=best, deadline=deadline)

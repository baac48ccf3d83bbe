"""Greedy-with-blinks reconstruction of a ruined solution.

Draw order per inserted item: a choice among equally restricted copies (only
when there is a tie), a randrange over eligible bin types (only when a new bin
is opened), then one random() per option scanned while blinking (skipped when
beta is 0).
"""
from collections import Counter

from pydantic import BaseModel, Field

from models import CuttingPattern, NodeKind
from treeops import count_options, enumerate_options, insert


class RecreateParams(BaseModel):
    alpha: float = Field(default=1.2, gt=0.0)
    beta: float = Field(default=0.05, ge=0.0, lt=1.0)
    # open any bin with area below the remaining budget, even one the item cannot fit
    open_without_fit_check: bool = False


def leftover_counts(solution):
    counts = Counter()
    for pattern in solution.patterns:
        for node in pattern.root.walk():
            if node.kind is NodeKind.LEFTOVER:
                counts[(node.width, node.height)] += 1
    return counts


def option_counts(candidates, solution):
    """Insertion option count per candidate copy id, over the existing patterns"""
    instance = solution.instance
    leftovers = leftover_counts(solution)
    by_size = {}
    counts = {}
    for copy_id in candidates:
        copy = instance.copy_by_id(copy_id)
        key = (copy.width, copy.height)
        if key not in by_size:
            by_size[key] = count_options(copy.width, copy.height, instance.rotation_allowed, leftovers)
        counts[copy_id] = by_size[key]
    return counts


def most_restricted(candidates, solution, rng):
    """Candidate copy id with the fewest insertion options; ties broken uniformly at random"""
    counts = option_counts(candidates, solution)
    fewest = min(counts.values())
    tied = [copy_id for copy_id in candidates if counts[copy_id] == fewest]
    if len(tied) == 1:
        return tied[0]
    return tied[rng.randrange(len(tied))]


def select_with_blinks(options, beta, rng):
    """Cheapest option that was not blinked; the cheapest overall if every option blinked.

    Single scan, no sorting. Equal costs resolve to the first one scanned.
    """
    best = None
    chosen = None
    for option in options:
        if best is None or option.cost < best.cost:
            best = option
        if beta > 0.0 and rng.random() < beta:
            continue
        if chosen is None or option.cost < chosen.cost:
            chosen = option
    return chosen if chosen is not None else best


def eligible_bins(solution, copy, budget, skip_fit_check=False):
    """Bin types that may be opened for copy without reaching the area limit"""
    usage = solution.bin_usage()
    rotation_allowed = solution.instance.rotation_allowed
    eligible = []
    for spec in solution.instance.bins:
        if spec.area >= budget:
            continue
        if spec.quantity is not None and usage.get(spec.id, 0) >= spec.quantity:
            continue
        if not skip_fit_check and not any(spec.can_hold(w, h) for w, h, _ in copy.orientations(rotation_allowed)):
            continue
        eligible.append(spec)
    return eligible


def recreate(solution, a_lim, params, rng):
    """Give every excluded copy one insertion attempt (modifies solution in place)"""
    instance = solution.instance
    pending = list(solution.excluded)
    total_area = solution.total_bin_area

    while pending:
        copy_id = most_restricted(pending, solution, rng)
        copy = instance.copy_by_id(copy_id)
        options = enumerate_options(copy, instance.rotation_allowed, solution, params.alpha)

        if not options:
            budget = a_lim - total_area
            candidates = eligible_bins(solution, copy, budget, params.open_without_fit_check)
            if candidates:
                spec = candidates[rng.randrange(len(candidates))]
                pattern = CuttingPattern.empty(spec)
                solution.patterns.append(pattern)
                total_area += spec.area
                options = enumerate_options(copy, instance.rotation_allowed, solution, params.alpha,
                                            patterns=[pattern])

        if options:
            option = select_with_blinks(options, params.beta, rng)
            insert(solution, option, copy)
        pending.remove(copy_id)

    # bins opened without receiving an item are dropped again
    solution.patterns = [pattern for pattern in solution.patterns if not pattern.is_empty]
    return solution

from typing import NamedTuple

from treeops import remove_node


class Removal(NamedTuple):
    pattern_index: int
    node_id: int
    released: int
    pattern_removed: bool


def removal_count(mu, rng):
    """Number of removals for one ruin: uniform over 1..2mu-1, or 0 when mu is 0"""
    if mu <= 0:
        return 0
    return rng.randint(1, 2 * mu - 1)


def ruin(solution, a_lim, mu, rng, trace=None):
    """Partially destroy a copy of solution.

    Draw order per call: one randint for the removal count, then per removal a
    randrange over the patterns followed by a randrange over the chosen pattern's
    item and structure nodes (pre-order, root first). Removal continues while
    removals remain or the total bin area is not below a_lim, and stops once no
    pattern is left.
    """
    ruined = solution.copy()
    patterns = ruined.patterns
    remaining = removal_count(mu, rng)
    total_area = ruined.total_bin_area

    while (remaining > 0 or total_area >= a_lim) and patterns:
        index = rng.randrange(len(patterns))
        pattern = patterns[index]
        candidates = pattern.removable_nodes()
        node = candidates[rng.randrange(len(candidates))]
        node_id = node.id

        kept, released = remove_node(pattern, node)
        if kept is None:
            del patterns[index]
            total_area -= pattern.bin.area
        ruined.excluded.extend(released)
        remaining -= 1

        if trace is not None:
            trace.append(Removal(index, node_id, len(released), kept is None))

    return ruined

"""
IO Calculation Module
In/out balance of a label inside a disk and the interior white count it forces.
"""

import itertools
import logging
from typing import List, Optional, Sequence, Tuple

from chart.model import INWARD, OUTWARD
from regions.disks import CornerDart

logger = logging.getLogger(__name__)

# (direction at the boundary white, may be a terminal edge)
BoundaryArc = Tuple[str, bool]


def io_balance(n_in: int, n_out: int, whites: int, terminals: int) -> bool:
    """
    Whether the boundary arcs can be balanced inside the disk.

    Every interior white and every interior terminal black adds one net
    inward or outward end, so the boundary excess has to be reachable as a
    sum of `whites + terminals` signs.

    Args:
        n_in: Boundary arcs oriented inward at their white vertex
        n_out: Boundary arcs oriented outward at their white vertex
        whites: Interior white vertices of the label
        terminals: Interior terminal black vertices of the label

    Returns:
        True if some sign assignment balances the arcs
    """
    if min(n_in, n_out, whites, terminals) < 0:
        raise ValueError("arc and vertex counts must be non-negative")
    excess = n_out - n_in
    units = whites + terminals
    return abs(excess) <= units and (excess - units) % 2 == 0


def io_balance_bruteforce(n_in: int, n_out: int, whites: int, terminals: int) -> bool:
    """The same question answered by trying every sign assignment."""
    units = whites + terminals
    for signs in itertools.product((1, -1), repeat=units):
        if n_out - n_in + sum(signs) == 0:
            return True
    return False


def min_interior_whites(spec: Sequence[BoundaryArc], limit: Optional[int] = None) -> int:
    """
    Least number of interior whites making the disk balanced.

    An arc that may be terminal is either a terminal edge, which ends inside
    the disk at its own black vertex and so balances itself, or an internal
    edge counted with its direction. An interior white carries at most one
    terminal edge of the label, its middle one.

    Args:
        spec: Boundary arcs as (direction, may_be_terminal)
        limit: Search bound, twice the arc count by default

    Returns:
        Smallest feasible interior white count
    """
    limit = limit if limit is not None else 2 * len(spec) + 1
    optional = [i for i, (_, terminal) in enumerate(spec) if terminal]
    for whites in range(limit + 1):
        for size in range(len(optional) + 1):
            for dropped in itertools.combinations(optional, size):
                kept = [d for i, (d, _) in enumerate(spec) if i not in dropped]
                n_in = sum(1 for d in kept if d == INWARD)
                n_out = sum(1 for d in kept if d == OUTWARD)
                if any(io_balance(n_in, n_out, whites, t) for t in range(whites + 1)):
                    return whites
    logger.debug("no balance found within %d interior whites", limit)
    return limit + 1


def corner_spec(corners: Sequence[CornerDart]) -> List[BoundaryArc]:
    """Boundary arcs from the corner darts of a disk; middle darts may be terminal."""
    return [(c.direction, c.middle) for c in corners]

"""
Lenses Module
Detection of disks bounded by one internal edge of label m and one of label m+1.
"""

import logging
from dataclasses import dataclass
from typing import List, Tuple

from chart.analysis import region_classes
from chart.model import Chart, natural_key
from features.strands import INTERNAL, Strand, middle_darts, strands
from regions.disks import DiskRegion, disk_id

logger = logging.getLogger(__name__)

NO_MIDDLE = 'no_middle'
DOUBLE_MIDDLE = 'double_middle'


@dataclass(frozen=True)
class Lens:
    disk: DiskRegion
    e1: Strand
    e2: Strand
    w1: str
    w2: str
    kind: str
    side: str


def _ccw_between(chart: Chart, start: str, stop: str) -> List[str]:
    """Real darts strictly between `start` and `stop` going counterclockwise."""
    result = []
    d = chart.sigma(start)
    while d != stop:
        if not chart.is_tether(d):
            result.append(d)
        d = chart.sigma(d)
    return result


def _lens_kind(chart: Chart, w1: str, w2: str, darts: Tuple[str, str, str, str]) -> str:
    d1, d2, d1b, d2b = darts
    mid1, mid2 = set(middle_darts(chart, w1)), set(middle_darts(chart, w2))
    if not ({d1, d2} & mid1) and not ({d1b, d2b} & mid2):
        return NO_MIDDLE
    if (d1 in mid1 and d1b in mid2) or (d2 in mid1 and d2b in mid2):
        return DOUBLE_MIDDLE
    return ''


def find_lenses(chart: Chart, m: int) -> List[Lens]:
    """
    All lenses for labels (m, m+1), each complementary side of e1 and e2
    checked on its own.
    """
    if m + 1 > chart.degree_n - 1:
        return []
    lower = [s for s in strands(chart, m) if s.strand_class == INTERNAL]
    upper = [s for s in strands(chart, m + 1) if s.strand_class == INTERNAL]
    found = []
    for e1 in lower:
        for e2 in upper:
            if set(e1.endpoints) != set(e2.endpoints):
                continue
            w1, w2 = e1.endpoints
            d1, d1b = e1.end_darts
            d2 = e2.dart_at(w1)[0]
            d2b = e2.dart_at(w2)[0]
            kind = _lens_kind(chart, w1, w2, (d1, d2, d1b, d2b))
            if not kind:
                continue
            boundary_edges = set(e1.edges) | set(e2.edges)
            classes = None
            # left of the curve w1 -e1-> w2 -e2-> w1, then the right side
            sides = (('left', _ccw_between(chart, d1, d2) + _ccw_between(chart, d2b, d1b), chart.sigma(d1)),
                     ('right', _ccw_between(chart, d2, d1) + _ccw_between(chart, d1b, d2b), d1))
            for side, blocking, face_dart in sides:
                if blocking:
                    continue
                classes = classes or region_classes(chart, boundary_edges)
                rep = classes[chart.face_of(face_dart).key]
                faces = tuple(sorted((k for k, r in classes.items() if r == rep), key=natural_key))
                walk = (d1, d2b)
                disk = DiskRegion(disk_id(m, walk + (side,)), m, faces, walk,
                                  ((e1.id, w1), (e2.id, w2)), (w1, w2), 2, core_walk=walk)
                found.append(Lens(disk, e1, e2, w1, w2, kind, side))
                logger.debug("lens %s/%s on the %s side (%s)", e1.id, e2.id, side, kind)
    return found

"""
Strands Module
Decomposes each label subgraph into strands and classifies chart vocabulary.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from chart.analysis import check_label
from chart.model import BLACK, CROSSING, OUTWARD, PHANTOM, WHITE, Chart, natural_key
from common.errors import NotIncident

logger = logging.getLogger(__name__)

FREE = 'free'
TERMINAL = 'terminal'
INTERNAL = 'internal'
HOOP = 'hoop'
RING = 'ring'
LOOP = 'loop'
STRAND_CLASSES = (FREE, TERMINAL, INTERNAL, HOOP, RING, LOOP)


@dataclass(frozen=True)
class Strand:
    """
    A maximal walk of one label that goes straight through crossings.

    `darts` lists every dart visited in walking order; `end_darts` are the darts
    at the two endpoints (empty for closed strands). The strand is oriented from
    endpoints[0] to endpoints[1] because edge orientations are coherent along it.
    """
    id: str
    label: int
    darts: Tuple[str, ...]
    edges: Tuple[str, ...]
    endpoints: Tuple[str, ...]
    end_darts: Tuple[str, ...]
    crossings: Tuple[str, ...]
    closed: bool
    strand_class: str
    simple: bool = True

    def dart_at(self, vertex_id: str) -> Tuple[str, ...]:
        """Endpoint darts of this strand at a vertex (two for a loop)."""
        return tuple(d for v, d in zip(self.endpoints, self.end_darts) if v == vertex_id)

    def other_end(self, dart: str) -> Tuple[str, str]:
        """(vertex, dart) at the far end when leaving through `dart`."""
        i = self.end_darts.index(dart)
        return self.endpoints[1 - i], self.end_darts[1 - i]


@dataclass(frozen=True)
class StrandComponent:
    label: int
    whites: Tuple[str, ...]
    blacks: Tuple[str, ...]
    strands: Tuple[str, ...]


def _walk(chart: Chart, start: str) -> Tuple[List[str], str]:
    """Follow a strand from an endpoint dart; returns darts and the final dart."""
    darts = [start]
    d = start
    while True:
        t = chart.twin(d)
        darts.append(t)
        vertex = chart.vertex_of(t)
        if vertex.kind == CROSSING:
            d = chart.opposite(t)
        elif vertex.kind == PHANTOM:
            d = next(x for x in chart.real_rotation(vertex.id) if x != t)
        else:
            return darts, t
        if d == start:
            return darts, d
        darts.append(d)


def _make_strand(chart: Chart, m: int, darts: List[str], closed: bool) -> Strand:
    edges = []
    for d in darts:
        e = chart.darts[d].edge
        if not edges or edges[-1] != e:
            edges.append(e)
    if closed and len(edges) > 1 and edges[0] == edges[-1]:
        edges.pop()
    crossings = [chart.darts[d].vertex for d in darts[1::2]
                 if chart.vertex_of(d).kind == CROSSING]
    if closed:
        endpoints, end_darts = (), ()
        kind = RING if crossings else HOOP
    else:
        endpoints = (chart.darts[darts[0]].vertex, chart.darts[darts[-1]].vertex)
        end_darts = (darts[0], darts[-1])
        kinds = [chart.vertices[v].kind for v in endpoints]
        if kinds.count(BLACK) == 2:
            kind = FREE
        elif BLACK in kinds:
            kind = TERMINAL
        elif endpoints[0] == endpoints[1]:
            kind = LOOP
        else:
            kind = INTERNAL
    simple = len(set(crossings)) == len(crossings)
    if kind == LOOP and not simple:
        kind = INTERNAL
    # orient the strand along its edges
    if not closed and chart.direction(darts[0]) != OUTWARD:
        darts = list(reversed(darts))
        edges = list(reversed(edges))
        crossings = list(reversed(crossings))
        endpoints = tuple(reversed(endpoints))
        end_darts = tuple(reversed(end_darts))
    sid = f"s{m}:{min(darts, key=natural_key)}"
    return Strand(sid, m, tuple(darts), tuple(edges), endpoints, end_darts,
                  tuple(crossings), closed, kind, simple)


def strands(chart: Chart, m: int) -> List[Strand]:
    """
    All strands of label m.

    Raises:
        LabelOutOfRange: if m is not in 1..n-1
    """
    check_label(chart, m)
    label_darts = [d for d, dart in chart.darts.items()
                   if not chart.is_tether(d) and chart.label(d) == m]
    seen = set()
    result = []
    for d in sorted(label_darts, key=natural_key):
        if d in seen or chart.vertex_of(d).kind not in (WHITE, BLACK):
            continue
        darts, _ = _walk(chart, d)
        seen.update(darts)
        result.append(_make_strand(chart, m, darts, closed=False))
    for d in sorted(label_darts, key=natural_key):
        if d in seen or chart.direction(d) != OUTWARD:
            continue
        darts, _ = _walk(chart, d)
        seen.update(darts)
        result.append(_make_strand(chart, m, darts, closed=True))
    logger.debug("label %d: %d strands", m, len(result))
    return result


def all_strands(chart: Chart) -> List[Strand]:
    result = []
    for m in chart.labels():
        if 1 <= m <= chart.degree_n - 1:
            result.extend(strands(chart, m))
    return result


def strand_index(strand_list: List[Strand]) -> Dict[str, Strand]:
    """Map every dart to the strand containing it."""
    return {d: s for s in strand_list for d in s.darts}


def middle_darts(chart: Chart, white: str) -> List[str]:
    """Darts at the center of a run of three equal directions."""
    rot = chart.real_rotation(white)
    dirs = [chart.direction(d) for d in rot]
    n = len(rot)
    return [rot[i] for i in range(n)
            if dirs[i - 1] == dirs[i] == dirs[(i + 1) % n]]


def is_middle(chart: Chart, strand: Strand, white: str) -> bool:
    """
    Whether the strand's dart at a white vertex is a middle arc.

    Raises:
        NotIncident: if the white vertex is not an endpoint of the strand
    """
    darts = strand.dart_at(white)
    if not darts:
        raise NotIncident(f"strand {strand.id} does not end at '{white}'")
    middles = set(middle_darts(chart, white))
    return any(d in middles for d in darts)


def label_darts_at(chart: Chart, white: str, m: int) -> List[str]:
    """The label-m darts of a white vertex, counterclockwise."""
    return [d for d in chart.real_rotation(white) if chart.label(d) == m]


def flank_edges(chart: Chart, white: str, strand: Strand,
                strand_list: Optional[List[Strand]] = None) -> Tuple[Strand, Strand]:
    """
    The same-label strands (a, b) with a, strand, b counterclockwise at `white`.

    Raises:
        NotIncident: if the strand does not end at `white`
    """
    darts = strand.dart_at(white)
    if not darts:
        raise NotIncident(f"strand {strand.id} does not end at '{white}'")
    index = strand_index(strand_list or strands(chart, strand.label))
    ring = label_darts_at(chart, white, strand.label)
    i = ring.index(darts[0])
    before = ring[(i - 1) % len(ring)]
    after = ring[(i + 1) % len(ring)]
    return index[before], index[after]


def bw_vertices(chart: Chart, m: int) -> List[str]:
    """White vertices of Gamma_m with a terminal label-m strand."""
    result = set()
    for s in strands(chart, m):
        if s.strand_class == TERMINAL:
            result.update(v for v in s.endpoints if chart.vertices[v].kind == WHITE)
    return sorted(result, key=natural_key)


def strand_components(chart: Chart, m: int,
                      strand_list: Optional[List[Strand]] = None) -> List[StrandComponent]:
    """Connected components of Gamma_m, closed strands being their own components."""
    strand_list = strand_list if strand_list is not None else strands(chart, m)
    parent: Dict[str, str] = {}

    def find(x: str) -> str:
        parent.setdefault(x, x)
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for s in strand_list:
        find(s.id)
        for v in s.endpoints:
            a, b = find(s.id), find(f"v:{v}")
            if a != b:
                parent[a] = b
    groups: Dict[str, List[Strand]] = {}
    for s in strand_list:
        groups.setdefault(find(s.id), []).append(s)
    comps = []
    for members in groups.values():
        ends = {v for s in members for v in s.endpoints}
        comps.append(StrandComponent(
            m,
            tuple(sorted((v for v in ends if chart.vertices[v].kind == WHITE), key=natural_key)),
            tuple(sorted((v for v in ends if chart.vertices[v].kind == BLACK), key=natural_key)),
            tuple(sorted((s.id for s in members), key=natural_key))))
    return sorted(comps, key=lambda c: natural_key(c.strands[0]))


def component_white_counts(chart: Chart, m: int) -> List[Tuple[StrandComponent, int]]:
    """Components of Gamma_m with their white-vertex counts."""
    return [(c, len(c.whites)) for c in strand_components(chart, m)]

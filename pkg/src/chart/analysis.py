"""
Chart Analysis Module
Faces, complexity, label views, chart type and global symmetries.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Tuple

from chart.model import (BLACK, CROSSING, INWARD, OUTWARD, WHITE, Chart, Edge, Face,
                         Vertex, natural_key)
from common.errors import DanglingReference, InvalidChart, LabelOutOfRange

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SubgraphView:
    """Gamma_m: edges of one label with their white/black ends and crossings."""
    label: int
    edges: Tuple[str, ...]
    vertices: Tuple[str, ...]
    crossings: Tuple[str, ...]

    @property
    def is_empty(self) -> bool:
        return not self.edges


def faces(chart: Chart) -> List[Face]:
    """
    Complementary regions of the chart as dart orbits.

    Raises:
        InvalidChart: when the tether tree does not join the components
    """
    components = len(chart.components)
    if components and len(chart.tethers()) != components - 1:
        raise InvalidChart(f"{components} components joined by {len(chart.tethers())} tethers")
    return list(chart.face_list)


def complexity(chart: Chart) -> Tuple[int, int]:
    """Return (w, -f): white vertices and minus the number of free edges."""
    from features.strands import FREE, all_strands

    whites = len(chart.vertices_of_kind(WHITE))
    free = sum(1 for s in all_strands(chart) if s.strand_class == FREE)
    return whites, -free


def check_label(chart: Chart, m: int) -> None:
    if m < 1 or m > chart.degree_n - 1:
        raise LabelOutOfRange(f"label {m} outside 1..{chart.degree_n - 1}")


def gamma(chart: Chart, m: int) -> SubgraphView:
    """
    The subgraph of label-m edges.

    Raises:
        LabelOutOfRange: if m is not in 1..n-1
    """
    check_label(chart, m)
    edges = [e for e in chart.real_edges() if e.label == m]
    ends, crossings = set(), set()
    for edge in edges:
        for dart in (edge.tail, edge.head):
            vertex = chart.vertex_of(dart)
            if vertex.kind == CROSSING:
                crossings.add(vertex.id)
            elif vertex.kind in (WHITE, BLACK):
                ends.add(vertex.id)
    return SubgraphView(m,
                        tuple(e.id for e in edges),
                        tuple(sorted(ends, key=natural_key)),
                        tuple(sorted(crossings, key=natural_key)))


def white_labels(chart: Chart, white: str) -> Tuple[int, int]:
    """The two labels (i, i+1) met at a white vertex."""
    labels = sorted({chart.label(d) for d in chart.real_rotation(white)})
    if len(labels) != 2:
        raise InvalidChart(f"white vertex '{white}' carries labels {labels}")
    return labels[0], labels[1]


def chart_type(chart: Chart) -> Optional[Tuple[int, List[int]]]:
    """
    The type (m; n_1, ..., n_k) of a chart, or None without white vertices.
    """
    counts: Dict[int, int] = {}
    for white in chart.vertices_of_kind(WHITE):
        low, _ = white_labels(chart, white)
        counts[low] = counts.get(low, 0) + 1
    if not counts:
        return None
    m, top = min(counts), max(counts)
    return m, [counts.get(i, 0) for i in range(m, top + 1)]


def region_classes(chart: Chart, boundary_edges: Iterable[str]) -> Dict[str, str]:
    """
    Group faces into the regions cut out by a set of edges.

    Faces adjacent across any edge outside `boundary_edges` (tethers included)
    are merged. Returns face key -> representative face key.
    """
    blocked = set(boundary_edges)
    parent = {f.key: f.key for f in chart.face_list}

    def find(x: str) -> str:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for edge in chart.edges.values():
        if edge.id in blocked:
            continue
        a = find(chart.face_of(edge.tail).key)
        b = find(chart.face_of(edge.head).key)
        if a != b:
            parent[max(a, b, key=natural_key)] = min(a, b, key=natural_key)
    return {key: find(key) for key in parent}


def vertex_faces(chart: Chart, vertex_id: str) -> List[str]:
    """Keys of the faces around a vertex, one per corner."""
    return [chart.face_of(d).key for d in chart.vertices[vertex_id].rotation]


def reflect(chart: Chart) -> Chart:
    """Mirror image: every rotation reversed."""
    vertices = {vid: Vertex(vid, v.kind, tuple(reversed(v.rotation)))
                for vid, v in chart.vertices.items()}
    infinity = chart.sigma_inv(chart.infinity) if chart.infinity is not None else None
    return Chart(chart.degree_n, vertices, chart.edges, infinity)


def reverse(chart: Chart) -> Chart:
    """Global orientation reversal of every real edge."""
    edges = {eid: e if e.is_tether else Edge(eid, e.label, e.head, e.tail)
             for eid, e in chart.edges.items()}
    return Chart(chart.degree_n, chart.vertices, edges, chart.infinity)


def move_infinity(chart: Chart, dart: str) -> Chart:
    """Re-root the chart so that the face of `dart` is the infinity face."""
    if dart not in chart.darts:
        raise DanglingReference(f"unknown dart '{dart}'")
    logger.debug("moving infinity to face(%s)", dart)
    return Chart(chart.degree_n, chart.vertices, chart.edges, dart)


def flip_direction(direction: str) -> str:
    return OUTWARD if direction == INWARD else INWARD

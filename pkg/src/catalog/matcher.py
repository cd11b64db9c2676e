"""
Template Matcher Module
Finds graph templates among the label components of a chart, and builds
charts realizing a template.
"""

import itertools
import logging
from collections import deque
from typing import Dict, Iterator, List, Optional

from chart.model import BLACK, INWARD, OUTWARD, WHITE, Chart, Edge, Vertex, natural_key
from common.errors import InvalidChart, LabelOutOfRange
from catalog.template import (FORWARD, T_BLACK, T_BW, T_WHITE, GraphTemplate, TemplateEdge,
                              TemplateVertex, orientation_assignments)
from features.strands import StrandComponent, Strand, label_darts_at, strand_components, strands

logger = logging.getLogger(__name__)

# Directions around a white vertex: three inward then three outward, up to rotation.
_WHITE_PATTERN = (INWARD, INWARD, INWARD, OUTWARD, OUTWARD, OUTWARD)


def component_template(chart: Chart, component: StrandComponent,
                       strand_list: List[Strand]) -> GraphTemplate:
    """
    The label component as a template: whites keep their label darts in
    counterclockwise order, each black vertex is explicit, and every strand
    becomes one edge oriented from its first end.
    """
    m = component.label
    vertices: Dict[str, TemplateVertex] = {}
    for vid in component.whites:
        vertices[vid] = TemplateVertex(vid, T_WHITE, tuple(label_darts_at(chart, vid, m)))
    for vid in component.blacks:
        vertices[vid] = TemplateVertex(vid, T_BLACK, tuple(chart.real_rotation(vid)))
    members = set(component.strands)
    edges = {}
    for s in strand_list:
        if s.id in members and not s.closed:
            edges[s.id] = TemplateEdge(s.id, s.end_darts[0], s.end_darts[1], FORWARD)
    return GraphTemplate(f"gamma{m}", vertices, edges)


def terminal_expansions(t: GraphTemplate) -> Iterator[GraphTemplate]:
    """Every way of drawing the collapsed terminals as explicit black vertices."""
    bws = t.bw_ids()
    for corners in itertools.product(*(t.vertices[b].ports for b in bws)):
        expanded = t
        for bw, port in zip(bws, corners):
            expanded = expanded.expand_terminal(bw, port)
        yield expanded


def _propagate(s: GraphTemplate, c: GraphTemplate, p0: str, q0: str) -> Optional[Dict[str, str]]:
    port_map = {p0: q0}
    used = {q0}
    queue = deque([p0])
    while queue:
        p = queue.popleft()
        q = port_map[p]
        if s.vertex_of(p).kind != c.vertex_of(q).kind:
            return None
        wanted = s.direction(p)
        if wanted is not None and wanted != c.direction(q):
            return None
        for nxt_s, nxt_c in ((s.sigma(p), c.sigma(q)), (s.twin(p), c.twin(q))):
            if nxt_s in port_map:
                if port_map[nxt_s] != nxt_c:
                    return None
                continue
            if nxt_c in used:
                return None
            port_map[nxt_s] = nxt_c
            used.add(nxt_c)
            queue.append(nxt_s)
    return port_map


def embed(s: GraphTemplate, c: GraphTemplate) -> Optional[Dict[str, str]]:
    """
    Rotation-preserving isomorphism from a connected template onto a connected
    target; orientation is enforced only on edges of `s` that carry one.
    Returns the vertex map, or None.
    """
    if len(s.edges) != len(c.edges):
        return None
    if sorted(v.kind for v in s.vertices.values()) != sorted(v.kind for v in c.vertices.values()):
        return None
    if not s.vertices:
        return {}
    start = s.ports[0]
    kind = s.vertex_of(start).kind
    for q in c.ports:
        if c.vertex_of(q).kind != kind:
            continue
        port_map = _propagate(s, c, start, q)
        if port_map is not None and len(port_map) == len(s.ports):
            return {s.vertex_of(p).id: c.vertex_of(q).id for p, q in port_map.items()}
    return None


def _variants(t: GraphTemplate, ro: bool) -> List[GraphTemplate]:
    found = [t, t.mirrored()]
    if ro:
        found += [t.reversed(), t.mirrored().reversed()]
    return found


def contains_template(chart: Chart, t: GraphTemplate, m: Optional[int] = None,
                      ro: bool = False) -> Optional[Dict[str, str]]:
    """
    Look for a component of Gamma_m that is the template.

    Args:
        chart: Chart to search
        t: Template; unoriented edges match either direction
        m: Label to search, all labels when None
        ro: Also accept the orientation-reversed template

    Returns:
        Map from template vertex ids to chart vertex ids, or None
    """
    labels = [m] if m is not None else list(range(1, chart.degree_n))
    for label in labels:
        if not 1 <= label < chart.degree_n:
            raise LabelOutOfRange(f"label {label} outside 1..{chart.degree_n - 1}")
        strand_list = strands(chart, label)
        targets = [component_template(chart, comp, strand_list)
                   for comp in strand_components(chart, label, strand_list) if comp.whites]
        if not targets:
            continue
        for expanded in terminal_expansions(t):
            for variant in _variants(expanded, ro):
                for target in targets:
                    found = embed(variant, target)
                    if found is not None:
                        logger.debug("%s found in gamma_%d", t.name, label)
                        return found
    return None


def _chart_id(identifier: str) -> str:
    return identifier.replace('~', '_')


def _white_rotation(directions: List[str]) -> Optional[List[str]]:
    """Full six-dart direction pattern whose even positions match `directions`."""
    for shift in range(6):
        pattern = [_WHITE_PATTERN[(i + shift) % 6] for i in range(6)]
        if pattern[0::2] == list(directions):
            return pattern
    return None


def chart_from_template(t: GraphTemplate, m: int = 1, orientation: Optional[GraphTemplate] = None,
                        placements: Optional[Dict[str, str]] = None,
                        degree_n: Optional[int] = None) -> Chart:
    """
    A valid chart whose Gamma_m component is the template. Every label m+1
    dart is a terminal edge to its own black vertex.

    Args:
        t: Template to realize
        m: Label of the template edges
        orientation: Fully oriented version of `t`; the first consistent one when None
        placements: Corner of each collapsed terminal, as the port it precedes
        degree_n: Chart degree, at least m + 2

    Raises:
        InvalidChart: if no orientation satisfies the white-vertex condition
    """
    degree_n = degree_n or max(4, m + 2)
    if m + 1 >= degree_n:
        raise LabelOutOfRange(f"label {m + 1} needs degree above {degree_n}")
    if orientation is None:
        orientation = next(orientation_assignments(t), None)
        if orientation is None:
            raise InvalidChart(f"template {t.name} has no consistent orientation")
    placements = placements or {}
    expanded = orientation
    for bw in orientation.bw_ids():
        v = orientation.vertices[bw]
        expanded = expanded.expand_terminal(bw, placements.get(bw, v.ports[0]))

    vertices: Dict[str, Vertex] = {}
    edges: Dict[str, Edge] = {}
    for vid in sorted(expanded.vertices, key=natural_key):
        v = expanded.vertices[vid]
        cid = _chart_id(vid)
        if v.kind == T_BLACK:
            vertices[cid] = Vertex(cid, BLACK, tuple(_chart_id(p) for p in v.ports))
            continue
        if v.kind == T_BW:
            raise InvalidChart(f"collapsed terminal {vid} was not expanded")
        directions = [expanded.direction(p) for p in v.ports]
        pattern = _white_rotation(directions)
        if pattern is None:
            raise InvalidChart(f"white {vid} has directions {directions}")
        rotation = []
        for i, port in enumerate(v.ports):
            extra = f"{cid}.u{i}"
            rotation += [_chart_id(port), extra]
            black = f"{cid}.k{i}"
            vertices[black] = Vertex(black, BLACK, (f"{black}d",))
            if pattern[2 * i + 1] == OUTWARD:
                edges[f"{cid}.f{i}"] = Edge(f"{cid}.f{i}", m + 1, extra, f"{black}d")
            else:
                edges[f"{cid}.f{i}"] = Edge(f"{cid}.f{i}", m + 1, f"{black}d", extra)
        vertices[cid] = Vertex(cid, WHITE, tuple(rotation))
    for eid, e in expanded.edges.items():
        tail, head = (e.a, e.b) if e.orient == FORWARD else (e.b, e.a)
        edges[_chart_id(eid)] = Edge(_chart_id(eid), m, _chart_id(tail), _chart_id(head))
    chart = Chart(degree_n, vertices, edges)
    logger.debug("realized %s as %r", t.name, chart)
    return chart

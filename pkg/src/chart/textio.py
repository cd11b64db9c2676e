"""
Chart Text Module
Parsing and canonical serialization of the line-oriented chart format.
"""

import logging
import re
from collections import deque
from typing import Dict, List, Optional, Tuple

from chart.model import (BLACK, CROSSING, PHANTOM, ROOT_FACE, TETHER_LABEL, WHITE,
                         Chart, Edge, Vertex, natural_key)
from common.errors import ChartForgeError, DanglingReference, ParseError

logger = logging.getLogger(__name__)

VERTEX_KEYWORDS = {'white': WHITE, 'cross': CROSSING, 'black': BLACK, 'phantom': PHANTOM}
KIND_KEYWORDS = {kind: word for word, kind in VERTEX_KEYWORDS.items()}
FACE_REF = re.compile(r'^face\(([^()\s]+)\)$')


def parse_fields(tokens: List[str], line_no: int) -> Dict[str, str]:
    """Parse `key=value` tokens into a dictionary."""
    fields = {}
    for token in tokens:
        if '=' not in token:
            raise ParseError(f"expected key=value, got '{token}'", line_no)
        key, value = token.split('=', 1)
        if not key or not value:
            raise ParseError(f"empty key or value in '{token}'", line_no)
        if key in fields:
            raise ParseError(f"duplicate field '{key}'", line_no)
        fields[key] = value
    return fields


def tokenize(text: str) -> List[Tuple[int, List[str]]]:
    """Split text into (line number, tokens), dropping comments and blanks."""
    lines = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if line:
            lines.append((line_no, line.split()))
    return lines


def _parse_int(value: str, what: str, line_no: int) -> int:
    try:
        return int(value)
    except ValueError:
        raise ParseError(f"{what} must be an integer, got '{value}'", line_no)


def _face_ref(token: str, line_no: int) -> Optional[str]:
    if token == ROOT_FACE:
        return None
    match = FACE_REF.match(token)
    if not match:
        raise ParseError(f"expected face(<dart>) or root, got '{token}'", line_no)
    return match.group(1)


def build_chart(description: str, degree_n: Optional[int] = None) -> Chart:
    """
    Build a chart from its text description.

    Args:
        description: Chart text (see README for the format)
        degree_n: Degree used when the text has no `chart n=` header

    Returns:
        The chart; validation is not implied
    """
    vertices: Dict[str, Vertex] = {}
    edges: Dict[str, Edge] = {}
    places: List[Tuple[int, str, Optional[str], Optional[str]]] = []
    infinity: Optional[str] = None
    infinity_seen = False

    for line_no, tokens in tokenize(description):
        keyword, rest = tokens[0], tokens[1:]
        if keyword == 'chart':
            fields = parse_fields(rest, line_no)
            if 'n' not in fields:
                raise ParseError("chart header needs n=<int>", line_no)
            degree_n = _parse_int(fields['n'], 'n', line_no)
        elif keyword in VERTEX_KEYWORDS:
            if len(rest) < 2:
                raise ParseError(f"{keyword} needs an id and darts=", line_no)
            vid = rest[0]
            fields = parse_fields(rest[1:], line_no)
            if 'darts' not in fields:
                raise ParseError(f"vertex '{vid}' has no darts=", line_no)
            if vid in vertices:
                raise ParseError(f"duplicate vertex '{vid}'", line_no)
            vertices[vid] = Vertex(vid, VERTEX_KEYWORDS[keyword], tuple(fields['darts'].split(',')))
        elif keyword == 'edge':
            if len(rest) < 2:
                raise ParseError("edge needs an id, label, tail and head", line_no)
            eid = rest[0]
            fields = parse_fields(rest[1:], line_no)
            for required in ('label', 'tail', 'head'):
                if required not in fields:
                    raise ParseError(f"edge '{eid}' is missing {required}=", line_no)
            if eid in edges:
                raise ParseError(f"duplicate edge '{eid}'", line_no)
            label = _parse_int(fields['label'], 'label', line_no)
            edges[eid] = Edge(eid, label, fields['tail'], fields['head'])
        elif keyword == 'place':
            places.append(_parse_place(rest, line_no))
        elif keyword == 'infinity':
            if len(rest) != 1:
                raise ParseError("infinity takes one face reference", line_no)
            infinity = _face_ref(rest[0], line_no)
            infinity_seen = True
        else:
            raise ParseError(f"unknown directive '{keyword}'", line_no)

    if degree_n is None:
        raise ParseError("missing 'chart n=<int>' header")
    if infinity_seen and infinity is not None and not any(infinity in v.rotation for v in vertices.values()):
        raise DanglingReference(f"infinity references unknown dart '{infinity}'")

    bare = Chart(degree_n, vertices, edges)
    tethered = _attach_components(bare, places)
    chart = Chart(degree_n, tethered.vertices, tethered.edges, infinity)
    logger.debug("built %r", chart)
    return chart


def _parse_place(rest: List[str], line_no: int) -> Tuple[int, str, Optional[str], Optional[str]]:
    # place <vertex-or-edge> [via <dart>] in <face-key>
    if len(rest) == 3 and rest[1] == 'in':
        return line_no, rest[0], None, _face_ref(rest[2], line_no)
    if len(rest) == 5 and rest[1] == 'via' and rest[3] == 'in':
        return line_no, rest[0], rest[2], _face_ref(rest[4], line_no)
    raise ParseError("expected 'place <id> [via <dart>] in face(<dart>)|root'", line_no)


def _attach_components(chart: Chart, places: List[Tuple[int, str, Optional[str], Optional[str]]]) -> Chart:
    """Insert one tether per placed component, host corner before the host dart."""
    if not chart.components:
        if places:
            raise DanglingReference(f"place line {places[0][0]} refers to an empty chart")
        return chart

    def component_of(ref: str, line_no: int) -> Tuple[str, ...]:
        if ref in chart.vertices:
            return chart.component_of(ref)
        if ref in chart.edges:
            return chart.component_of(chart.darts[chart.edges[ref].tail].vertex)
        raise DanglingReference(f"line {line_no}: unknown vertex or edge '{ref}'")

    root: Optional[Tuple[str, ...]] = None
    for line_no, ref, _, host in places:
        if host is None:
            root = component_of(ref, line_no)
            break
    if root is None:
        root = chart.components[0]

    vertices = dict(chart.vertices)
    edges = dict(chart.edges)
    placed = {root}
    counter = 0

    def attach(child: Tuple[str, ...], via: Optional[str], host: str, line_no: int) -> None:
        nonlocal counter
        if via is None:
            via = vertices[child[0]].rotation[0]
        if via not in chart.darts or chart.darts[via].vertex not in child:
            raise DanglingReference(f"line {line_no}: via dart '{via}' is not on the placed component")
        tail, head = f"~t{counter}a", f"~t{counter}b"
        tid = f"~t{counter}"
        counter += 1
        for dart, new in ((host, tail), (via, head)):
            vid = chart.darts[dart].vertex
            rot = list(vertices[vid].rotation)
            rot.insert(rot.index(dart), new)
            vertices[vid] = Vertex(vid, vertices[vid].kind, tuple(rot))
        edges[tid] = Edge(tid, TETHER_LABEL, tail, head)
        placed.add(child)

    root_dart = vertices[root[0]].rotation[0]
    for line_no, ref, via, host in places:
        child = component_of(ref, line_no)
        if child == root and host is None:
            continue
        if child in placed:
            raise ParseError(f"component of '{ref}' is placed twice", line_no)
        if host is None:
            host = root_dart
        elif host not in chart.darts:
            raise DanglingReference(f"line {line_no}: unknown host dart '{host}'")
        elif chart.component_of(chart.darts[host].vertex) not in placed:
            raise ParseError(f"host dart '{host}' belongs to a component not yet placed", line_no)
        attach(child, via, host, line_no)

    for comp in chart.components:
        if comp not in placed:
            logger.debug("component %s has no place line; putting it in the root region", comp[0])
            attach(comp, None, root_dart, 0)
    return Chart(chart.degree_n, vertices, edges)


def render_text(chart: Chart) -> str:
    """
    Canonical serialization: vertices and edges sorted by id, place lines in
    tether-tree order, tethers themselves implicit.
    """
    lines = [f"chart n={chart.degree_n}"]
    for vid in sorted(chart.vertices, key=natural_key):
        vertex = chart.vertices[vid]
        darts = ','.join(chart.real_rotation(vid))
        lines.append(f"{KIND_KEYWORDS[vertex.kind]} {vid} darts={darts}")
    for edge in chart.real_edges():
        lines.append(f"edge {edge.id} label={edge.label} tail={edge.tail} head={edge.head}")
    root = chart.root_component
    if root is not None:
        lines.append(f"place {root[0]} in root")
        for child, via, host in _placement_order(chart):
            lines.append(f"place {child} via {via} in face({host})")
    if chart.infinity is None:
        lines.append("infinity root")
    elif chart.is_tether(chart.infinity):
        lines.append(f"infinity face({chart.face_of(chart.infinity).key})")
    else:
        lines.append(f"infinity face({chart.infinity})")
    return '\n'.join(lines) + '\n'


def _placement_order(chart: Chart) -> List[Tuple[str, str, str]]:
    """Placements in breadth-first order from the root component."""
    placement = chart.placement()
    by_parent: Dict[Tuple[str, ...], List[str]] = {}
    for child, (via, host) in placement.items():
        parent = chart.component_of(chart.darts[host].vertex)
        by_parent.setdefault(parent, []).append(child)
    order = []
    queue = deque([chart.root_component])
    seen = set()
    while queue:
        comp = queue.popleft()
        if comp in seen:
            continue
        seen.add(comp)
        for child in sorted(by_parent.get(comp, []), key=natural_key):
            via, host = placement[child]
            order.append((child, via, host))
            queue.append(chart.component_of(child))
    if len(order) != len(placement):
        raise ChartForgeError("tether tree is not connected to the root component")
    return order


def load_chart(path: str, degree_n: Optional[int] = None) -> Chart:
    """Read and build a chart file; `degree_n` applies when the file has no header."""
    with open(path, 'r', encoding='utf-8') as f:
        return build_chart(f.read(), degree_n)


def save_chart(chart: Chart, path: str) -> None:
    with open(path, 'w', encoding='utf-8') as f:
        f.write(render_text(chart))

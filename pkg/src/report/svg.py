"""
SVG Renderer Module
Straight-line drawings of charts and graph templates from their rotation systems.
"""

import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Dict, List, Literal, Optional, Tuple

import numpy as np
from jinja2 import Template
from pydantic import BaseModel, ConfigDict

from catalog.template import FORWARD, T_BLACK, GraphTemplate
from chart.model import BLACK, WHITE, Chart, natural_key
from common.errors import DegenerateLayout
from features.strands import middle_darts

logger = logging.getLogger(__name__)

DEFAULT_COLORS = {1: '#1f77b4', 2: '#d62728', 3: '#2ca02c', 4: '#9467bd', 5: '#ff7f0e'}

# Node kinds of a drawing
N_WHITE = 'white'
N_BLACK = 'black'
N_TERMINAL = 'terminal'
N_HIDDEN = 'hidden'


class ShowFlags(BaseModel):
    model_config = ConfigDict(extra='forbid')

    orientations: bool = True
    middles: bool = False
    face_ids: bool = False


class RenderSpec(BaseModel):
    """Drawing options; the same spec and seed always give the same bytes."""
    model_config = ConfigDict(extra='forbid')

    layout: Literal['tutte', 'force'] = 'tutte'
    width: int = 480
    height: int = 480
    seed: int = 0
    label_colors: Dict[int, str] = dict(DEFAULT_COLORS)
    show: ShowFlags = ShowFlags()

    def color(self, label: int) -> str:
        return self.label_colors.get(label, '#444444')


@dataclass
class Drawing:
    """
    Plain graph handed to the layout: node kinds, labelled edges with a
    direction, and the boundary walk used as the outer polygon.
    """
    nodes: Dict[str, str]
    edges: List[Tuple[str, str, str, int, bool]]
    outer: List[str]
    layout_edges: List[Tuple[str, str]] = field(default_factory=list)
    middles: List[Tuple[str, str]] = field(default_factory=list)
    face_labels: List[Tuple[str, List[str]]] = field(default_factory=list)


def _distinct(walk: List[str]) -> List[str]:
    return list(dict.fromkeys(walk))


def drawing_from_chart(chart: Chart) -> Drawing:
    """Whites as circles, blacks as dots; crossings and phantoms stay unmarked."""
    nodes = {}
    for vid, v in chart.vertices.items():
        nodes[vid] = {WHITE: N_WHITE, BLACK: N_BLACK}.get(v.kind, N_HIDDEN)
    edges = [(e.id, chart.darts[e.tail].vertex, chart.darts[e.head].vertex, e.label, True)
             for e in chart.real_edges()]
    layout_edges = [(chart.darts[t.tail].vertex, chart.darts[t.head].vertex) for t in chart.tethers()]
    outer = _distinct([chart.darts[d].vertex for d in chart.infinity_face.darts]) if nodes else []
    faces = [(f.key, _distinct([chart.darts[d].vertex for d in f.darts])) for f in chart.face_list]
    return Drawing(nodes, edges, outer, layout_edges, face_labels=faces)


def drawing_from_template(t: GraphTemplate, label: int = 1) -> Drawing:
    """A collapsed terminal is drawn as a short stub from its white vertex."""
    nodes = {}
    for vid, v in t.vertices.items():
        nodes[vid] = N_BLACK if v.kind == T_BLACK else N_WHITE
    edges = []
    for eid in sorted(t.edges, key=natural_key):
        e = t.edges[eid]
        a, b = t.vertex_of(e.a).id, t.vertex_of(e.b).id
        if e.orient is not None and e.orient != FORWARD:
            a, b = b, a
        edges.append((eid, a, b, label, e.orient is not None))
    faces = t.faces()
    walks = [_distinct([t.vertex_of(p).id for p in orbit]) for orbit in faces]
    outer = max(walks, key=len) if walks else []
    stubs = [(bw, f"{bw}.terminal") for bw in t.bw_ids()]
    for bw, stub in stubs:
        nodes[stub] = N_TERMINAL
    drawing = Drawing(nodes, edges, outer, layout_edges=stubs,
                      face_labels=[(f"f{i}", w) for i, w in enumerate(walks)])
    return drawing


def _adjacency(drawing: Drawing) -> Dict[str, Counter]:
    adjacency: Dict[str, Counter] = {v: Counter() for v in drawing.nodes}
    pairs = [(a, b) for _, a, b, _, _ in drawing.edges] + list(drawing.layout_edges)
    for a, b in pairs:
        if a == b:
            continue
        adjacency[a][b] += 1
        adjacency[b][a] += 1
    return adjacency


def tutte_layout(drawing: Drawing) -> Dict[str, Tuple[float, float]]:
    """
    Barycentric embedding: the outer walk is pinned to a regular polygon and
    every other node sits at the weighted mean of its neighbours.

    Raises:
        DegenerateLayout: if the outer walk has fewer than three nodes or the
            system is singular
    """
    if not drawing.nodes:
        return {}
    outer = drawing.outer
    if len(outer) < 3:
        raise DegenerateLayout(f"outer face has {len(outer)} vertices")
    positions = {}
    for i, v in enumerate(outer):
        angle = 2 * math.pi * i / len(outer) - math.pi / 2
        positions[v] = (math.cos(angle), math.sin(angle))
    inner = sorted((v for v in drawing.nodes if v not in positions), key=natural_key)
    if not inner:
        return positions
    index = {v: i for i, v in enumerate(inner)}
    adjacency = _adjacency(drawing)
    matrix = np.zeros((len(inner), len(inner)))
    rhs = np.zeros((len(inner), 2))
    for v in inner:
        i = index[v]
        for u, weight in adjacency[v].items():
            matrix[i, i] += weight
            if u in index:
                matrix[i, index[u]] -= weight
            else:
                rhs[i] += weight * np.array(positions[u])
    try:
        solved = np.linalg.solve(matrix, rhs)
    except np.linalg.LinAlgError as exc:
        raise DegenerateLayout(f"barycentric system is singular: {exc}") from exc
    if not np.all(np.isfinite(solved)):
        raise DegenerateLayout("barycentric system has no finite solution")
    for v in inner:
        positions[v] = (float(solved[index[v], 0]), float(solved[index[v], 1]))
    return positions


def force_layout(drawing: Drawing, seed: int = 0, iterations: int = 200) -> Dict[str, Tuple[float, float]]:
    """Seeded spring layout for drawings the barycentric system cannot place."""
    names = sorted(drawing.nodes, key=natural_key)
    if not names:
        return {}
    rng = np.random.default_rng(seed)
    pos = rng.uniform(-1.0, 1.0, size=(len(names), 2))
    index = {v: i for i, v in enumerate(names)}
    pairs = [(index[a], index[b]) for a, b in
             [(a, b) for _, a, b, _, _ in drawing.edges] + list(drawing.layout_edges) if a != b]
    k = 1.0 / math.sqrt(len(names))
    temperature = 0.1
    for _ in range(iterations):
        delta = pos[:, None, :] - pos[None, :, :]
        distance = np.maximum(np.linalg.norm(delta, axis=-1), 1e-3)
        force = (delta / distance[..., None] * (k * k / distance)[..., None]).sum(axis=1)
        for i, j in pairs:
            d = pos[i] - pos[j]
            length = max(float(np.linalg.norm(d)), 1e-3)
            pull = d / length * (length * length / k)
            force[i] -= pull
            force[j] += pull
        size = np.maximum(np.linalg.norm(force, axis=1), 1e-9)
        pos += force / size[:, None] * np.minimum(size, temperature)[:, None]
        temperature *= 0.98
    span = np.abs(pos).max() or 1.0
    return {v: (float(pos[index[v], 0] / span), float(pos[index[v], 1] / span)) for v in names}


def _place_stubs(drawing: Drawing, positions: Dict[str, Tuple[float, float]]) -> Dict[str, Tuple[float, float]]:
    """Move each terminal stub end a fixed step away from the centre of its white vertex's neighbours."""
    adjacency = _adjacency(drawing)
    for white, stub in drawing.layout_edges:
        if drawing.nodes.get(stub) != N_TERMINAL:
            continue
        x, y = positions[white]
        others = [positions[u] for u in adjacency[white] if u != stub and u in positions]
        cx = sum(p[0] for p in others) / len(others) if others else 0.0
        cy = sum(p[1] for p in others) / len(others) if others else 0.0
        dx, dy = x - cx, y - cy
        length = math.hypot(dx, dy) or 1.0
        positions[stub] = (x + 0.15 * dx / length, y + 0.15 * dy / length)
    return positions


SVG_TEMPLATE = Template("""<svg xmlns="http://www.w3.org/2000/svg" width="{{ width }}" height="{{ height }}" viewBox="0 0 {{ width }} {{ height }}">
{%- if markers %}
<defs>
{%- for color, marker in markers %}
<marker id="{{ marker }}" viewBox="0 0 10 10" refX="5" refY="5" markerWidth="6" markerHeight="6" orient="auto"><path d="M0,0 L10,5 L0,10 z" fill="{{ color }}"/></marker>
{%- endfor %}
</defs>
{%- endif %}
{%- for e in edges %}
<path class="edge" data-id="{{ e.id }}" d="{{ e.d }}" stroke="{{ e.color }}" fill="none" stroke-width="2"{% if e.marker %} marker-mid="url(#{{ e.marker }})"{% endif %}/>
{%- endfor %}
{%- for s in stubs %}
<line class="terminal" x1="{{ s.x1 }}" y1="{{ s.y1 }}" x2="{{ s.x2 }}" y2="{{ s.y2 }}" stroke="#444444" stroke-width="2"/>
{%- endfor %}
{%- for n in whites %}
<circle class="white" data-id="{{ n.id }}" cx="{{ n.x }}" cy="{{ n.y }}" r="9" fill="#ffffff" stroke="#000000" stroke-width="1.5"/>
{%- endfor %}
{%- for n in blacks %}
<circle class="black" data-id="{{ n.id }}" cx="{{ n.x }}" cy="{{ n.y }}" r="4" fill="#000000"/>
{%- endfor %}
{%- for t in texts %}
<text class="{{ t.cls }}" x="{{ t.x }}" y="{{ t.y }}" font-size="10">{{ t.text }}</text>
{%- endfor %}
</svg>
""")


def _fmt(value: float) -> str:
    return f"{value:.2f}"


class SvgRenderer:
    """Lays out and draws charts and templates under one RenderSpec."""

    def __init__(self, config: Dict[str, Any], seed: Optional[int] = None):
        settings = dict(config.get('render', {}))
        if seed is not None:
            settings['seed'] = seed
        self.spec = RenderSpec.model_validate(settings)
        self.fallbacks: List[str] = []

    def layout(self, drawing: Drawing) -> Dict[str, Tuple[float, float]]:
        positions = None
        if self.spec.layout == 'tutte':
            try:
                positions = tutte_layout(drawing)
            except DegenerateLayout as exc:
                logger.warning("tutte layout failed, using force layout: %s", exc)
                self.fallbacks.append(str(exc))
        if positions is None:
            positions = force_layout(drawing, self.spec.seed)
        return _place_stubs(drawing, positions)

    def _to_canvas(self, positions: Dict[str, Tuple[float, float]]) -> Dict[str, Tuple[float, float]]:
        margin = 24.0
        half_w = (self.spec.width - 2 * margin) / 2
        half_h = (self.spec.height - 2 * margin) / 2
        return {v: (margin + half_w * (x + 1), margin + half_h * (y + 1)) for v, (x, y) in positions.items()}

    def render_drawing(self, drawing: Drawing) -> str:
        canvas = self._to_canvas(self.layout(drawing))
        multiplicity: Counter = Counter()
        edges, markers = [], {}
        for eid, a, b, label, directed in drawing.edges:
            color = self.spec.color(label)
            key = tuple(sorted((a, b)))
            rank = multiplicity[key]
            multiplicity[key] += 1
            (x1, y1), (x2, y2) = canvas[a], canvas[b]
            if a == b:
                r = 14.0 + 6 * rank
                d = (f"M{_fmt(x1)},{_fmt(y1)} C{_fmt(x1 - r)},{_fmt(y1 - 2 * r)} "
                     f"{_fmt(x1 + r)},{_fmt(y1 - 2 * r)} {_fmt(x1)},{_fmt(y1)}")
            else:
                offset = 0.0 if rank == 0 else (1 if rank % 2 else -1) * 18.0 * ((rank + 1) // 2)
                if a != key[0]:
                    offset = -offset
                mx, my = (x1 + x2) / 2, (y1 + y2) / 2
                length = math.hypot(x2 - x1, y2 - y1) or 1.0
                cx, cy = mx - offset * (y2 - y1) / length, my + offset * (x2 - x1) / length
                qx, qy = (mx + cx) / 2, (my + cy) / 2
                d = (f"M{_fmt(x1)},{_fmt(y1)} Q{_fmt(cx)},{_fmt(cy)} {_fmt(qx)},{_fmt(qy)} "
                     f"T{_fmt(x2)},{_fmt(y2)}")
            marker = None
            if directed and self.spec.show.orientations:
                marker = markers.setdefault(color, f"arrow{len(markers)}")
            edges.append({'id': eid, 'd': d, 'color': color, 'marker': marker})

        stubs = []
        for white, stub in drawing.layout_edges:
            if drawing.nodes.get(stub) == N_TERMINAL:
                (x1, y1), (x2, y2) = canvas[white], canvas[stub]
                stubs.append({'x1': _fmt(x1), 'y1': _fmt(y1), 'x2': _fmt(x2), 'y2': _fmt(y2)})

        whites, blacks = [], []
        for vid in sorted(drawing.nodes, key=natural_key):
            kind = drawing.nodes[vid]
            x, y = canvas[vid]
            if kind == N_WHITE:
                whites.append({'id': vid, 'x': _fmt(x), 'y': _fmt(y)})
            elif kind in (N_BLACK, N_TERMINAL):
                blacks.append({'id': vid, 'x': _fmt(x), 'y': _fmt(y)})

        texts = []
        if self.spec.show.face_ids:
            for key, walk in drawing.face_labels:
                points = [canvas[v] for v in walk if v in canvas]
                if points:
                    x = sum(p[0] for p in points) / len(points)
                    y = sum(p[1] for p in points) / len(points)
                    texts.append({'cls': 'face', 'x': _fmt(x), 'y': _fmt(y), 'text': key})
        if self.spec.show.middles:
            for vid, dart in drawing.middles:
                x, y = canvas[vid]
                texts.append({'cls': 'middle', 'x': _fmt(x + 10), 'y': _fmt(y - 10), 'text': dart})

        return SVG_TEMPLATE.render(width=self.spec.width, height=self.spec.height,
                                   markers=sorted((c, m) for c, m in markers.items()),
                                   edges=edges, stubs=stubs, whites=whites, blacks=blacks, texts=texts)

    def render_chart(self, chart: Chart) -> str:
        drawing = drawing_from_chart(chart)
        if self.spec.show.middles:
            drawing.middles = [(w, d) for w in chart.vertices_of_kind(WHITE) for d in middle_darts(chart, w)]
        return self.render_drawing(drawing)

    def render_template(self, t: GraphTemplate, label: int = 1) -> str:
        return self.render_drawing(drawing_from_template(t, label))


def render_svg(chart: Chart, spec: Optional[RenderSpec] = None) -> str:
    """SVG text of a chart under a spec, defaults when None."""
    renderer = SvgRenderer({'render': (spec or RenderSpec()).model_dump()})
    return renderer.render_chart(chart)

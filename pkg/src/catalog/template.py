"""
Graph Template Module
Abstract embedded graphs for label components, with RO-family canonical forms.
"""

import itertools
import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Tuple

from chart.model import INWARD, OUTWARD, natural_key
from chart.textio import parse_fields, tokenize
from common.errors import DanglingReference, ParseError

logger = logging.getLogger(__name__)

T_WHITE = 'white'
T_BW = 'bw'
T_BLACK = 'black'
PORT_COUNTS = {T_WHITE: 3, T_BW: 2, T_BLACK: 1}

FORWARD = 'forward'
BACKWARD = 'backward'


@dataclass(frozen=True)
class TemplateVertex:
    """
    A white vertex (three ports), a white vertex with a collapsed terminal edge
    (two ports) or a black vertex (one port). `terminal` is the direction of a
    collapsed terminal edge at its white vertex, when known.
    """
    id: str
    kind: str
    ports: Tuple[str, ...]
    terminal: Optional[str] = None


@dataclass(frozen=True)
class TemplateEdge:
    id: str
    a: str
    b: str
    orient: Optional[str] = None


@dataclass
class GraphTemplate:
    name: str
    vertices: Dict[str, TemplateVertex]
    edges: Dict[str, TemplateEdge]
    group: str = ''
    note: str = ''
    _port_vertex: Dict[str, str] = field(init=False, repr=False)
    _port_edge: Dict[str, str] = field(init=False, repr=False)

    def __post_init__(self):
        self._port_vertex = {p: v.id for v in self.vertices.values() for p in v.ports}
        self._port_edge = {}
        for edge in self.edges.values():
            for p in (edge.a, edge.b):
                if p not in self._port_vertex:
                    raise DanglingReference(f"template {self.name}: edge {edge.id} uses unknown port '{p}'")
                if p in self._port_edge:
                    raise ParseError(f"template {self.name}: port '{p}' used by two edges")
                self._port_edge[p] = edge.id

    # -- navigation ---------------------------------------------------------

    @property
    def ports(self) -> List[str]:
        return [p for vid in sorted(self.vertices, key=natural_key) for p in self.vertices[vid].ports]

    def vertex_of(self, port: str) -> TemplateVertex:
        return self.vertices[self._port_vertex[port]]

    def edge_of(self, port: str) -> TemplateEdge:
        return self.edges[self._port_edge[port]]

    def twin(self, port: str) -> str:
        edge = self.edge_of(port)
        return edge.b if edge.a == port else edge.a

    def sigma(self, port: str) -> str:
        ports = self.vertex_of(port).ports
        return ports[(ports.index(port) + 1) % len(ports)]

    def sigma_inv(self, port: str) -> str:
        ports = self.vertex_of(port).ports
        return ports[(ports.index(port) - 1) % len(ports)]

    def phi(self, port: str) -> str:
        return self.sigma(self.twin(port))

    def direction(self, port: str) -> Optional[str]:
        """Direction of a port at its vertex, None when the edge is unoriented."""
        edge = self.edge_of(port)
        if edge.orient is None:
            return None
        tail = edge.a if edge.orient == FORWARD else edge.b
        return OUTWARD if port == tail else INWARD

    def whites(self) -> List[str]:
        """White vertices, collapsed terminals included."""
        return sorted((v.id for v in self.vertices.values() if v.kind in (T_WHITE, T_BW)), key=natural_key)

    def bw_ids(self) -> List[str]:
        return sorted((v.id for v in self.vertices.values() if v.kind == T_BW), key=natural_key)

    def blacks(self) -> List[str]:
        return sorted((v.id for v in self.vertices.values() if v.kind == T_BLACK), key=natural_key)

    def terminal_count(self) -> int:
        return len(self.bw_ids()) + len(self.blacks())

    def is_oriented(self) -> bool:
        return all(e.orient is not None for e in self.edges.values())

    def faces(self) -> List[List[str]]:
        """Port orbits of phi; a face lies to the right of each port's edge."""
        seen = set()
        result = []
        for start in self.ports:
            if start in seen:
                continue
            orbit, p = [], start
            while p not in seen:
                seen.add(p)
                orbit.append(p)
                p = self.phi(p)
            result.append(orbit)
        return result

    def face_index(self) -> Dict[str, int]:
        return {p: i for i, orbit in enumerate(self.faces()) for p in orbit}

    def is_connected(self) -> bool:
        if not self.vertices:
            return True
        start = next(iter(self.vertices))
        seen, stack = {start}, [start]
        while stack:
            for p in self.vertices[stack.pop()].ports:
                u = self.vertex_of(self.twin(p)).id
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        return len(seen) == len(self.vertices)

    def is_planar(self) -> bool:
        """Euler check of the embedding: V - E + F = 2 for a connected graph."""
        return len(self.vertices) - len(self.edges) + len(self.faces()) == 2

    def has_loop(self) -> bool:
        return any(self._port_vertex[e.a] == self._port_vertex[e.b] for e in self.edges.values())

    # -- derived templates ----------------------------------------------------

    def with_orientation(self, orients: Dict[str, Optional[str]],
                         terminals: Optional[Dict[str, Optional[str]]] = None) -> 'GraphTemplate':
        edges = {eid: TemplateEdge(eid, e.a, e.b, orients.get(eid, e.orient))
                 for eid, e in self.edges.items()}
        vertices = dict(self.vertices)
        for vid, value in (terminals or {}).items():
            v = vertices[vid]
            vertices[vid] = TemplateVertex(vid, v.kind, v.ports, value)
        return GraphTemplate(self.name, vertices, edges, self.group, self.note)

    def mirrored(self) -> 'GraphTemplate':
        vertices = {vid: TemplateVertex(vid, v.kind, tuple(reversed(v.ports)), v.terminal)
                    for vid, v in self.vertices.items()}
        return GraphTemplate(self.name, vertices, dict(self.edges), self.group, self.note)

    def reversed(self) -> 'GraphTemplate':
        flip = {FORWARD: BACKWARD, BACKWARD: FORWARD, None: None}
        flip_t = {INWARD: OUTWARD, OUTWARD: INWARD, None: None}
        edges = {eid: TemplateEdge(eid, e.a, e.b, flip[e.orient]) for eid, e in self.edges.items()}
        vertices = {vid: TemplateVertex(vid, v.kind, v.ports, flip_t[v.terminal])
                    for vid, v in self.vertices.items()}
        return GraphTemplate(self.name, vertices, edges, self.group, self.note)

    def expand_terminal(self, bw_id: str, corner_port: str) -> 'GraphTemplate':
        """
        Replace a collapsed terminal by an explicit black vertex sitting in the
        corner just before `corner_port` at the white vertex.
        """
        v = self.vertices[bw_id]
        if v.kind != T_BW or corner_port not in v.ports:
            raise DanglingReference(f"{bw_id} has no collapsed terminal at port {corner_port}")
        port = f"{bw_id}~t"
        ports = list(v.ports)
        ports.insert(ports.index(corner_port), port)
        vertices = dict(self.vertices)
        vertices[bw_id] = TemplateVertex(bw_id, T_WHITE, tuple(ports))
        black = f"{bw_id}~k"
        vertices[black] = TemplateVertex(black, T_BLACK, (f"{black}.0",))
        orient = None
        if v.terminal is not None:
            orient = FORWARD if v.terminal == OUTWARD else BACKWARD
        edges = dict(self.edges)
        eid = f"{bw_id}~e"
        edges[eid] = TemplateEdge(eid, port, f"{black}.0", orient)
        return GraphTemplate(self.name, vertices, edges, self.group, self.note)


@dataclass(frozen=True)
class ROClass:
    """RO-family class: the canonical form is shared by all four variants."""
    canonical_form: str
    representatives: Tuple[GraphTemplate, ...] = ()

    @property
    def key(self) -> bytes:
        return self.canonical_form.encode('utf-8')


def parse_template(text: str) -> GraphTemplate:
    """Parse the template text format."""
    name = ''
    group = ''
    note = ''
    vertices: Dict[str, TemplateVertex] = {}
    edges: Dict[str, TemplateEdge] = {}
    for line_no, tokens in tokenize(text):
        keyword, rest = tokens[0], tokens[1:]
        if keyword == 'graph':
            if not rest:
                raise ParseError("graph needs a name", line_no)
            name = rest[0]
            fields = parse_fields(rest[1:], line_no)
            group = fields.get('group', '')
        elif keyword == 'note':
            note = ' '.join(rest)
        elif keyword in (T_WHITE, T_BW, T_BLACK):
            if not rest:
                raise ParseError(f"{keyword} needs an id", line_no)
            vid = rest[0]
            fields = parse_fields(rest[1:], line_no)
            ports = fields.get('ports') or fields.get('port')
            if not ports:
                raise ParseError(f"vertex '{vid}' has no ports", line_no)
            ports_t = tuple(ports.split(','))
            if len(ports_t) != PORT_COUNTS[keyword]:
                raise ParseError(f"{keyword} '{vid}' needs {PORT_COUNTS[keyword]} ports", line_no)
            terminal = fields.get('terminal')
            if terminal not in (None, INWARD, OUTWARD):
                raise ParseError(f"terminal must be in or out, got '{terminal}'", line_no)
            if vid in vertices:
                raise ParseError(f"duplicate vertex '{vid}'", line_no)
            vertices[vid] = TemplateVertex(vid, keyword, ports_t, terminal)
        elif keyword == 'edge':
            if len(rest) < 2 or '-' not in rest[1]:
                raise ParseError("edge needs an id and <port>-<port>", line_no)
            eid = rest[0]
            a, b = rest[1].split('-', 1)
            fields = parse_fields(rest[2:], line_no)
            orient = fields.get('dir')
            if orient not in (None, FORWARD, BACKWARD):
                raise ParseError(f"dir must be forward or backward, got '{orient}'", line_no)
            edges[eid] = TemplateEdge(eid, a, b, orient)
        else:
            raise ParseError(f"unknown directive '{keyword}'", line_no)
    if not name:
        raise ParseError("missing 'graph <name>' header")
    return GraphTemplate(name, vertices, edges, group, note)


def render_template(t: GraphTemplate) -> str:
    lines = [f"graph {t.name}" + (f" group={t.group}" if t.group else '')]
    if t.note:
        lines.append(f"note {t.note}")
    for vid in sorted(t.vertices, key=natural_key):
        v = t.vertices[vid]
        key = 'port' if v.kind == T_BLACK else 'ports'
        extra = f" terminal={v.terminal}" if v.terminal else ''
        lines.append(f"{v.kind} {vid} {key}={','.join(v.ports)}{extra}")
    for eid in sorted(t.edges, key=natural_key):
        e = t.edges[eid]
        extra = f" dir={e.orient}" if e.orient else ''
        lines.append(f"edge {eid} {e.a}-{e.b}{extra}")
    return '\n'.join(lines) + '\n'


def _code_from(t: GraphTemplate, start: str) -> str:
    order = {start: 0}
    queue = deque([start])
    while queue:
        p = queue.popleft()
        for nxt in (t.sigma(p), t.twin(p)):
            if nxt not in order:
                order[nxt] = len(order)
                queue.append(nxt)
    rows = []
    for p in sorted(order, key=order.get):
        v = t.vertex_of(p)
        direction = t.direction(p)
        rows.append(f"{v.kind[0]}{(v.terminal or '-')[0]}{(direction or '-')[0]}"
                    f".{order[t.sigma(p)]}.{order[t.twin(p)]}")
    return ';'.join(rows)


def embedding_code(t: GraphTemplate) -> str:
    """Canonical code of one variant: minimum over all starting ports."""
    if not t.vertices:
        return ''
    return min(_code_from(t, p) for p in t.ports)


def ro_variants(t: GraphTemplate) -> List[GraphTemplate]:
    """Identity, reflection, orientation reversal, both."""
    mirror = t.mirrored()
    return [t, mirror, t.reversed(), mirror.reversed()]


def ro_canonical(t: GraphTemplate) -> ROClass:
    """Canonical form invariant under reflection and global orientation reversal."""
    variants = ro_variants(t)
    form = min(embedding_code(v) for v in variants)
    return ROClass(f"{len(t.vertices)}v{len(t.edges)}e:{form}", tuple(variants))


def ro_equivalent_bruteforce(s: GraphTemplate, t: GraphTemplate) -> bool:
    """
    RO-equivalence by trying all four variants and every vertex bijection that
    respects rotations; slow, used to cross-check canonical forms.
    """
    if sorted(v.kind for v in s.vertices.values()) != sorted(v.kind for v in t.vertices.values()):
        return False
    if len(s.edges) != len(t.edges):
        return False
    for variant in ro_variants(t):
        if _rotation_isomorphic(s, variant):
            return True
    return False


def _rotation_isomorphic(s: GraphTemplate, t: GraphTemplate) -> bool:
    s_ids = sorted(s.vertices, key=natural_key)
    t_ids = sorted(t.vertices, key=natural_key)
    for perm in itertools.permutations(t_ids):
        mapping = dict(zip(s_ids, perm))
        if any(s.vertices[a].kind != t.vertices[b].kind or s.vertices[a].terminal != t.vertices[b].terminal
               for a, b in mapping.items()):
            continue
        shifts = [range(len(s.vertices[a].ports)) for a in s_ids]
        for offsets in itertools.product(*shifts):
            port_map = {}
            for a, off in zip(s_ids, offsets):
                sp, tp = s.vertices[a].ports, t.vertices[mapping[a]].ports
                for i, p in enumerate(sp):
                    port_map[p] = tp[(i + off) % len(tp)]
            if all(port_map[s.twin(p)] == t.twin(port_map[p]) and s.direction(p) == t.direction(port_map[p])
                   for p in s.ports):
                return True
    return False


def orientation_assignments(t: GraphTemplate, middle_terminals: bool = True) -> Iterator[GraphTemplate]:
    """
    Every completion of the template's edge orientations consistent with the
    white-vertex condition. A collapsed terminal is the lone (middle) direction,
    so its two other ports agree; with `middle_terminals` an explicit terminal
    edge must also be the lone direction at its white vertex.
    """
    free = [eid for eid in sorted(t.edges, key=natural_key) if t.edges[eid].orient is None]
    for choice in itertools.product((FORWARD, BACKWARD), repeat=len(free)):
        candidate = t.with_orientation(dict(zip(free, choice)))
        terminals = _consistent_terminals(candidate, middle_terminals)
        if terminals is not None:
            yield candidate.with_orientation({}, terminals)


def _consistent_terminals(t: GraphTemplate, middle_terminals: bool) -> Optional[Dict[str, str]]:
    terminals = {}
    for v in t.vertices.values():
        dirs = [t.direction(p) for p in v.ports]
        if v.kind == T_BW:
            if dirs[0] != dirs[1]:
                return None
            lone = INWARD if dirs[0] == OUTWARD else OUTWARD
            if v.terminal is not None and v.terminal != lone:
                return None
            terminals[v.id] = lone
        elif v.kind == T_WHITE:
            if len(set(dirs)) == 1:
                return None
            if middle_terminals:
                for p, d in zip(v.ports, dirs):
                    if t.vertex_of(t.twin(p)).kind == T_BLACK and dirs.count(d) != 1:
                        return None
    return terminals


def lone_port(t: GraphTemplate, vertex_id: str) -> Optional[str]:
    """The port whose direction differs from the other two (the middle one)."""
    v = t.vertices[vertex_id]
    dirs = [t.direction(p) for p in v.ports]
    for p, d in zip(v.ports, dirs):
        if d is not None and dirs.count(d) == 1:
            return p
    return None

"""
Chart Model Module
Immutable combinatorial-map representation of charts on the 2-sphere.
"""

import hashlib
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, List, Optional, Tuple

from common.errors import DanglingReference, InvalidChart

INWARD = 'in'
OUTWARD = 'out'

WHITE = 'white'
CROSSING = 'crossing'
BLACK = 'black'
PHANTOM = 'phantom'
VERTEX_KINDS = (WHITE, CROSSING, BLACK, PHANTOM)
DEGREES = {WHITE: 6, CROSSING: 4, BLACK: 1, PHANTOM: 2}

# Tethers are invisible edges joining the components into one rotation system
TETHER_LABEL = 0
ROOT_FACE = 'root'


def natural_key(identifier: str) -> Tuple:
    """Sort key that orders 'd2' before 'd10'."""
    return tuple(int(part) if part.isdigit() else part
                 for part in re.split(r'(\d+)', identifier))


@dataclass(frozen=True)
class Dart:
    id: str
    vertex: str
    edge: str
    direction: str


@dataclass(frozen=True)
class Vertex:
    id: str
    kind: str
    rotation: Tuple[str, ...]


@dataclass(frozen=True)
class Edge:
    id: str
    label: int
    tail: str
    head: str

    @property
    def is_tether(self) -> bool:
        return self.label == TETHER_LABEL


@dataclass(frozen=True)
class Face:
    """One complementary region of the whole chart, as a dart orbit."""
    key: str
    darts: Tuple[str, ...]
    hosted: Tuple[str, ...] = ()


@dataclass(frozen=True)
class Violation:
    rule: str
    location: str
    message: str


@dataclass
class ValidationReport:
    violations: List[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, rule: str, location: str, message: str) -> None:
        self.violations.append(Violation(rule, location, message))

    def rules(self) -> List[str]:
        return sorted({v.rule for v in self.violations})


class Chart:
    """
    An n-chart stored as a rotation system.

    Darts are half-edges; each vertex lists its darts counterclockwise and each
    edge pairs a tail dart (outward) with a head dart (inward). Components are
    joined by tether edges so that faces are plain orbits of sigma o alpha.
    """

    def __init__(self, degree_n: int, vertices: Dict[str, Vertex],
                 edges: Dict[str, Edge], infinity: Optional[str] = None):
        self.degree_n = degree_n
        self.vertices = dict(vertices)
        self.edges = dict(edges)
        self.infinity = infinity
        self.darts = self._index_darts()
        self._next: Dict[str, str] = {}
        self._prev: Dict[str, str] = {}
        for vertex in self.vertices.values():
            rot = vertex.rotation
            for i, d in enumerate(rot):
                self._next[d] = rot[(i + 1) % len(rot)]
                self._prev[d] = rot[(i - 1) % len(rot)]
        if infinity is not None and infinity not in self.darts:
            raise DanglingReference(f"infinity face references unknown dart '{infinity}'")

    def _index_darts(self) -> Dict[str, Dart]:
        owner: Dict[str, str] = {}
        for vertex in self.vertices.values():
            for d in vertex.rotation:
                if d in owner:
                    raise InvalidChart(f"dart '{d}' appears at both '{owner[d]}' and '{vertex.id}'")
                owner[d] = vertex.id
        darts: Dict[str, Dart] = {}
        for edge in self.edges.values():
            for d, direction in ((edge.tail, OUTWARD), (edge.head, INWARD)):
                if d not in owner:
                    raise DanglingReference(f"edge '{edge.id}' uses undeclared dart '{d}'")
                if d in darts:
                    raise InvalidChart(f"dart '{d}' belongs to two edges")
                darts[d] = Dart(d, owner[d], edge.id, direction)
        missing = sorted(set(owner) - set(darts), key=natural_key)
        if missing:
            raise DanglingReference(f"dart '{missing[0]}' at vertex '{owner[missing[0]]}' has no edge")
        return darts

    # -- local navigation -------------------------------------------------

    def edge_of(self, dart: str) -> Edge:
        return self.edges[self.darts[dart].edge]

    def twin(self, dart: str) -> str:
        edge = self.edge_of(dart)
        return edge.head if edge.tail == dart else edge.tail

    def sigma(self, dart: str) -> str:
        """Next dart counterclockwise at the same vertex."""
        return self._next[dart]

    def sigma_inv(self, dart: str) -> str:
        return self._prev[dart]

    def phi(self, dart: str) -> str:
        """Face permutation: cross the edge, then turn counterclockwise."""
        return self._next[self.twin(dart)]

    def label(self, dart: str) -> int:
        return self.edge_of(dart).label

    def direction(self, dart: str) -> str:
        return self.darts[dart].direction

    def vertex_of(self, dart: str) -> Vertex:
        return self.vertices[self.darts[dart].vertex]

    def is_tether(self, dart: str) -> bool:
        return self.edge_of(dart).is_tether

    def real_rotation(self, vertex_id: str) -> Tuple[str, ...]:
        """Rotation of a vertex with tether darts removed."""
        return tuple(d for d in self.vertices[vertex_id].rotation if not self.is_tether(d))

    def opposite(self, dart: str) -> str:
        """Diagonal dart at a crossing (two real steps around the rotation)."""
        rot = self.real_rotation(self.darts[dart].vertex)
        return rot[(rot.index(dart) + len(rot) // 2) % len(rot)]

    def vertices_of_kind(self, kind: str) -> List[str]:
        return sorted((v.id for v in self.vertices.values() if v.kind == kind), key=natural_key)

    def real_edges(self) -> List[Edge]:
        return [self.edges[e] for e in sorted(self.edges, key=natural_key)
                if not self.edges[e].is_tether]

    def tethers(self) -> List[Edge]:
        return [self.edges[e] for e in sorted(self.edges, key=natural_key)
                if self.edges[e].is_tether]

    def labels(self) -> List[int]:
        return sorted({e.label for e in self.real_edges()})

    @property
    def is_empty(self) -> bool:
        return not self.vertices

    # -- global structure ---------------------------------------------------

    @cached_property
    def components(self) -> List[Tuple[str, ...]]:
        """Connected components over real edges, each a sorted vertex tuple."""
        parent = {v: v for v in self.vertices}

        def find(x: str) -> str:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for edge in self.real_edges():
            a = find(self.darts[edge.tail].vertex)
            b = find(self.darts[edge.head].vertex)
            if a != b:
                parent[a] = b
        groups: Dict[str, List[str]] = {}
        for v in self.vertices:
            groups.setdefault(find(v), []).append(v)
        comps = [tuple(sorted(vs, key=natural_key)) for vs in groups.values()]
        return sorted(comps, key=lambda c: natural_key(c[0]))

    def component_of(self, vertex_id: str) -> Tuple[str, ...]:
        for comp in self.components:
            if vertex_id in comp:
                return comp
        raise DanglingReference(f"unknown vertex '{vertex_id}'")

    @cached_property
    def _face_index(self) -> Tuple[List[Face], Dict[str, int]]:
        if not self.darts:
            return [Face(ROOT_FACE, ())], {}
        index: Dict[str, int] = {}
        orbits: List[List[str]] = []
        for start in sorted(self.darts, key=natural_key):
            if start in index:
                continue
            orbit = []
            d = start
            while d not in index:
                index[d] = len(orbits)
                orbit.append(d)
                d = self.phi(d)
            orbits.append(orbit)
        faces = []
        for orbit in orbits:
            real = [d for d in orbit if not self.is_tether(d)]
            key = min(real or orbit, key=natural_key)
            hosted = sorted({self.component_of(self.darts[self.edge_of(d).head].vertex)[0]
                             for d in orbit
                             if self.is_tether(d) and self.edge_of(d).tail == d},
                            key=natural_key)
            faces.append(Face(key, tuple(real), tuple(hosted)))
        return faces, index

    @property
    def face_list(self) -> List[Face]:
        return self._face_index[0]

    def face_of(self, dart: str) -> Face:
        """The face on the right of a dart's edge when leaving its vertex."""
        faces, index = self._face_index
        return faces[index[dart]]

    def face_by_key(self, key: str) -> Face:
        for face in self.face_list:
            if face.key == key:
                return face
        raise DanglingReference(f"unknown face '{key}'")

    @property
    def infinity_face(self) -> Face:
        if self.infinity is not None:
            return self.face_of(self.infinity)
        root = self.root_component
        if root is None:
            return self.face_list[0]
        return self.face_of(self.vertices[root[0]].rotation[0])

    @cached_property
    def root_component(self) -> Optional[Tuple[str, ...]]:
        """The component no tether points into."""
        if not self.components:
            return None
        children = {self.component_of(self.darts[t.head].vertex) for t in self.tethers()}
        for comp in self.components:
            if comp not in children:
                return comp
        return self.components[0]

    def placement(self) -> Dict[str, Tuple[str, str]]:
        """Map child component root -> (via dart, host dart) read from tethers."""
        placed = {}
        for tether in self.tethers():
            host = self._next_real(tether.tail)
            via = self._next_real(tether.head)
            child = self.component_of(self.darts[tether.head].vertex)[0]
            placed[child] = (via, host)
        return placed

    def _next_real(self, dart: str) -> str:
        d = self.sigma(dart)
        while self.is_tether(d) and d != dart:
            d = self.sigma(d)
        return d

    @cached_property
    def fingerprint(self) -> str:
        """Content hash used to detect stale move sites."""
        parts = [f"n={self.degree_n};inf={self.infinity}"]
        for vid in sorted(self.vertices, key=natural_key):
            v = self.vertices[vid]
            parts.append(f"{v.kind}:{vid}:{','.join(v.rotation)}")
        for eid in sorted(self.edges, key=natural_key):
            e = self.edges[eid]
            parts.append(f"e:{eid}:{e.label}:{e.tail}:{e.head}")
        return hashlib.sha1('\n'.join(parts).encode('utf-8')).hexdigest()

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Chart) and self.fingerprint == other.fingerprint

    def __hash__(self) -> int:
        return hash(self.fingerprint)

    def __repr__(self) -> str:
        return (f"Chart(n={self.degree_n}, vertices={len(self.vertices)}, "
                f"edges={len(self.real_edges())}, components={len(self.components)})")

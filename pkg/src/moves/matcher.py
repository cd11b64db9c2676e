"""
Move Site Module
Discovery of before-pattern embeddings in a chart.
"""

import itertools
import logging
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Set, Tuple

from chart.model import PHANTOM, ROOT_FACE, Chart, natural_key
from moves.template import MoveTemplate, Pattern, Region, is_leg, leg_index, regions

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MoveSite:
    """
    One embedding of a template variant. Ports and arcs of the before pattern
    map to chart darts and edges; `far` lists, per leg, the dart outside the
    rewrite disk where the leg's edge ends.
    """
    template: MoveTemplate
    binding: Tuple[Tuple[str, int], ...]
    ports: Tuple[Tuple[str, str], ...]
    vertices: Tuple[Tuple[str, str], ...]
    arcs: Tuple[Tuple[str, str], ...]
    far: Tuple[str, ...]
    host: Optional[str]
    disk: Tuple[str, ...]
    fingerprint: str

    @property
    def embedding(self) -> Dict[str, str]:
        mapping = dict(self.vertices)
        mapping.update(self.ports)
        mapping.update(self.arcs)
        return mapping

    @property
    def labels(self) -> Dict[str, int]:
        return dict(self.binding)

    def touched_vertices(self) -> Tuple[str, ...]:
        return tuple(sorted({v for _, v in self.vertices}, key=natural_key))

    def touched_edges(self, chart: Chart) -> List[str]:
        edges = {e for _, e in self.arcs}
        edges.update(chart.darts[d].edge for _, d in self.ports)
        return sorted(edges, key=natural_key)

    def describe(self) -> str:
        labels = ','.join(f"{k}={v}" for k, v in self.binding)
        if self.host is not None or not (self.vertices or self.arcs):
            where = f"face({self.host})" if self.host else ROOT_FACE
            return f"{self.template.key}[{self.template.variant}] {labels} in {where}"
        items = [v for _, v in self.vertices] + [e for _, e in self.arcs]
        return f"{self.template.key}[{self.template.variant}] {labels} at {','.join(items)}"


def face_orbit(chart: Chart, dart: str) -> List[str]:
    """Full phi orbit of a dart, tethers included."""
    orbit, d = [], dart
    while True:
        orbit.append(d)
        d = chart.phi(d)
        if d == dart:
            return orbit


def _cyclically_ordered(positions: List[int]) -> bool:
    drops = sum(1 for a, b in zip(positions, positions[1:] + positions[:1]) if b <= a)
    return drops <= 1


def _interleaved(a: Set[int], b: Set[int]) -> bool:
    marks = sorted([(p, 0) for p in a] + [(p, 1) for p in b])
    changes = sum(1 for x, y in zip(marks, marks[1:] + marks[:1]) if x[1] != y[1])
    return changes > 2


class SiteFinder:
    """Enumerates the embeddings of one template variant into one chart."""

    def __init__(self, chart: Chart, template: MoveTemplate):
        self.chart = chart
        self.template = template
        self.pattern: Pattern = template.before
        self.regions: List[Region] = regions(self.pattern, len(template.legs))
        self.port_edge = self.pattern.port_edge()
        self.owner = self.pattern.port_vertex()

    def sites(self) -> Iterator[MoveSite]:
        if self.pattern.is_empty:
            yield from self._face_sites()
            return
        for ports, vertices, binding in self._piece_embeddings(self.pattern.pieces(), {}, {}, {}):
            used_vertices = set(vertices.values())
            far = self._leg_far_darts(ports, used_vertices)
            if far is None:
                continue
            for arcs, arc_binding in self._arc_embeddings(self.pattern.arcs(), used_vertices,
                                                          dict(binding), far):
                full_far = dict(far)
                for pe_id, ce_id in arcs.items():
                    pe, ce = self.pattern.edges[pe_id], self.chart.edges[ce_id]
                    full_far[leg_index(pe.tail)] = ce.tail
                    full_far[leg_index(pe.head)] = ce.head
                if not self._legs_hold(full_far, arc_binding):
                    continue
                if not self.template.label_holds(arc_binding):
                    continue
                disk = self._regions_hold(ports, full_far)
                if disk is None:
                    continue
                yield from self._complete(ports, vertices, arcs, full_far, arc_binding, None, disk)

    # -- births -----------------------------------------------------------------

    def _face_sites(self) -> Iterator[MoveSite]:
        chart = self.chart
        if chart.is_empty:
            yield from self._complete({}, {}, {}, {}, {}, None, (ROOT_FACE,))
            return
        for face in chart.face_list:
            if face.darts:
                yield from self._complete({}, {}, {}, {}, {}, face.key, (face.key,))

    def _complete(self, ports, vertices, arcs, far, binding, host, disk) -> Iterator[MoveSite]:
        """Bind variables used only by the after pattern and emit sites."""
        free = [v for v in self.template.variables if v not in binding]
        choices = range(1, self.chart.degree_n)
        for values in itertools.product(choices, repeat=len(free)):
            full = dict(binding)
            full.update(zip(free, values))
            if not self.template.label_holds(full):
                continue
            yield MoveSite(
                template=self.template,
                binding=tuple(sorted(full.items())),
                ports=tuple(sorted(ports.items())),
                vertices=tuple(sorted(vertices.items())),
                arcs=tuple(sorted(arcs.items())),
                far=tuple(far[k] for k in range(len(self.template.legs))),
                host=host,
                disk=tuple(disk),
                fingerprint=self.chart.fingerprint,
            )

    # -- pieces -----------------------------------------------------------------

    def _bind(self, binding: Dict[str, int], var: str, value: int) -> bool:
        if var.isdigit():
            return int(var) == value
        if binding.setdefault(var, value) != value:
            return False
        return True

    def _piece_embeddings(self, pieces, ports, vertices, binding):
        if not pieces:
            yield dict(ports), dict(vertices), dict(binding)
            return
        piece, rest = pieces[0], pieces[1:]
        anchor = self.pattern.vertices[piece[0]]
        for vid in self.chart.vertices_of_kind(anchor.kind):
            if vid in vertices.values():
                continue
            rotation = self.chart.real_rotation(vid)
            if len(rotation) != len(anchor.ports):
                continue
            for offset in range(len(rotation)):
                trial_ports, trial_vertices, trial_binding = dict(ports), dict(vertices), dict(binding)
                if self._grow(piece[0], vid, offset, trial_ports, trial_vertices, trial_binding):
                    yield from self._piece_embeddings(rest, trial_ports, trial_vertices, trial_binding)

    def _grow(self, pv: str, cv: str, offset: int, ports, vertices, binding) -> bool:
        chart = self.chart
        stack = [(pv, cv, offset)]
        while stack:
            pv, cv, offset = stack.pop()
            if pv in vertices:
                if vertices[pv] != cv:
                    return False
                continue
            if cv in vertices.values():
                return False
            pattern_vertex = self.pattern.vertices[pv]
            rotation = chart.real_rotation(cv)
            if chart.vertices[cv].kind != pattern_vertex.kind or len(rotation) != len(pattern_vertex.ports):
                return False
            vertices[pv] = cv
            for i, port in enumerate(pattern_vertex.ports):
                dart = rotation[(i + offset) % len(rotation)]
                if ports.get(port, dart) != dart:
                    return False
                ports[port] = dart
                edge = self.port_edge[port]
                if chart.direction(dart) != self.pattern.direction(port):
                    return False
                if not self._bind(binding, edge.label, chart.label(dart)):
                    return False
                other = self.pattern.twin(port)
                if is_leg(other):
                    continue
                twin = chart.twin(dart)
                if ports.get(other, twin) != twin:
                    return False
                ports[other] = twin
                ov = self.owner[other]
                o_rotation = chart.real_rotation(chart.darts[twin].vertex)
                if twin not in o_rotation:
                    return False
                o_offset = (o_rotation.index(twin) - self.pattern.vertices[ov].ports.index(other)) % len(o_rotation)
                stack.append((ov, chart.darts[twin].vertex, o_offset))
        return True

    def _leg_far_darts(self, ports: Dict[str, str], used: Set[str]) -> Optional[Dict[int, str]]:
        far = {}
        for port, dart in ports.items():
            other = self.pattern.twin(port)
            if not is_leg(other):
                continue
            outside = self.chart.twin(dart)
            if self.chart.darts[outside].vertex in used:
                return None
            far[leg_index(other)] = outside
        return far

    # -- arcs -------------------------------------------------------------------

    def _is_hoop(self, edge) -> bool:
        vid = self.chart.darts[edge.tail].vertex
        return vid == self.chart.darts[edge.head].vertex and self.chart.vertices[vid].kind == PHANTOM

    def _arc_embeddings(self, arcs, used_vertices, binding, far):
        if not arcs:
            yield {}, binding
            return
        first, rest = arcs[0], arcs[1:]
        taken = set(far.values())
        for edge in self.chart.real_edges():
            if edge.tail in taken or edge.head in taken:
                continue
            if self.chart.darts[edge.tail].vertex in used_vertices:
                continue
            if self.chart.darts[edge.head].vertex in used_vertices:
                continue
            if first.id in self.template.open_arcs and self._is_hoop(edge):
                continue
            trial = dict(binding)
            if not self._bind(trial, first.label, edge.label):
                continue
            more_far = dict(far)
            more_far[leg_index(first.tail)] = edge.tail
            more_far[leg_index(first.head)] = edge.head
            for others, final in self._arc_embeddings(rest, used_vertices, trial, more_far):
                if edge.id in others.values():
                    continue
                found = dict(others)
                found[first.id] = edge.id
                yield found, final

    def _legs_hold(self, far: Dict[int, str], binding: Dict[str, int]) -> bool:
        for leg in self.template.legs:
            dart = far.get(leg.index)
            if dart is None:
                return False
            if leg.label in binding and self.chart.label(dart) != binding[leg.label]:
                return False
        return len(set(far.values())) == len(far)

    # -- regions ----------------------------------------------------------------

    def _regions_hold(self, ports: Dict[str, str], far: Dict[int, str]) -> Optional[Tuple[str, ...]]:
        """
        Every region of the rewrite disk lies in one chart face, meets it in the
        same cyclic order, and regions sharing a face do not interleave. Closed
        regions must be whole faces holding nothing else.
        """
        chart = self.chart
        orbits: Dict[str, List[str]] = {}
        by_face: Dict[str, List[Set[int]]] = {}
        touched = []
        for region in self.regions:
            darts = [far[leg_index(s)] if is_leg(s) else ports[s] for s in region.sides]
            keys = {chart.face_of(d).key for d in darts}
            if len(keys) != 1:
                return None
            key = keys.pop()
            if key not in orbits:
                orbits[key] = face_orbit(chart, darts[0])
            orbit = orbits[key]
            if region.closed:
                if len(orbit) != len(darts) or set(orbit) != set(darts):
                    return None
                if chart.infinity_face.key == key:
                    return None
            position = {d: i for i, d in enumerate(orbit)}
            spots = [position[d] for d in darts]
            if not _cyclically_ordered(spots):
                return None
            for other in by_face.get(key, []):
                if _interleaved(set(spots), other):
                    return None
            by_face.setdefault(key, []).append(set(spots))
            touched.append(key)
        return tuple(sorted(set(touched), key=natural_key))


def find_sites(chart: Chart, template: MoveTemplate, dedupe: bool = True) -> List[MoveSite]:
    """
    All sites of a template in a chart, over its mirror and reversed variants.
    With `dedupe`, embeddings that yield the same resulting chart on the same
    chart elements are reported once.
    """
    from chart.isomorphism import canonical_code
    from moves.engine import rewrite
    from moves.template import variants

    found: List[MoveSite] = []
    seen = set()
    for variant in variants(template):
        for site in SiteFinder(chart, variant).sites():
            if dedupe:
                key = (site.touched_vertices(), tuple(site.touched_edges(chart)), site.host,
                       canonical_code(rewrite(chart, site), with_infinity=True))
                if key in seen:
                    continue
                seen.add(key)
            found.append(site)
    logger.debug("%s: %d sites", template.key, len(found))
    return found

"""
Move Engine Module
Application of move sites, black-vertex pushes and bounded reduction search.
"""

import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Set, Tuple, Union

from chart.analysis import complexity
from chart.isomorphism import canonical_code
from chart.model import (BLACK, CROSSING, PHANTOM, TETHER_LABEL, WHITE, Chart, Edge, Vertex,
                         natural_key)
from chart.validator import validate
from common.errors import BlockedPath, InvalidResult, StaleSite
from features.strands import HOOP, TERMINAL, Strand, all_strands
from moves.matcher import MoveSite, find_sites
from moves.template import MoveTemplate, is_leg, leg_index

logger = logging.getLogger(__name__)


class _Workspace:
    """Mutable copy of a chart's rotation system used while splicing."""

    def __init__(self, chart: Chart):
        self.degree_n = chart.degree_n
        self.kinds: Dict[str, str] = {vid: v.kind for vid, v in chart.vertices.items()}
        self.rotation: Dict[str, List[str]] = {vid: list(v.rotation) for vid, v in chart.vertices.items()}
        self.edges: Dict[str, Edge] = dict(chart.edges)
        self.owner: Dict[str, str] = {d: dart.vertex for d, dart in chart.darts.items()}
        self.edge_of: Dict[str, str] = {d: dart.edge for d, dart in chart.darts.items()}
        self.infinity = chart.infinity
        self._taken: Set[str] = set(self.kinds) | set(self.edges) | set(self.owner)
        self._counters: Dict[str, int] = {}

    def fresh(self, prefix: str) -> str:
        count = self._counters.get(prefix, 0)
        while f"{prefix}{count}" in self._taken:
            count += 1
        self._counters[prefix] = count + 1
        name = f"{prefix}{count}"
        self._taken.add(name)
        return name

    def is_tether(self, dart: str) -> bool:
        return self.edges[self.edge_of[dart]].is_tether

    def twin(self, dart: str) -> str:
        edge = self.edges[self.edge_of[dart]]
        return edge.head if edge.tail == dart else edge.tail

    def next_real(self, dart: str) -> str:
        rot = self.rotation[self.owner[dart]]
        i = rot.index(dart)
        for step in range(1, len(rot) + 1):
            d = rot[(i + step) % len(rot)]
            if not self.is_tether(d):
                return d
        return dart

    def insert(self, anchor: str, dart: str, after: bool = False) -> None:
        vid = self.owner[anchor]
        rot = self.rotation[vid]
        rot.insert(rot.index(anchor) + (1 if after else 0), dart)
        self.owner[dart] = vid

    def detach(self, dart: str) -> None:
        self.rotation[self.owner[dart]].remove(dart)
        del self.owner[dart]

    def add_vertex(self, kind: str, prefix: str, ports: Iterable[str]) -> str:
        vid = self.fresh(prefix)
        self.kinds[vid] = kind
        self.rotation[vid] = list(ports)
        for d in ports:
            self.owner[d] = vid
        return vid

    def add_edge(self, label: int, tail: str, head: str, prefix: str = 'e') -> str:
        eid = self.fresh('~t' if label == TETHER_LABEL else prefix)
        self.edges[eid] = Edge(eid, label, tail, head)
        self.edge_of[tail] = eid
        self.edge_of[head] = eid
        return eid

    def add_tether(self, host: str, child: str, child_after: bool = True) -> None:
        """Tether from the corner before `host` to the corner after (or before) `child`."""
        eid = self.fresh('~t')
        tail, head = f"{eid}a", f"{eid}b"
        self._taken.update((tail, head))
        self.insert(host, tail)
        self.insert(child, head, after=child_after)
        self.edges[eid] = Edge(eid, TETHER_LABEL, tail, head)
        self.edge_of[tail] = eid
        self.edge_of[head] = eid

    def drop_edge(self, eid: str) -> None:
        edge = self.edges.pop(eid)
        for d in (edge.tail, edge.head):
            self.edge_of.pop(d, None)

    def drop_vertex(self, vid: str) -> None:
        for d in self.rotation.pop(vid):
            self.owner.pop(d, None)
        del self.kinds[vid]

    def real_degree(self, vid: str) -> List[str]:
        return [d for d in self.rotation[vid] if not self.is_tether(d)]

    def build(self) -> Chart:
        vertices = {vid: Vertex(vid, self.kinds[vid], tuple(rot)) for vid, rot in self.rotation.items()}
        infinity = self.infinity if self.infinity in self.owner else None
        return Chart(self.degree_n, vertices, self.edges, infinity)

    def full_components(self) -> Dict[str, str]:
        """Vertex -> representative over all edges, tethers included."""
        parent = {v: v for v in self.kinds}

        def find(x: str) -> str:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for edge in self.edges.values():
            a, b = find(self.owner[edge.tail]), find(self.owner[edge.head])
            if a != b:
                parent[a] = b
        return {v: find(v) for v in self.kinds}


def _slide_tethers(ws: _Workspace, removed: Set[str]) -> None:
    """
    Move tether ends off vertices about to be removed, sliding each along the
    next real edge until it reaches a kept vertex. Sliding within a face is an
    isotopy of the placed component.
    """
    for vid in sorted(removed, key=natural_key):
        for dart in [d for d in ws.rotation[vid] if ws.is_tether(d)]:
            cur = ws.next_real(dart)
            hops = 0
            while ws.owner[ws.twin(cur)] in removed:
                cur = ws.next_real(ws.twin(cur))
                hops += 1
                if hops > len(ws.owner):
                    raise InvalidResult(f"no kept vertex reachable from '{vid}'")
            ws.detach(dart)
            ws.insert(ws.twin(cur), dart, after=True)


def _contract_isolated(ws: _Workspace, vid: str) -> None:
    """
    Remove a vertex whose component has no legs by contracting its first
    tether into the vertex at the other end.
    """
    tethers = [d for d in ws.rotation[vid] if ws.is_tether(d)]
    if not tethers:
        return
    first = tethers[0]
    other = ws.twin(first)
    rot = ws.rotation[vid]
    i = rot.index(first)
    moved = [d for d in rot[i + 1:] + rot[:i] if ws.is_tether(d)]
    target = ws.owner[other]
    trot = ws.rotation[target]
    j = trot.index(other)
    ws.rotation[target] = trot[:j] + moved + trot[j + 1:]
    for d in moved:
        ws.owner[d] = target
    ws.rotation[vid] = [d for d in rot if not ws.is_tether(d)]
    del ws.owner[other]
    ws.drop_edge(ws.edge_of[first])
    del ws.owner[first]


def _redirect_infinity(chart: Chart, ws: _Workspace, removed: Set[str]) -> None:
    if chart.infinity is None or chart.darts[chart.infinity].vertex not in removed:
        return
    d = chart.phi(chart.infinity)
    while d != chart.infinity:
        if not chart.is_tether(d) and chart.darts[d].vertex not in removed:
            ws.infinity = d
            return
        d = chart.phi(d)
    ws.infinity = None


def _merge_phantoms(ws: _Workspace) -> None:
    """Join the two edges through any phantom vertex that is not a hoop."""
    for vid in [v for v in ws.kinds if ws.kinds[v] == PHANTOM]:
        real = ws.real_degree(vid)
        if len(real) != 2 or ws.edge_of[real[0]] == ws.edge_of[real[1]]:
            continue
        edges = [ws.edges[ws.edge_of[d]] for d in real]
        into = next((e for e in edges if e.head in real), None)
        out = next((e for e in edges if e.tail in real), None)
        if into is None or out is None or into is out:
            continue
        pa, pb = out.tail, into.head
        rot = ws.rotation[vid]
        ia, ib = rot.index(pa), rot.index(pb)
        left = [rot[(ia + s) % len(rot)] for s in range(1, (ib - ia) % len(rot))]
        right = [rot[(ib + s) % len(rot)] for s in range(1, (ia - ib) % len(rot))]
        if ws.infinity == pa:
            ws.infinity = into.tail
        elif ws.infinity == pb:
            ws.infinity = out.head
        ws.drop_edge(into.id)
        ws.drop_edge(out.id)
        ws.drop_vertex(vid)
        ws.add_edge(into.label, into.tail, out.head)
        for d in left:
            ws.insert(out.head, d)
        for d in right:
            ws.insert(into.tail, d)


def _reconnect(ws: _Workspace, far: Tuple[str, ...]) -> None:
    """Tether pieces that the rewrite separated, across consecutive legs."""
    count = len(far)
    if count < 2:
        return
    groups = ws.full_components()
    parent = {g: g for g in set(groups.values())}

    def find(x: str) -> str:
        while parent[x] != x:
            x = parent[x]
        return x

    for k in range(count):
        here, there = far[k], far[(k + 1) % count]
        a, b = find(groups[ws.owner[here]]), find(groups[ws.owner[there]])
        if a == b:
            continue
        # the boundary stretch between two consecutive legs lies right of the
        # first leg's far dart and left of the second's
        ws.add_tether(here, there, child_after=True)
        parent[b] = a


def _prune_tethers(ws: _Workspace) -> None:
    """Drop tethers that close a cycle; their two sides are different faces."""
    while True:
        chart = ws.build()
        if len(chart.tethers()) <= max(len(chart.components) - 1, 0):
            return
        redundant = next((t for t in chart.tethers()
                          if chart.face_of(t.tail).key != chart.face_of(t.head).key), None)
        if redundant is None:
            raise InvalidResult("surplus tether with no cycle to break")
        ws.detach(redundant.tail)
        ws.detach(redundant.head)
        ws.drop_edge(redundant.id)


def _orient_tethers(ws: _Workspace, root_hint: Iterable[str]) -> None:
    """Point every tether away from the root component."""
    chart = ws.build()
    if not chart.components:
        return
    root = next((chart.component_of(v) for v in root_hint if v in chart.vertices), chart.components[0])
    seen = {root}
    queue = deque([root])
    while queue:
        comp = queue.popleft()
        for tether in chart.tethers():
            a = chart.component_of(chart.darts[tether.tail].vertex)
            b = chart.component_of(chart.darts[tether.head].vertex)
            if comp not in (a, b):
                continue
            other = b if a == comp else a
            if other in seen:
                continue
            if b == comp:
                ws.edges[tether.id] = Edge(tether.id, TETHER_LABEL, tether.head, tether.tail)
            seen.add(other)
            queue.append(other)


def rewrite(chart: Chart, site: MoveSite) -> Chart:
    """
    Splice the site's after fragment into the chart, unchecked.

    Raises:
        StaleSite: the site was found on a different chart value
    """
    if site.fingerprint != chart.fingerprint:
        raise StaleSite(f"site {site.describe()} does not belong to this chart")
    template = site.template
    labels = site.labels
    ws = _Workspace(chart)
    removed = set(site.touched_vertices())
    root_hint = [v for v in (chart.root_component or ()) if v not in removed]

    pattern = template.before
    owner = pattern.port_vertex()
    vertex_map = dict(site.vertices)
    legless = {vertex_map[v] for piece in pattern.pieces()
               if not any(is_leg(pattern.twin(p)) for v in piece for p in pattern.vertices[v].ports)
               for v in piece}
    _redirect_infinity(chart, ws, removed)
    for vid in sorted(legless, key=natural_key):
        _contract_isolated(ws, vid)
    _slide_tethers(ws, removed - legless)

    doomed_edges = set(site.touched_edges(chart))
    for eid in sorted(doomed_edges, key=natural_key):
        ws.drop_edge(eid)
    for vid in removed:
        ws.drop_vertex(vid)

    after = template.after
    port_dart: Dict[str, str] = {}
    for pv in after.vertices.values():
        darts = [ws.fresh('d') for _ in pv.ports]
        port_dart.update(zip(pv.ports, darts))
        prefix = {WHITE: 'w', CROSSING: 'x', BLACK: 'k', PHANTOM: 'p'}[pv.kind]
        ws.add_vertex(pv.kind, prefix, darts)

    def resolve(end: str) -> str:
        return site.far[leg_index(end)] if is_leg(end) else port_dart[end]

    for pe in after.edges.values():
        ws.add_edge(labels[pe.label] if not pe.label.isdigit() else int(pe.label),
                    resolve(pe.tail), resolve(pe.head))

    legless_after = [piece for piece in after.pieces()
                     if not any(is_leg(after.twin(p)) for v in piece for p in after.vertices[v].ports)]
    for piece in legless_after:
        outer = after.outer or after.vertices[piece[0]].ports[0]
        if site.host is not None:
            ws.add_tether(site.host, port_dart[outer], child_after=False)

    _reconnect(ws, site.far)
    _merge_phantoms(ws)
    _prune_tethers(ws)
    _orient_tethers(ws, root_hint)
    result = ws.build()
    logger.debug("rewrote %s: %r -> %r", site.describe(), chart, result)
    return result


@dataclass
class Counts:
    w: int
    f: int
    hoops: int
    crossings: int

    @classmethod
    def of(cls, chart: Chart) -> 'Counts':
        strands = all_strands(chart)
        return cls(len(chart.vertices_of_kind(WHITE)), -complexity(chart)[1],
                   sum(1 for s in strands if s.strand_class == HOOP),
                   len(chart.vertices_of_kind(CROSSING)))

    def delta(self, other: 'Counts') -> Dict[str, int]:
        return {'w': other.w - self.w, 'f': other.f - self.f,
                'hoops': other.hoops - self.hoops, 'crossings': other.crossings - self.crossings}


def apply(chart: Chart, site: MoveSite) -> Chart:
    """
    Apply a move site, returning a new chart.

    Raises:
        StaleSite: the site was found on a different chart value
        InvalidResult: the result is not a valid chart or breaks the declared effect
    """
    result = rewrite(chart, site)
    report = validate(result)
    if not report.ok:
        raise InvalidResult(f"{site.describe()} produced an invalid chart: "
                            f"{report.violations[0].rule}: {report.violations[0].message}")
    delta = Counts.of(chart).delta(Counts.of(result))
    for key, declared in site.template.effect.as_dict().items():
        if declared is not None and delta[key] != declared:
            raise InvalidResult(f"{site.describe()} changed {key} by {delta[key]}, declared {declared}")
    logger.info("applied %s (%s)", site.describe(),
                ', '.join(f"{k}{v:+d}" for k, v in delta.items() if v))
    return result


def move_black_along(chart: Chart, terminal: Union[Strand, str], path: List[str],
                     push: Optional[MoveTemplate] = None) -> Chart:
    """
    Push the black vertex of a terminal edge across each listed edge in turn.

    Args:
        chart: Chart to modify
        terminal: The terminal strand, or its black vertex id
        path: Ids of the edges to cross, in order
        push: The black-vertex push template (the built-in one by default)

    Raises:
        BlockedPath: an edge's label is within one of the terminal's label, or
            the black vertex is not next to the edge
    """
    from moves.template import template_library

    push = push or next(t for t in template_library(with_inverses=False).values() if t.family == 'C-II')
    if isinstance(terminal, Strand):
        if terminal.strand_class != TERMINAL:
            raise BlockedPath(f"strand {terminal.id} is not a terminal edge")
        black = next(v for v in terminal.endpoints if chart.vertices[v].kind == BLACK)
    else:
        black = terminal
    current = chart
    for eid in path:
        if eid not in current.edges:
            raise BlockedPath(f"edge '{eid}' is not in the chart")
        label = current.label(current.real_rotation(black)[0])
        other = current.edges[eid].label
        if abs(label - other) <= 1:
            raise BlockedPath(f"edge '{eid}' has label {other}, too close to {label}")
        site = next((s for s in find_sites(current, push, dedupe=False)
                     if s.touched_vertices() == (black,) and eid in dict(s.arcs).values()), None)
        if site is None:
            raise BlockedPath(f"black vertex '{black}' does not face edge '{eid}'")
        before = set(current.vertices)
        current = apply(current, site)
        black = next(v for v in current.vertices_of_kind(BLACK) if v not in before)
        logger.debug("pushed black vertex across %s, now %s", eid, black)
    return current


@dataclass
class ReductionResult:
    found: bool
    steps: List[str] = field(default_factory=list)
    chart: Optional[Chart] = None
    states: int = 0


def search_reductions(chart: Chart, templates: Iterable[MoveTemplate], bound: int = 2,
                      max_states: int = 5000) -> ReductionResult:
    """
    Breadth-first search for a move sequence of length at most `bound` that
    lowers (w, -f). Finding one shows the chart is not minimal; finding none
    proves nothing.
    """
    templates = list(templates)
    start = complexity(chart)
    seen = {canonical_code(chart)}
    queue = deque([(chart, [])])
    states = 1
    while queue:
        current, steps = queue.popleft()
        if len(steps) >= bound:
            continue
        for template in templates:
            for site in find_sites(current, template):
                try:
                    nxt = apply(current, site)
                except InvalidResult as e:
                    logger.warning("skipping site: %s", e)
                    continue
                code = canonical_code(nxt)
                if code in seen:
                    continue
                seen.add(code)
                states += 1
                trail = steps + [site.describe()]
                if complexity(nxt) < start:
                    logger.info("complexity %s -> %s in %d steps", start, complexity(nxt), len(trail))
                    return ReductionResult(True, trail, nxt, states)
                if states >= max_states:
                    logger.warning("reduction search stopped at %d states", states)
                    return ReductionResult(False, [], None, states)
                queue.append((nxt, trail))
    return ReductionResult(False, [], None, states)

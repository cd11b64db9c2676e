"""
Disks Module
Complementary disks of a label component, feelers, specialness and local complexity.
"""

import hashlib
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Set, Tuple

from chart.analysis import region_classes
from chart.model import OUTWARD, WHITE, Chart, natural_key
from common.errors import NotCellular
from features.strands import (TERMINAL, Strand, StrandComponent, label_darts_at,
                              middle_darts, strand_index, strands)

logger = logging.getLogger(__name__)

BOTH_IN = 'both_in'
BOTH_OUT = 'both_out'
MIXED = 'mixed'


@dataclass(frozen=True)
class DiskRegion:
    """
    One complementary region of a label-m component.

    `walk` is the full boundary walk (leaving darts); `boundary` keeps the
    (strand, vertex) segments that remain after pendant trees are pruned.
    """
    id: str
    label_m: int
    faces: Tuple[str, ...]
    walk: Tuple[str, ...]
    boundary: Tuple[Tuple[str, str], ...]
    boundary_whites: Tuple[str, ...]
    angled_k: int
    feeler_ids: Tuple[str, ...] = ()
    pendant_vertices: Tuple[str, ...] = ()
    simple: bool = True
    core_walk: Tuple[str, ...] = ()


@dataclass(frozen=True)
class CornerDart:
    """A dart of the neighbouring label sitting in a boundary corner of a disk."""
    direction: str
    middle: bool


@dataclass(frozen=True)
class DiskFacts:
    """The disk features the lower-bound rules are stated in."""
    disk_id: str
    angled_k: int
    simple: bool
    feelers: int
    terminal_feelers: int
    directed: bool
    outside: Optional[str]
    corner_darts: Tuple[CornerDart, ...] = ()
    interior_whites: Optional[int] = None
    lens: bool = False

    @property
    def special(self) -> bool:
        return self.feelers == self.terminal_feelers


@dataclass(frozen=True)
class LocalComplexity:
    w_int: int
    c_boundary: int


def disk_id(label: int, walk: Tuple[str, ...]) -> str:
    """Stable identifier from the boundary walk, independent of its start."""
    i = walk.index(min(walk, key=natural_key))
    rotated = walk[i:] + walk[:i]
    digest = hashlib.sha1(f"{label}|{','.join(rotated)}".encode('utf-8')).hexdigest()
    return f"disk-{digest[:10]}"


class StrandGraph:
    """
    The embedded graph of one Gamma_m component: whites and blacks as vertices,
    strands as edges, rotations inherited from the chart.
    """

    def __init__(self, chart: Chart, component: StrandComponent, strand_list: List[Strand]):
        self.chart = chart
        self.component = component
        self.label = component.label
        by_id = {s.id: s for s in strand_list}
        self.strands = [by_id[sid] for sid in component.strands]
        self.index = strand_index(self.strands)
        self.vertices = list(component.whites) + list(component.blacks)
        self.end_darts = {d for s in self.strands for d in s.end_darts}

    def rotation(self, vertex_id: str) -> List[str]:
        if self.chart.vertices[vertex_id].kind == WHITE:
            return label_darts_at(self.chart, vertex_id, self.label)
        return [d for d in self.chart.real_rotation(vertex_id) if d in self.end_darts]

    def twin(self, dart: str) -> str:
        return self.index[dart].other_end(dart)[1]

    def phi(self, dart: str) -> str:
        t = self.twin(dart)
        rot = self.rotation(self.chart.darts[t].vertex)
        return rot[(rot.index(t) + 1) % len(rot)]

    def orbits(self) -> List[List[str]]:
        seen: Set[str] = set()
        result = []
        for start in sorted(self.end_darts, key=natural_key):
            if start in seen:
                continue
            orbit, d = [], start
            while d not in seen:
                seen.add(d)
                orbit.append(d)
                d = self.phi(d)
            result.append(orbit)
        return result

    def is_connected(self) -> bool:
        if not self.vertices:
            return False
        adjacency: Dict[str, Set[str]] = {v: set() for v in self.vertices}
        for s in self.strands:
            a, b = s.endpoints
            adjacency[a].add(b)
            adjacency[b].add(a)
        stack, seen = [self.vertices[0]], {self.vertices[0]}
        while stack:
            for u in adjacency[stack.pop()]:
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        return len(seen) == len(self.vertices)

    def pendant_side(self, strand: Strand) -> Optional[Set[str]]:
        """
        Vertices cut off by a bridge strand when that side is a tree, else None.
        """
        adjacency: Dict[str, List[Tuple[str, str]]] = {v: [] for v in self.vertices}
        for s in self.strands:
            if s.id == strand.id:
                continue
            a, b = s.endpoints
            adjacency[a].append((b, s.id))
            adjacency[b].append((a, s.id))
        sides = []
        for root in strand.endpoints:
            seen, used = {root}, set()
            stack = [root]
            while stack:
                for u, sid in adjacency[stack.pop()]:
                    used.add(sid)
                    if u not in seen:
                        seen.add(u)
                        stack.append(u)
            sides.append((seen, used))
        (side_a, used_a), (side_b, used_b) = sides
        if side_a & side_b:
            return None
        tree_a = len(used_a) == len(side_a) - 1
        tree_b = len(used_b) == len(side_b) - 1
        if tree_a and tree_b:
            # the whole component is a tree; keep the side holding fewer whites
            whites_a = sum(1 for v in side_a if self.chart.vertices[v].kind == WHITE)
            whites_b = sum(1 for v in side_b if self.chart.vertices[v].kind == WHITE)
            return side_b if whites_b < whites_a or (whites_b == whites_a and len(side_b) <= len(side_a)) else side_a
        if tree_a:
            return side_a
        if tree_b:
            return side_b
        return None


def complementary_disks(chart: Chart, component: StrandComponent,
                        strand_list: Optional[List[Strand]] = None) -> List[DiskRegion]:
    """
    The closures of the complementary regions of a Gamma_m component.

    Raises:
        NotCellular: when the component is empty or disconnected
    """
    strand_list = strand_list if strand_list is not None else strands(chart, component.label)
    members = [s for s in strand_list if s.id in set(component.strands)]
    if not members:
        raise NotCellular("component has no strands")
    boundary_edges = {e for s in members for e in s.edges}
    classes = region_classes(chart, boundary_edges)

    if len(members) == 1 and members[0].closed:
        return _closed_curve_disks(chart, members[0], classes)

    graph = StrandGraph(chart, component, strand_list)
    if not graph.is_connected():
        raise NotCellular(f"label {component.label} component is not connected")

    disks = []
    for orbit in graph.orbits():
        rep = classes[chart.face_of(orbit[0]).key]
        faces = tuple(sorted((k for k, r in classes.items() if r == rep), key=natural_key))
        disks.append(_disk_from_orbit(chart, graph, orbit, faces))
    logger.debug("component %s: %d disks", component.strands[0], len(disks))
    return disks


def _closed_curve_disks(chart: Chart, strand: Strand, classes: Dict[str, str]) -> List[DiskRegion]:
    result = []
    d = strand.darts[0]
    for side_dart in (d, chart.twin(d)):
        rep = classes[chart.face_of(side_dart).key]
        faces = tuple(sorted((k for k, r in classes.items() if r == rep), key=natural_key))
        walk = (side_dart,)
        result.append(DiskRegion(disk_id(strand.label, walk), strand.label, faces, walk,
                                 ((strand.id, ''),), (), 0, core_walk=walk))
    return result


def _disk_from_orbit(chart: Chart, graph: StrandGraph, orbit: List[str],
                     faces: Tuple[str, ...]) -> DiskRegion:
    walk_strands = [graph.index[d] for d in orbit]
    counts: Dict[str, int] = {}
    for s in walk_strands:
        counts[s.id] = counts.get(s.id, 0) + 1
    pendant_strands: Set[str] = set()
    pendant_vertices: Set[str] = set()
    for s in walk_strands:
        if counts[s.id] == 2 and s.id not in pendant_strands:
            side = graph.pendant_side(s)
            if side is not None:
                pendant_vertices |= side
                pendant_strands.add(s.id)
    # strands inside a pruned tree are pendant too
    for s in walk_strands:
        if all(v in pendant_vertices for v in s.endpoints):
            pendant_strands.add(s.id)

    boundary = []
    core_walk = []
    whites: List[str] = []
    for d, s in zip(orbit, walk_strands):
        if s.id in pendant_strands:
            continue
        v = chart.darts[d].vertex
        boundary.append((s.id, v))
        core_walk.append(d)
        if chart.vertices[v].kind == WHITE and v not in whites:
            whites.append(v)
    feeler_ids = sorted({s.id for s in walk_strands if s.id in pendant_strands
                         and any(v in whites for v in s.endpoints)}, key=natural_key)
    visits = [v for _, v in boundary if chart.vertices[v].kind == WHITE]
    simple = len(visits) == len(set(visits)) and len({sid for sid, _ in boundary}) == len(boundary)
    walk = tuple(orbit)
    return DiskRegion(disk_id(graph.label, walk), graph.label, faces, walk, tuple(boundary),
                      tuple(whites), len(whites), tuple(feeler_ids),
                      tuple(sorted(pendant_vertices, key=natural_key)), simple, tuple(core_walk))


def feelers(chart: Chart, disk: DiskRegion,
            strand_list: Optional[List[Strand]] = None) -> List[Strand]:
    """Label-m strands at boundary whites that point into the disk."""
    strand_list = strand_list if strand_list is not None else strands(chart, disk.label_m)
    by_id = {s.id: s for s in strand_list}
    return [by_id[sid] for sid in disk.feeler_ids]


def is_special(chart: Chart, disk: DiskRegion,
               strand_list: Optional[List[Strand]] = None) -> bool:
    """True when every feeler is a terminal edge (vacuously true without feelers)."""
    return all(s.strand_class == TERMINAL for s in feelers(chart, disk, strand_list))


def interior_whites(chart: Chart, disk: DiskRegion) -> List[str]:
    faces = set(disk.faces)
    boundary = set(disk.boundary_whites)
    inside = []
    for white in chart.vertices_of_kind(WHITE):
        if white in boundary:
            continue
        if chart.face_of(chart.vertices[white].rotation[0]).key in faces:
            inside.append(white)
    return inside


def local_complexity(chart: Chart, disk: DiskRegion,
                     strand_list: Optional[List[Strand]] = None) -> LocalComplexity:
    """(w(interior), c(boundary)) by direct count."""
    strand_list = strand_list if strand_list is not None else strands(chart, disk.label_m)
    by_id = {s.id: s for s in strand_list}
    crossings = {c for sid, _ in disk.boundary if sid in by_id for c in by_id[sid].crossings}
    return LocalComplexity(len(interior_whites(chart, disk)), len(crossings))


def disk_facts(chart: Chart, disk: DiskRegion,
               strand_list: Optional[List[Strand]] = None,
               neighbour: Optional[int] = None) -> DiskFacts:
    """
    Collect the features the verification rules read: feelers, boundary
    direction, outside pattern of a 2-angled disk and the corner darts of the
    neighbouring label.

    Args:
        neighbour: Label whose darts count as corners; m+1 by default, or m-1
            when m is the top label
    """
    strand_list = strand_list if strand_list is not None else strands(chart, disk.label_m)
    found = feelers(chart, disk, strand_list)
    terminal = sum(1 for s in found if s.strand_class == TERMINAL)
    faces = set(disk.faces)

    walk_dirs = {chart.direction(d) for d in disk.core_walk}
    directed = bool(disk.core_walk) and disk.simple and len(walk_dirs) == 1

    outside = None
    if disk.angled_k == 2 and disk.simple and not found:
        boundary_ids = {sid for sid, _ in disk.boundary}
        index = strand_index(strand_list)
        dirs = []
        for white in disk.boundary_whites:
            third = [d for d in label_darts_at(chart, white, disk.label_m)
                     if index[d].id not in boundary_ids]
            if len(third) == 1:
                dirs.append(chart.direction(third[0]))
        if len(dirs) == 2:
            outside = MIXED if dirs[0] != dirs[1] else (BOTH_OUT if dirs[0] == OUTWARD else BOTH_IN)

    if neighbour is None:
        neighbour = disk.label_m + 1 if disk.label_m + 1 < chart.degree_n else disk.label_m - 1
    corners = []
    for white in disk.boundary_whites:
        middles = set(middle_darts(chart, white))
        for d in chart.real_rotation(white):
            if chart.label(d) == neighbour and chart.face_of(d).key in faces:
                corners.append(CornerDart(chart.direction(d), d in middles))
    return DiskFacts(disk.id, disk.angled_k, disk.simple, len(found), terminal, directed,
                     outside, tuple(corners), len(interior_whites(chart, disk)))

"""
Configuration Module
Verification branches of a candidate and the disk facts read off a template.
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Tuple

from catalog.template import FORWARD, T_BLACK, GraphTemplate, orientation_assignments
from chart.model import INWARD, OUTWARD
from regions.disks import BOTH_IN, BOTH_OUT, MIXED, CornerDart, DiskFacts, disk_id

logger = logging.getLogger(__name__)


@dataclass
class Branch:
    """
    One case of the exclusion argument: a full orientation of the candidate
    and the corner each collapsed terminal sits in.
    """
    candidate: str
    orientation: GraphTemplate
    placements: Dict[str, str]
    expanded: GraphTemplate
    disks: List[DiskFacts] = field(default_factory=list)

    @property
    def key(self) -> str:
        edges = ','.join(f"{eid}:{'f' if e.orient == FORWARD else 'b'}"
                         for eid, e in sorted(self.orientation.edges.items()))
        corners = ','.join(f"{bw}@{port}" for bw, port in sorted(self.placements.items()))
        return f"{edges}|{corners}"


def _corner_dart(t: GraphTemplate, port: str) -> CornerDart:
    """
    The neighbouring-label dart in the corner just before `port` at a white
    vertex. Around a white the neighbouring dart between two ports of the
    same direction shares it and is middle; otherwise it takes the direction
    of the lone port.
    """
    before = t.sigma_inv(port)
    d_before, d_port = t.direction(before), t.direction(port)
    if d_before == d_port:
        return CornerDart(d_port, True)
    dirs = [t.direction(p) for p in t.vertex_of(port).ports]
    lone = next(d for d in dirs if dirs.count(d) == 1)
    return CornerDart(lone, False)


def template_disks(t: GraphTemplate) -> List[DiskFacts]:
    """
    Disk facts of every face of an oriented template whose terminals are all
    explicit black vertices. Black vertices are feelers of the face they sit
    in; every feeler of a template is a terminal edge.
    """
    facts = []
    for orbit in t.faces():
        black_ports = [p for p in orbit if t.vertex_of(p).kind == T_BLACK]
        feeler_ends = {t.twin(p) for p in black_ports}
        core = [p for p in orbit if p not in black_ports and p not in feeler_ends]
        whites = [t.vertex_of(p).id for p in orbit if t.vertex_of(p).kind != T_BLACK]
        distinct = list(dict.fromkeys(whites))
        core_whites = [t.vertex_of(p).id for p in core]
        simple = len(core_whites) == len(set(core_whites))

        core_dirs = {t.direction(p) for p in core}
        directed = bool(core) and simple and len(core_dirs) == 1

        outside = None
        if len(distinct) == 2 and simple and not black_ports:
            dirs = []
            for white in distinct:
                in_orbit = {p for p in core if t.vertex_of(p).id == white}
                in_orbit |= {t.twin(p) for p in core if t.vertex_of(t.twin(p)).id == white}
                third = [p for p in t.vertices[white].ports if p not in in_orbit]
                if len(third) == 1:
                    dirs.append(t.direction(third[0]))
            if len(dirs) == 2:
                if dirs[0] != dirs[1]:
                    outside = MIXED
                else:
                    outside = BOTH_OUT if dirs[0] == OUTWARD else BOTH_IN

        corners = tuple(_corner_dart(t, p) for p in orbit if t.vertex_of(p).kind != T_BLACK)
        facts.append(DiskFacts(disk_id(0, tuple(orbit)), len(distinct), simple, len(black_ports),
                               len(black_ports), directed, outside, corners))
    return facts


def placement_options(t: GraphTemplate) -> List[Tuple[str, List[str]]]:
    """Each collapsed terminal with the ports it may be drawn just before."""
    return [(bw, list(t.vertices[bw].ports)) for bw in t.bw_ids()]


def expand_all(t: GraphTemplate, placements: Dict[str, str]) -> GraphTemplate:
    expanded = t
    for bw in t.bw_ids():
        expanded = expanded.expand_terminal(bw, placements[bw])
    return expanded


def branches(candidate: GraphTemplate,
             orientations: Optional[List[GraphTemplate]] = None) -> Iterator[Branch]:
    """
    Every orientation consistent at the white vertices crossed with every
    terminal placement.

    Args:
        candidate: Template, possibly partly oriented
        orientations: Orientations to use instead of all consistent ones

    Yields:
        Branch with its disk facts filled in
    """
    if orientations is None:
        orientations = list(orientation_assignments(candidate))
    options = placement_options(candidate)
    names = [bw for bw, _ in options]
    for oriented in orientations:
        for corners in itertools.product(*(ports for _, ports in options)):
            placements = dict(zip(names, corners))
            expanded = expand_all(oriented, placements)
            yield Branch(candidate.name, oriented, placements, expanded, template_disks(expanded))


def count_branches(candidate: GraphTemplate) -> int:
    orientations = sum(1 for _ in orientation_assignments(candidate))
    corners = 1
    for _, ports in placement_options(candidate):
        corners *= len(ports)
    return orientations * corners


def direction_word(direction: Optional[str]) -> str:
    return {INWARD: 'in', OUTWARD: 'out'}.get(direction, '?')

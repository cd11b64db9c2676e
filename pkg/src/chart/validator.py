"""
Chart Validator Module
Checks the chart conditions and the minimality assumptions, reporting every violation.
"""

import logging
from typing import Dict, List

from chart.analysis import region_classes, vertex_faces
from chart.model import (BLACK, CROSSING, DEGREES, INWARD, OUTWARD, PHANTOM, WHITE,
                         Chart, ValidationReport)

logger = logging.getLogger(__name__)


class ChartValidator:
    """
    Validates charts against the degree, label, white-vertex and crossing
    conditions plus the global embedding invariants.
    """

    def __init__(self, chart: Chart):
        self.chart = chart
        self.report = ValidationReport()

    def run(self) -> ValidationReport:
        self._check_degrees()
        self._check_labels()
        self._check_whites()
        self._check_crossings()
        self._check_phantoms()
        self._check_placement_tree()
        if not any(v.rule == 'placement_tree' for v in self.report.violations):
            self._check_faces()
        logger.debug("validation finished with %d violations", len(self.report.violations))
        return self.report

    def _check_degrees(self) -> None:
        for vid, vertex in self.chart.vertices.items():
            degree = len(self.chart.real_rotation(vid))
            if degree != DEGREES[vertex.kind]:
                self.report.add('degree', vid,
                                f"{vertex.kind} vertex has degree {degree}, expected {DEGREES[vertex.kind]}")

    def _check_labels(self) -> None:
        top = self.chart.degree_n - 1
        for edge in self.chart.real_edges():
            if not 1 <= edge.label <= top:
                self.report.add('label_range', edge.id, f"label {edge.label} outside 1..{top}")

    def _check_whites(self) -> None:
        for vid in self.chart.vertices_of_kind(WHITE):
            rot = self.chart.real_rotation(vid)
            if len(rot) != 6:
                continue
            labels = [self.chart.label(d) for d in rot]
            low = min(labels)
            expected_a = [low if i % 2 == 0 else low + 1 for i in range(6)]
            expected_b = [low + 1 if i % 2 == 0 else low for i in range(6)]
            if labels not in (expected_a, expected_b):
                self.report.add('white_condition', vid, f"labels {labels} do not alternate i, i+1")
            dirs = [self.chart.direction(d) for d in rot]
            if not _three_and_three(dirs):
                self.report.add('white_condition', vid,
                                f"directions {dirs} are not three consecutive inward and three outward")

    def _check_crossings(self) -> None:
        for vid in self.chart.vertices_of_kind(CROSSING):
            rot = self.chart.real_rotation(vid)
            if len(rot) != 4:
                continue
            for a, b in ((rot[0], rot[2]), (rot[1], rot[3])):
                if self.chart.label(a) != self.chart.label(b):
                    self.report.add('crossing_condition', vid, f"diagonal darts {a}, {b} differ in label")
                if self.chart.direction(a) == self.chart.direction(b):
                    self.report.add('crossing_condition', vid, f"diagonal darts {a}, {b} are not coherent")
            i, j = self.chart.label(rot[0]), self.chart.label(rot[1])
            if abs(i - j) <= 1:
                self.report.add('crossing_condition', vid, f"labels {i}, {j} differ by at most one")

    def _check_phantoms(self) -> None:
        for vid in self.chart.vertices_of_kind(PHANTOM):
            rot = self.chart.real_rotation(vid)
            if len(rot) == 2 and {self.chart.direction(d) for d in rot} != {INWARD, OUTWARD}:
                self.report.add('phantom', vid, "phantom vertex must pass one edge straight through")

    def _check_placement_tree(self) -> None:
        chart = self.chart
        components = chart.components
        tethers = chart.tethers()
        if components and len(tethers) != len(components) - 1:
            self.report.add('placement_tree', 'tethers',
                            f"{len(components)} components need {len(components) - 1} placements, found {len(tethers)}")
            return
        parent = {comp: comp for comp in components}

        def find(x):
            while parent[x] != x:
                x = parent[x]
            return x

        for tether in tethers:
            a = find(chart.component_of(chart.darts[tether.tail].vertex))
            b = find(chart.component_of(chart.darts[tether.head].vertex))
            if a == b:
                self.report.add('placement_tree', tether.id, "placement cycle")
                return
            parent[a] = b

    def _check_faces(self) -> None:
        chart = self.chart
        seen: Dict[str, int] = {}
        for face in chart.face_list:
            for d in face.darts:
                seen[d] = seen.get(d, 0) + 1
        real = [d for d in chart.darts if not chart.is_tether(d)]
        if any(seen.get(d, 0) != 1 for d in real):
            self.report.add('face_closure', 'faces', "some dart is not on exactly one face")
        vertices = len(chart.vertices)
        edges = len(chart.real_edges())
        face_count = len(chart.face_list)
        components = len(chart.components)
        if vertices - edges + face_count != 1 + components:
            self.report.add('euler', 'chart',
                            f"V - E + F = {vertices} - {edges} + {face_count} != 1 + {components}")


def _three_and_three(dirs: List[str]) -> bool:
    """Exactly three consecutive inward and three consecutive outward."""
    if dirs.count(INWARD) != 3:
        return False
    changes = sum(1 for i in range(6) if dirs[i] != dirs[i - 1])
    return changes == 2


def validate(chart: Chart) -> ValidationReport:
    """Report every violated chart condition; never raises."""
    return ChartValidator(chart).run()


def check_assumptions(chart: Chart) -> ValidationReport:
    """
    Report violations of the minimality assumptions:
    terminal edges are middle, no free edges or simple hoops, and every
    complementary domain of a ring or hoop holds a white vertex.
    """
    from features.strands import FREE, HOOP, RING, TERMINAL, all_strands, is_middle

    report = ValidationReport()
    for strand in all_strands(chart):
        if strand.strand_class == TERMINAL:
            white = next(v for v in strand.endpoints if chart.vertices[v].kind == WHITE)
            if not is_middle(chart, strand, white):
                report.add('terminal_middle', strand.id,
                           f"terminal edge is not middle at white vertex '{white}'")
        elif strand.strand_class == FREE:
            report.add('no_free_edge', strand.id, "free edge present")
        elif strand.strand_class in (HOOP, RING):
            counts = _white_counts_by_side(chart, strand.edges)
            if strand.strand_class == HOOP and min(counts) == 0:
                report.add('no_simple_hoop', strand.id, "simple hoop present")
            elif min(counts) == 0:
                report.add('domain_has_white', strand.id,
                           f"a complementary domain of the {strand.strand_class} has no white vertex")
    return report


def _white_counts_by_side(chart: Chart, boundary_edges) -> List[int]:
    """White vertices on each side of a closed curve made of `boundary_edges`."""
    classes = region_classes(chart, boundary_edges)
    counts: Dict[str, int] = {rep: 0 for rep in set(classes.values())}
    for white in chart.vertices_of_kind(WHITE):
        counts[classes[vertex_faces(chart, white)[0]]] += 1
    values = list(counts.values())
    return values if len(values) > 1 else values + [0]

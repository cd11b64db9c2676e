"""
Chart Isomorphism Module
Canonical codes for charts up to orientation-preserving homeomorphism of the sphere.
"""

import logging
from collections import deque
from typing import Dict, List, Optional, Set, Tuple

from chart.model import Chart

logger = logging.getLogger(__name__)


def _next_real(chart: Chart, dart: str) -> str:
    d = chart.sigma(dart)
    while chart.is_tether(d):
        d = chart.sigma(d)
    return d


class _ComponentCoder:
    """Breadth-first canonical numbering of one component's rotation system."""

    def __init__(self, chart: Chart, vertices: Tuple[str, ...]):
        self.chart = chart
        self.vertices = set(vertices)
        self.darts = [d for v in vertices for d in chart.real_rotation(v)]
        self.face_of = self._own_faces()

    def _own_faces(self) -> Dict[str, int]:
        chart = self.chart
        index: Dict[str, int] = {}
        count = 0
        for start in self.darts:
            if start in index:
                continue
            d = start
            while d not in index:
                index[d] = count
                d = _next_real(chart, chart.twin(d))
            count += 1
        return index

    def number(self, start: str) -> Dict[str, int]:
        chart = self.chart
        order = {start: 0}
        queue = deque([start])
        while queue:
            d = queue.popleft()
            for nxt in (_next_real(chart, d), chart.twin(d)):
                if nxt not in order:
                    order[nxt] = len(order)
                    queue.append(nxt)
        return order

    def encode(self, order: Dict[str, int]) -> str:
        chart = self.chart
        rows = []
        for d in sorted(order, key=order.get):
            rows.append(f"{chart.vertex_of(d).kind[0]}{chart.label(d)}{chart.direction(d)[0]}"
                        f".{order[_next_real(chart, d)]}.{order[chart.twin(d)]}")
        return ';'.join(rows)

    def face_index(self, order: Dict[str, int], dart: str) -> int:
        face = self.face_of[dart]
        return min(order[d] for d in self.darts if self.face_of[d] == face)


class ChartCoder:
    """Canonical code of a whole chart: components plus their nesting."""

    def __init__(self, chart: Chart):
        self.chart = chart
        self.coders = {comp: _ComponentCoder(chart, comp) for comp in chart.components}
        self.links: Dict[Tuple[str, ...], List[Tuple[str, Tuple[str, ...], str]]] = {c: [] for c in chart.components}
        for tether in chart.tethers():
            a = chart.component_of(chart.darts[tether.tail].vertex)
            b = chart.component_of(chart.darts[tether.head].vertex)
            a_dart = _next_real(chart, tether.tail)
            b_dart = _next_real(chart, tether.head)
            self.links[a].append((a_dart, b, b_dart))
            self.links[b].append((b_dart, a, a_dart))

    def rooted(self, comp: Tuple[str, ...], entry: Optional[str], parent: Optional[Tuple[str, ...]]) -> str:
        coder = self.coders[comp]
        if entry is None:
            starts = coder.darts
        else:
            face = coder.face_of[entry]
            starts = [d for d in coder.darts if coder.face_of[d] == face]
        best = None
        for start in starts:
            order = coder.number(start)
            children = sorted(
                (coder.face_index(order, here), self.rooted(other, there, comp))
                for here, other, there in self.links[comp] if other != parent)
            code = coder.encode(order) + ''.join(f"[{f}:{c}]" for f, c in children)
            if best is None or code < best:
                best = code
        return best or ''

    def code(self, with_infinity: bool = False) -> str:
        chart = self.chart
        header = f"n{chart.degree_n}"
        if not chart.components:
            return header
        if with_infinity:
            face = chart.infinity_face
            return header + '!' + min(self.rooted(chart.component_of(chart.darts[d].vertex), d, None)
                                      for d in face.darts)
        return header + min(self.rooted(comp, None, None) for comp in chart.components)


def canonical_code(chart: Chart, with_infinity: bool = False) -> str:
    """Canonical string; equal for isomorphic charts."""
    return ChartCoder(chart).code(with_infinity)


def isomorphic(a: Chart, b: Chart, with_infinity: bool = False) -> bool:
    """Chart isomorphism (chirality preserving); ignores the infinity face unless asked."""
    return canonical_code(a, with_infinity) == canonical_code(b, with_infinity)

"""
Component Enumerator Module
Exhaustive enumeration of embedded label components with a few white vertices.
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterator, List, Optional, Sequence, Tuple

import networkx as nx
import pandas as pd

from catalog.template import (T_BLACK, T_BW, T_WHITE, GraphTemplate, ROClass, TemplateEdge,
                              TemplateVertex, orientation_assignments, ro_canonical)
from common.errors import BudgetExceeded, ChartForgeError

logger = logging.getLogger(__name__)

# Multiplicity matrix of a labeled multigraph; the diagonal counts loops.
Multigraph = Tuple[Tuple[int, ...], ...]


def _terminal_vectors(w: int) -> Iterator[Tuple[int, ...]]:
    """Terminal counts per white, non-increasing, with an even internal degree sum."""
    for vector in itertools.combinations_with_replacement(range(3, -1, -1), w):
        if (3 * w - sum(vector)) % 2 == 0:
            yield vector


def _multigraphs(degrees: Sequence[int]) -> Iterator[List[List[int]]]:
    """Labeled multigraphs with loops realizing a degree sequence, vertex by vertex."""
    n = len(degrees)
    matrix = [[0] * n for _ in range(n)]
    remaining = list(degrees)

    def fill(i: int) -> Iterator[List[List[int]]]:
        if i == n:
            yield [row[:] for row in matrix]
            return
        for loops in range(remaining[i] // 2 + 1):
            matrix[i][i] = loops
            rest = remaining[i] - 2 * loops
            yield from spread(i, i + 1, rest)
        matrix[i][i] = 0

    def spread(i: int, j: int, rest: int) -> Iterator[List[List[int]]]:
        if j == n:
            if rest == 0:
                saved = remaining[i]
                remaining[i] = 0
                yield from fill(i + 1)
                remaining[i] = saved
            return
        for k in range(min(rest, remaining[j]) + 1):
            matrix[i][j] = matrix[j][i] = k
            remaining[j] -= k
            yield from spread(i, j + 1, rest - k)
            remaining[j] += k
        matrix[i][j] = matrix[j][i] = 0

    yield from fill(0)


def _relabelings(terminals: Sequence[int]) -> List[Tuple[int, ...]]:
    n = len(terminals)
    return [perm for perm in itertools.permutations(range(n))
            if all(terminals[perm[i]] == terminals[i] for i in range(n))]


def _multigraph_key(matrix: List[List[int]], perms: List[Tuple[int, ...]]) -> Multigraph:
    """Smallest matrix over vertex relabelings that keep terminal counts."""
    n = len(matrix)
    best = None
    for perm in perms:
        candidate = tuple(tuple(matrix[perm[i]][perm[j]] for j in range(n)) for i in range(n))
        if best is None or candidate < best:
            best = candidate
    return best


def _as_networkx(matrix: Multigraph) -> nx.Graph:
    """Simple graph with every multi-edge and loop subdivided; planarity is unchanged."""
    graph = nx.Graph()
    n = len(matrix)
    graph.add_nodes_from(range(n))
    for i in range(n):
        for j in range(i, n):
            for k in range(matrix[i][j]):
                a, b = ('s', i, j, k, 0), ('s', i, j, k, 1)
                graph.add_edges_from([(i, a), (a, b), (b, j)])
    return graph


def _embeddings(matrix: Multigraph, terminals: Sequence[int]) -> Iterator[GraphTemplate]:
    """One template per rotation system of the multigraph with its terminals."""
    n = len(matrix)
    ends: Dict[int, List[str]] = {i: [] for i in range(n)}
    edges: List[Tuple[str, str]] = []
    blacks: List[str] = []
    counter = itertools.count(1)
    for i in range(n):
        for j in range(i, n):
            for _ in range(matrix[i][j]):
                eid = next(counter)
                a, b = f"w{i + 1}.e{eid}a", f"w{j + 1}.e{eid}b"
                ends[i].append(a)
                ends[j].append(b)
                edges.append((a, b))
    for i in range(n):
        if terminals[i] == 1:
            continue
        for _ in range(terminals[i]):
            eid = next(counter)
            black = f"k{len(blacks) + 1}"
            blacks.append(black)
            ends[i].append(f"w{i + 1}.e{eid}a")
            edges.append((f"w{i + 1}.e{eid}a", f"{black}.0"))

    choices = []
    for i in range(n):
        ports = ends[i]
        if len(ports) == 3:
            choices.append([tuple(ports), (ports[0], ports[2], ports[1])])
        else:
            choices.append([tuple(ports)])
    for rotation in itertools.product(*choices):
        vertices = {}
        for i, ports in enumerate(rotation):
            vid = f"w{i + 1}"
            if terminals[i] == 1:
                vertices[vid] = TemplateVertex(vid, T_BW, ports)
            else:
                vertices[vid] = TemplateVertex(vid, T_WHITE, ports)
        for black in blacks:
            vertices[black] = TemplateVertex(black, T_BLACK, (f"{black}.0",))
        template_edges = {f"e{k + 1}": TemplateEdge(f"e{k + 1}", a, b) for k, (a, b) in enumerate(edges)}
        yield GraphTemplate('enumerated', vertices, template_edges)


def _orientable(t: GraphTemplate) -> bool:
    return next(orientation_assignments(t), None) is not None


DEFAULT_PRESET = 'paper'

FILTERS: Dict[str, Callable[[GraphTemplate], bool]] = {
    'connected': lambda t: t.is_connected(),
    'planar': lambda t: t.is_planar(),
    'no_loop': lambda t: not t.has_loop(),
    # A white vertex has one middle label dart, so at most one terminal edge.
    'terminal_cap': lambda t: all(
        sum(1 for p in v.ports if t.vertex_of(t.twin(p)).kind == T_BLACK) <= 1
        for v in t.vertices.values() if v.kind == T_WHITE),
    'orientation_parity': _orientable,
    'min_white': lambda t: len(t.whites()) >= 2,
}


@dataclass
class EnumerationResult:
    """Surviving classes and a provenance row for every candidate class seen."""
    w: int
    filters: List[str]
    classes: List[ROClass] = field(default_factory=list)
    provenance: pd.DataFrame = field(default_factory=pd.DataFrame)
    citations: Dict[str, str] = field(default_factory=dict)

    @property
    def rejected(self) -> pd.DataFrame:
        return self.provenance[self.provenance['rejected_by'].notna()]

    def kill_counts(self) -> Dict[str, int]:
        counts = {name: 0 for name in self.filters}
        for name in self.provenance['rejected_by'].dropna():
            counts[name] += 1
        return counts


class Enumerator:
    """Enumerates embedded components with w white vertices under a filter set."""

    def __init__(self, config: Dict[str, Any]):
        self.config = config
        settings = config.get('enumeration', {})
        self.max_whites = settings.get('max_whites', 6)
        self.presets: Dict[str, List[str]] = settings.get('presets', {})
        self.filter_citations: Dict[str, str] = settings.get('filter_citations', {})

    def resolve_filters(self, preset: Optional[str] = None,
                        filters: Optional[List[str]] = None) -> List[str]:
        if filters is None:
            if preset is None:
                preset = DEFAULT_PRESET
            if preset not in self.presets:
                raise ChartForgeError(f"unknown filter preset '{preset}'")
            filters = list(self.presets[preset])
        unknown = [f for f in filters if f not in FILTERS]
        if unknown:
            raise ChartForgeError(f"unknown filter '{unknown[0]}'")
        return filters

    def enumerate_components(self, w: int, preset: Optional[str] = None,
                             filters: Optional[List[str]] = None) -> EnumerationResult:
        """
        Enumerate RO-classes of embedded components with `w` white vertices.

        Args:
            w: Number of white vertices, collapsed terminals included
            preset: Name of a configured filter preset
            filters: Explicit filter list, overriding the preset

        Returns:
            EnumerationResult with surviving classes and per-class provenance

        Raises:
            BudgetExceeded: if w is above enumeration.max_whites
        """
        if w > self.max_whites:
            raise BudgetExceeded(f"w={w} is above enumeration.max_whites={self.max_whites}")
        filters = self.resolve_filters(preset, filters)
        result = EnumerationResult(w, filters, citations={
            name: self.filter_citations[name] for name in filters if name in self.filter_citations})
        rows = []
        seen = set()
        if w < 1:
            result.provenance = pd.DataFrame(rows, columns=_COLUMNS)
            return result

        for terminals in _terminal_vectors(w):
            degrees = [3 - t for t in terminals]
            perms = _relabelings(terminals)
            graphs = {_multigraph_key(m, perms) for m in _multigraphs(degrees)}
            for matrix in sorted(graphs):
                graph_planar = nx.check_planarity(_as_networkx(matrix))[0]
                any_planar = False
                connected = True
                for template in _embeddings(matrix, terminals):
                    ro_class = ro_canonical(template)
                    connected = template.is_connected()
                    any_planar = any_planar or (connected and template.is_planar())
                    key = ro_class.canonical_form if connected else f"{ro_class.canonical_form}|{matrix}"
                    if key in seen:
                        continue
                    seen.add(key)
                    killer = next((name for name in filters if not FILTERS[name](template)), None)
                    rows.append({
                        'canonical_form': ro_class.canonical_form,
                        'whites': w,
                        'terminals': sum(terminals),
                        'edges': len(template.edges),
                        'rejected_by': killer,
                    })
                    if killer is None:
                        result.classes.append(ROClass(ro_class.canonical_form, (template,)))
                    else:
                        logger.debug("rejected by %s: %s", killer, ro_class.canonical_form)
                if connected and graph_planar != any_planar:
                    logger.warning("planarity disagreement on terminal vector %s", terminals)

        result.provenance = pd.DataFrame(rows, columns=_COLUMNS)
        logger.info("w=%d: %d candidate classes, %d survive %s",
                    w, len(rows), len(result.classes), ','.join(filters))
        return result


_COLUMNS = ['canonical_form', 'whites', 'terminals', 'edges', 'rejected_by']


def enumerate_components(w: int, filters: List[str], max_whites: int = 6) -> List[ROClass]:
    """Surviving RO-classes for an explicit filter list."""
    enumerator = Enumerator({'enumeration': {'max_whites': max_whites}})
    return enumerator.enumerate_components(w, filters=filters).classes

"""
Move Template Module
Local rewrite templates: a before and an after fragment sharing a cyclic leg interface.
"""

import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from chart.model import INWARD, OUTWARD, natural_key
from chart.textio import VERTEX_KEYWORDS, parse_fields, tokenize
from common.errors import ParseError

logger = logging.getLogger(__name__)

BUILTIN_DIRECTORY = Path(__file__).parent / 'templates'
TEMPLATE_SUFFIX = '.move'

NEAR = 'near'
FAR = 'far'
DISTINCT = 'distinct'
RELATIONS = (NEAR, FAR, DISTINCT)
ANY = None


def leg_ref(index: int) -> str:
    return f"@{index}"


def is_leg(endpoint: str) -> bool:
    return endpoint.startswith('@')


def leg_index(endpoint: str) -> int:
    return int(endpoint[1:])


@dataclass(frozen=True)
class Leg:
    index: int
    label: str
    direction: str


@dataclass(frozen=True)
class PatternVertex:
    id: str
    kind: str
    ports: Tuple[str, ...]


@dataclass(frozen=True)
class PatternEdge:
    """Endpoints are ports or leg references `@k`."""
    id: str
    label: str
    tail: str
    head: str


@dataclass(frozen=True)
class Region:
    """A region of the rewrite disk, as its ports and legs in face order."""
    sides: Tuple[str, ...]
    closed: bool


@dataclass
class Pattern:
    vertices: Dict[str, PatternVertex] = field(default_factory=dict)
    edges: Dict[str, PatternEdge] = field(default_factory=dict)
    outer: Optional[str] = None

    @property
    def is_empty(self) -> bool:
        return not self.vertices and not self.edges

    def port_vertex(self) -> Dict[str, str]:
        return {p: v.id for v in self.vertices.values() for p in v.ports}

    def port_edge(self) -> Dict[str, PatternEdge]:
        found = {}
        for edge in self.edges.values():
            for end in (edge.tail, edge.head):
                if not is_leg(end):
                    found[end] = edge
        return found

    def twin(self, port: str) -> str:
        edge = self.port_edge()[port]
        return edge.head if edge.tail == port else edge.tail

    def direction(self, port: str) -> str:
        return OUTWARD if self.port_edge()[port].tail == port else INWARD

    def arcs(self) -> List[PatternEdge]:
        """Edges running from leg to leg."""
        return [e for e in self.edges.values() if is_leg(e.tail) and is_leg(e.head)]

    def pieces(self) -> List[List[str]]:
        """Vertex groups joined by pattern edges, in declaration order."""
        owner = self.port_vertex()
        groups: List[List[str]] = []
        seen = set()
        for vid in self.vertices:
            if vid in seen:
                continue
            group, stack = [], [vid]
            seen.add(vid)
            while stack:
                v = stack.pop()
                group.append(v)
                for p in self.vertices[v].ports:
                    other = self.twin(p)
                    if not is_leg(other) and owner[other] not in seen:
                        seen.add(owner[other])
                        stack.append(owner[other])
            groups.append(group)
        return groups

    def leg_endpoint(self, index: int) -> Tuple[PatternEdge, str]:
        """The pattern edge at a leg and the endpoint across it."""
        ref = leg_ref(index)
        for edge in self.edges.values():
            if edge.tail == ref:
                return edge, edge.head
            if edge.head == ref:
                return edge, edge.tail
        raise ParseError(f"leg {index} is not connected")

    def mirrored(self) -> 'Pattern':
        vertices = {vid: replace(v, ports=tuple(reversed(v.ports))) for vid, v in self.vertices.items()}
        return Pattern(vertices, dict(self.edges), self.outer)

    def renumbered(self, leg_map: Dict[int, int]) -> 'Pattern':
        def ref(end: str) -> str:
            return leg_ref(leg_map[leg_index(end)]) if is_leg(end) else end
        edges = {eid: replace(e, tail=ref(e.tail), head=ref(e.head)) for eid, e in self.edges.items()}
        return Pattern(dict(self.vertices), edges, self.outer)

    def reversed(self) -> 'Pattern':
        edges = {eid: replace(e, tail=e.head, head=e.tail) for eid, e in self.edges.items()}
        return Pattern(dict(self.vertices), edges, self.outer)

    def signature(self) -> str:
        rows = [f"{v.kind}:{','.join(v.ports)}" for v in self.vertices.values()]
        rows += [f"{e.label}:{e.tail}>{e.head}" for e in self.edges.values()]
        return '|'.join(sorted(rows))


@dataclass(frozen=True)
class Effect:
    """Declared deltas; None means unconstrained."""
    w: Optional[int] = 0
    f: Optional[int] = 0
    hoops: Optional[int] = 0
    crossings: Optional[int] = 0

    def as_dict(self) -> Dict[str, Optional[int]]:
        return {'w': self.w, 'f': self.f, 'hoops': self.hoops, 'crossings': self.crossings}

    def negated(self) -> 'Effect':
        return Effect(*(None if v is None else -v for v in (self.w, self.f, self.hoops, self.crossings)))


@dataclass
class MoveTemplate:
    key: str
    family: str
    legs: Tuple[Leg, ...]
    before: Pattern
    after: Pattern
    requires: Tuple[Tuple[str, str, str], ...] = ()
    open_arcs: Tuple[str, ...] = ()
    effect: Effect = field(default_factory=Effect)
    inverse: str = ''
    variables: Tuple[str, ...] = ()
    variant: str = 'identity'
    source: str = ''

    def leg_labels(self) -> Dict[int, str]:
        return {leg.index: leg.label for leg in self.legs}

    def label_holds(self, binding: Dict[str, int]) -> bool:
        for relation, a, b in self.requires:
            x, y = binding.get(a), binding.get(b)
            if x is None or y is None:
                continue
            gap = abs(x - y)
            if relation == NEAR and gap != 1:
                return False
            if relation == FAR and gap <= 1:
                return False
            if relation == DISTINCT and gap == 0:
                return False
        return True


def _parse_effect(tokens: List[str], line_no: int) -> Effect:
    values = {}
    for key, raw in parse_fields(tokens, line_no).items():
        if key not in ('w', 'f', 'hoops', 'crossings'):
            raise ParseError(f"unknown effect field '{key}'", line_no)
        if raw == '*':
            values[key] = ANY
            continue
        try:
            values[key] = int(raw)
        except ValueError:
            raise ParseError(f"effect {key} must be an integer or *, got '{raw}'", line_no)
    return Effect(**values)


def parse_move_template(text: str, source: str = '') -> MoveTemplate:
    """
    Parse the move template format.

    The header names the template, `leg` lines declare the interface in
    counterclockwise order, and `before` / `after` open the two fragments,
    written like chart text with labels given as variables and `@k` standing
    for the outside part of leg k.
    """
    key = family = inverse = ''
    variables: List[str] = []
    requires: List[Tuple[str, str, str]] = []
    open_arcs: List[str] = []
    effect = Effect()
    legs: Dict[int, Leg] = {}
    patterns = {'before': Pattern(), 'after': Pattern()}
    section: Optional[str] = None

    for line_no, tokens in tokenize(text):
        keyword, rest = tokens[0], tokens[1:]
        if keyword == 'template':
            if not rest:
                raise ParseError("template needs a key", line_no)
            key = rest[0]
            fields = parse_fields(rest[1:], line_no)
            family = fields.get('family', 'custom')
            inverse = fields.get('inverse', f"{key}_inverse")
        elif keyword == 'vars':
            variables = list(rest)
        elif keyword == 'require':
            if len(rest) != 3 or rest[0] not in RELATIONS:
                raise ParseError(f"expected 'require {'|'.join(RELATIONS)} <a> <b>'", line_no)
            requires.append((rest[0], rest[1], rest[2]))
        elif keyword == 'open':
            if not rest:
                raise ParseError("open needs at least one before edge", line_no)
            open_arcs.extend(rest)
        elif keyword == 'effect':
            effect = _parse_effect(rest, line_no)
        elif keyword == 'leg':
            if not rest or not rest[0].isdigit():
                raise ParseError("leg needs an index", line_no)
            fields = parse_fields(rest[1:], line_no)
            direction = fields.get('dir')
            if direction not in (INWARD, OUTWARD) or 'label' not in fields:
                raise ParseError("leg needs label=<var> and dir=in|out", line_no)
            legs[int(rest[0])] = Leg(int(rest[0]), fields['label'], direction)
        elif keyword in patterns:
            section = keyword
        elif section is None:
            raise ParseError(f"'{keyword}' outside a before/after section", line_no)
        else:
            _parse_fragment_line(patterns[section], keyword, rest, line_no)

    if not key:
        raise ParseError("missing 'template <key>' header")
    if sorted(legs) != list(range(len(legs))):
        raise ParseError(f"template {key}: legs must be numbered 0..{len(legs) - 1}")
    template = MoveTemplate(key, family, tuple(legs[k] for k in sorted(legs)),
                            patterns['before'], patterns['after'], tuple(requires),
                            tuple(open_arcs), effect, inverse, tuple(variables), source=source)
    check_interface(template)
    return template


def _parse_fragment_line(pattern: Pattern, keyword: str, rest: List[str], line_no: int) -> None:
    if keyword in VERTEX_KEYWORDS:
        if len(rest) < 2:
            raise ParseError(f"{keyword} needs an id and darts=", line_no)
        fields = parse_fields(rest[1:], line_no)
        if 'darts' not in fields:
            raise ParseError(f"vertex '{rest[0]}' has no darts=", line_no)
        pattern.vertices[rest[0]] = PatternVertex(rest[0], VERTEX_KEYWORDS[keyword],
                                                  tuple(fields['darts'].split(',')))
    elif keyword == 'edge':
        if len(rest) < 2:
            raise ParseError("edge needs an id, label, tail and head", line_no)
        fields = parse_fields(rest[1:], line_no)
        for required in ('label', 'tail', 'head'):
            if required not in fields:
                raise ParseError(f"edge '{rest[0]}' is missing {required}=", line_no)
        pattern.edges[rest[0]] = PatternEdge(rest[0], fields['label'], fields['tail'], fields['head'])
    elif keyword == 'outer':
        if len(rest) != 1 or not rest[0].startswith('face(') or not rest[0].endswith(')'):
            raise ParseError("expected 'outer face(<dart>)'", line_no)
        pattern.outer = rest[0][5:-1]
    else:
        raise ParseError(f"unknown fragment directive '{keyword}'", line_no)


def check_interface(template: MoveTemplate) -> None:
    """Both fragments must attach to every leg once, with the leg's label and direction."""
    for name, pattern in (('before', template.before), ('after', template.after)):
        owner = pattern.port_vertex()
        used: Dict[str, int] = {}
        for edge in pattern.edges.values():
            for end, outward in ((edge.tail, True), (edge.head, False)):
                if is_leg(end):
                    k = leg_index(end)
                    if k >= len(template.legs):
                        raise ParseError(f"{template.key} {name}: unknown leg {end}")
                    leg = template.legs[k]
                    # the outside part of an entering leg is the edge's tail
                    expected = INWARD if outward else OUTWARD
                    if leg.direction != expected or leg.label != edge.label:
                        raise ParseError(f"{template.key} {name}: edge {edge.id} disagrees with leg {k}")
                elif end not in owner:
                    raise ParseError(f"{template.key} {name}: edge {edge.id} uses unknown port '{end}'")
                used[end] = used.get(end, 0) + 1
        for end, count in used.items():
            if count > 1:
                raise ParseError(f"{template.key} {name}: '{end}' used by {count} edges")
        for port in owner:
            if port not in used:
                raise ParseError(f"{template.key} {name}: port '{port}' has no edge")
        for leg in template.legs:
            if leg_ref(leg.index) not in used:
                raise ParseError(f"{template.key} {name}: leg {leg.index} is not attached")
    arcs = {edge.id for edge in template.before.arcs()}
    for eid in template.open_arcs:
        if eid not in arcs:
            raise ParseError(f"{template.key}: open edge '{eid}' is not a before arc between two legs")


def regions(pattern: Pattern, leg_count: int) -> List[Region]:
    """
    Regions of the rewrite disk cut out by a fragment. Each region lists the
    fragment ports and leg references (`@k`, standing for the right side of
    the leg's edge heading into the disk) in face order; closed regions do
    not reach the disk boundary.
    """
    rotation: Dict[str, str] = {}
    twin: Dict[str, str] = {}
    for v in pattern.vertices.values():
        for i, p in enumerate(v.ports):
            rotation[p] = v.ports[(i + 1) % len(v.ports)]
    for k in range(leg_count):
        ring = (f"ccw:{k}", f"@{k}", f"cw:{k}")
        for i, d in enumerate(ring):
            rotation[d] = ring[(i + 1) % 3]
        twin[f"ccw:{k}"] = f"cw:{(k + 1) % leg_count}"
        twin[f"cw:{(k + 1) % leg_count}"] = f"ccw:{k}"
    for edge in pattern.edges.values():
        twin[edge.tail] = edge.head
        twin[edge.head] = edge.tail

    seen = set()
    found = []
    for start in sorted(rotation, key=natural_key):
        if start in seen:
            continue
        orbit, d = [], start
        while d not in seen:
            seen.add(d)
            orbit.append(d)
            d = rotation[twin[d]]
        if any(d.startswith('ccw:') for d in orbit):
            continue
        touches = any(d.startswith('cw:') for d in orbit)
        if not leg_count and pattern.outer is not None:
            touches = pattern.outer in orbit
        sides = tuple(d for d in orbit if not d.startswith('cw:'))
        found.append(Region(sides, not touches))
    return found


def _variant(template: MoveTemplate, mirror: bool, flip: bool) -> MoveTemplate:
    count = len(template.legs)
    legs = list(template.legs)
    before, after = template.before, template.after
    if mirror:
        leg_map = {k: (-k) % count for k in range(count)}
        before = before.mirrored().renumbered(leg_map)
        after = after.mirrored().renumbered(leg_map)
        legs = [replace(leg, index=leg_map[leg.index]) for leg in legs]
        legs.sort(key=lambda leg: leg.index)
    if flip:
        before, after = before.reversed(), after.reversed()
        legs = [replace(leg, direction=INWARD if leg.direction == OUTWARD else OUTWARD) for leg in legs]
    name = {(False, False): 'identity', (True, False): 'mirror',
            (False, True): 'reverse', (True, True): 'mirror_reverse'}[(mirror, flip)]
    return replace(template, legs=tuple(legs), before=before, after=after, variant=name)


def variants(template: MoveTemplate) -> List[MoveTemplate]:
    """The template under reflection and orientation reversal, duplicates dropped."""
    result, seen = [], set()
    for mirror in (False, True):
        for flip in (False, True):
            candidate = _variant(template, mirror, flip)
            legs = ';'.join(f"{leg.label}{leg.direction}" for leg in candidate.legs)
            signature = (legs, candidate.before.signature(), candidate.after.signature())
            if signature not in seen:
                seen.add(signature)
                result.append(candidate)
    return result


def inverse_template(template: MoveTemplate) -> MoveTemplate:
    """
    Swap the fragments; the declared effect is negated. Every arc of the new
    before fragment is open, since no forward move leaves a hoop between two legs.
    """
    return replace(template, key=template.inverse, inverse=template.key,
                   before=template.after, after=template.before,
                   open_arcs=tuple(e.id for e in template.after.arcs()),
                   effect=template.effect.negated(), variant='identity')


def load_template_file(path: Path) -> MoveTemplate:
    return parse_move_template(Path(path).read_text(encoding='utf-8'), source=str(path))


def builtin_templates(directory: Optional[Path] = None) -> List[MoveTemplate]:
    """Built-in templates from their data files, in key order."""
    directory = Path(directory or BUILTIN_DIRECTORY)
    templates = [load_template_file(p) for p in sorted(directory.glob(f"*{TEMPLATE_SUFFIX}"))]
    logger.debug("loaded %d templates from %s", len(templates), directory)
    return templates


def template_library(config: Optional[Dict] = None, with_inverses: bool = True) -> Dict[str, MoveTemplate]:
    """
    All templates named by the configuration, keyed by template key. Inverses
    are added unless a template is its own inverse or the inverse is already
    present.
    """
    from common.config import PROJECT_ROOT

    settings = (config or {}).get('moves', {})
    directory = settings.get('builtin_directory')
    if directory:
        directory = Path(directory)
        if not directory.is_absolute():
            directory = PROJECT_ROOT / directory
    templates = builtin_templates(directory)
    for custom in settings.get('custom_templates', []) or []:
        path = Path(custom)
        templates.append(load_template_file(path if path.is_absolute() else PROJECT_ROOT / path))
    library = {t.key: t for t in templates}
    if with_inverses:
        for t in templates:
            if t.inverse and t.inverse not in library:
                library[t.inverse] = inverse_template(t)
    return library

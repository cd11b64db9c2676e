"""
Orientation Cases Module
Orientation classes of a candidate after pruning, split by terminal placement.
"""

import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from catalog.matcher import embed
from catalog.template import GraphTemplate, orientation_assignments, ro_canonical, ro_variants
from verify.configuration import Branch, branches, placement_options
from verify.rulebase import Rulebase

logger = logging.getLogger(__name__)


def branch_total(branch: Branch, rulebase: Rulebase) -> int:
    """White vertices of the component plus the interior bound of every disk."""
    return len(branch.orientation.whites()) + sum(rulebase.disk_bound(d)[0] for d in branch.disks)


def matches_entry(entry: GraphTemplate, t: GraphTemplate) -> bool:
    """Whether `t` is an instance of the entry up to reflection and reversal."""
    return any(embed(variant, t) is not None for variant in ro_variants(entry))


@dataclass
class OrientationClass:
    """
    One orientation case of a candidate. `placements` fixes the corners of
    the collapsed terminals whose placement matters; `size` counts the raw
    orientations in the class.
    """
    canonical_form: str
    representative: GraphTemplate
    placements: Dict[str, str] = field(default_factory=dict)
    size: int = 0
    name: Optional[str] = None

    @property
    def template(self) -> GraphTemplate:
        if not self.placements:
            return self.representative
        expanded = self.representative
        for bw, port in sorted(self.placements.items()):
            expanded = expanded.expand_terminal(bw, port)
        return expanded


@dataclass
class OrientationCensus:
    candidate: str
    raw: int
    pruned: int
    classes: List[OrientationClass] = field(default_factory=list)

    @property
    def conserved(self) -> bool:
        """Raw count equals pruned plus class sizes, each orientation class counted once."""
        sizes = {c.canonical_form: c.size for c in self.classes}
        return self.raw == self.pruned + sum(sizes.values())


def _angled(t: GraphTemplate, port: str) -> int:
    orbit = t.faces()[t.face_index()[port]]
    return len({t.vertex_of(p).id for p in orbit})


def placement_cases(orientation: GraphTemplate, rulebase: Rulebase) -> List[Dict[str, str]]:
    """
    Terminal placements worth telling apart for one orientation.

    A collapsed terminal is fixed to a corner when its two corners lie in
    disks with the same angled count and the best bound totals of the two
    placements differ; otherwise it stays collapsed.
    """
    every = list(branches(orientation, [orientation]))
    split = []
    for bw, ports in placement_options(orientation):
        if len({_angled(orientation, p) for p in ports}) != 1:
            continue
        totals = {min(branch_total(b, rulebase) for b in every if b.placements[bw] == port)
                  for port in ports}
        if len(totals) > 1:
            split.append(bw)
    cases: List[Dict[str, str]] = [{}]
    for bw in split:
        cases = [dict(case, **{bw: port}) for case in cases for port in orientation.vertices[bw].ports]
    if split:
        logger.debug("%s: placement split on %s", orientation.name, ','.join(split))
    return cases


def enumerate_orientations(candidate: GraphTemplate, rulebase: Rulebase,
                           pruning_rules: Optional[List[str]] = None, w_total: int = 7,
                           named: Optional[List[GraphTemplate]] = None) -> OrientationCensus:
    """
    Orientation classes of a candidate up to reflection and reversal.

    Args:
        candidate: Catalog candidate, possibly partly oriented
        rulebase: Rules used for placement splits
        pruning_rules: Rules whose bounds alone close an orientation in every placement
        w_total: White vertices of the whole chart
        named: Catalog entries used to name the classes

    Returns:
        OrientationCensus with the surviving classes
    """
    pruning = rulebase.subset(pruning_rules) if pruning_rules is not None else rulebase
    raw = list(orientation_assignments(candidate))
    census = OrientationCensus(candidate.name, len(raw), 0)
    kept: Dict[str, GraphTemplate] = {}
    sizes: Counter = Counter()
    for oriented in raw:
        totals = [branch_total(b, pruning) for b in branches(oriented, [oriented])]
        if totals and min(totals) > w_total:
            census.pruned += 1
            logger.debug("pruned orientation of %s: totals %s", candidate.name, totals)
            continue
        form = ro_canonical(oriented).canonical_form
        kept.setdefault(form, oriented)
        sizes[form] += 1

    for form in sorted(kept):
        representative = kept[form]
        for placements in placement_cases(representative, rulebase):
            cls = OrientationClass(form, representative, placements, sizes[form])
            for entry in named or []:
                if matches_entry(entry, cls.template):
                    cls.name = entry.name
                    break
            census.classes.append(cls)
    logger.info("%s: %d orientations, %d pruned, %d classes",
                candidate.name, census.raw, census.pruned, len(census.classes))
    return census

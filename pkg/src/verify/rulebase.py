"""
Rulebase Module
Validated rule stanzas for the exclusion engine and the disk bounds they give.
"""

import logging
from pathlib import Path
from typing import Dict, List, Literal, Optional, Tuple

import yaml
from pydantic import BaseModel, ConfigDict, ValidationError, model_validator

from catalog.enumerator import FILTERS
from common.config import PROJECT_ROOT
from common.errors import DanglingReference, ParseError
from regions.disks import DiskFacts
from verify.io_calc import corner_spec, min_interior_whites

logger = logging.getLogger(__name__)

DEFAULT_RULEBASE = PROJECT_ROOT / 'src' / 'verify' / 'rulebase.yaml'

BOUND = 'bound'
MENU = 'menu'
LEAF = 'leaf'
STRUCTURAL = 'structural'
DERIVED = 'derived'
REFINEMENT = 'refinement'
BOUND_KINDS = (BOUND, MENU, DERIVED)


class DiskPattern(BaseModel):
    """Conditions on a disk; a field left unset matches anything."""
    model_config = ConfigDict(extra='forbid')

    angled_k: Optional[int] = None
    simple: Optional[bool] = None
    feelers_min: int = 0
    feelers_max: Optional[int] = None
    directed: Optional[bool] = None
    outside: Optional[List[str]] = None
    lens: Optional[bool] = None
    special: Optional[bool] = None

    def matches(self, facts: DiskFacts) -> bool:
        if self.angled_k is not None and facts.angled_k != self.angled_k:
            return False
        if self.simple is not None and facts.simple != self.simple:
            return False
        if facts.feelers < self.feelers_min:
            return False
        if self.feelers_max is not None and facts.feelers > self.feelers_max:
            return False
        if self.directed is not None and facts.directed != self.directed:
            return False
        if self.outside is not None and facts.outside not in self.outside:
            return False
        if self.lens is not None and facts.lens != self.lens:
            return False
        if self.special is not None and facts.special != self.special:
            return False
        return True

    def describe(self) -> str:
        parts = []
        if self.lens:
            parts.append('lens')
        if self.angled_k is not None:
            parts.append(f"{self.angled_k}-angled")
        if self.simple:
            parts.append('simple')
        if self.feelers_max == self.feelers_min:
            parts.append(f"{self.feelers_min} feelers")
        elif self.feelers_max is not None:
            parts.append(f"{self.feelers_min}-{self.feelers_max} feelers")
        elif self.feelers_min:
            parts.append(f">={self.feelers_min} feelers")
        if self.directed is not None:
            parts.append('directed' if self.directed else 'not directed')
        if self.outside:
            parts.append('outside ' + '|'.join(self.outside))
        return ', '.join(parts) or 'any disk'


class MenuEntry(BaseModel):
    """One neighbourhood a disk may have when it holds `interior` whites."""
    model_config = ConfigDict(extra='forbid')

    interior: int
    feelers: int = 0
    directed: Optional[bool] = None
    outside: Optional[List[str]] = None

    def compatible(self, facts: DiskFacts) -> bool:
        if facts.feelers != self.feelers:
            return False
        if self.directed is not None and facts.directed != self.directed:
            return False
        if self.outside is not None and facts.outside not in self.outside:
            return False
        return True


class LeafCase(BaseModel):
    """Where a trusted leaf applies: a candidate, optionally an oriented form, a disk or a slack."""
    model_config = ConfigDict(extra='forbid')

    candidate: str
    orientation: Optional[str] = None
    disk: Optional[DiskPattern] = None
    slack: Optional[int] = None


class Rule(BaseModel):
    model_config = ConfigDict(extra='forbid')

    id: str
    kind: Literal['bound', 'menu', 'leaf', 'structural', 'derived', 'refinement']
    statement: str
    trust: Literal['cited', 'derived']
    when: Optional[DiskPattern] = None
    bound: Optional[int] = None
    interior_max: Optional[int] = None
    entries: List[MenuEntry] = []
    cases: List[LeafCase] = []
    filter: Optional[str] = None
    refinements: Dict[str, str] = {}
    cite: Optional[str] = None
    quote: Optional[str] = None

    @model_validator(mode='after')
    def check_kind_fields(self) -> 'Rule':
        if self.trust == 'cited' and not (self.cite and self.quote):
            raise ValueError(f"rule {self.id}: a cited rule needs `cite` and `quote`")
        if self.kind == BOUND and (self.when is None or self.bound is None):
            raise ValueError(f"rule {self.id}: a bound rule needs `when` and `bound`")
        if self.kind == MENU and (self.when is None or self.interior_max is None or not self.entries):
            raise ValueError(f"rule {self.id}: a menu rule needs `when`, `interior_max` and `entries`")
        if self.kind == MENU and any(e.interior > self.interior_max for e in self.entries):
            raise ValueError(f"rule {self.id}: menu entry above interior_max")
        if self.kind == STRUCTURAL and self.filter not in FILTERS:
            raise ValueError(f"rule {self.id}: unknown filter '{self.filter}'")
        if self.kind == REFINEMENT and not self.refinements:
            raise ValueError(f"rule {self.id}: a refinement rule needs `refinements`")
        return self

    def disk_bound(self, facts: DiskFacts) -> Optional[int]:
        """
        Lower bound on the interior whites of a disk, None when the rule is silent.

        A menu lists what a disk may look like with few interior whites; the
        bound is the least count some compatible entry allows, or one above
        the menu when nothing fits.
        """
        if self.kind == DERIVED:
            return min_interior_whites(corner_spec(facts.corner_darts))
        if self.kind not in (BOUND, MENU) or not self.when.matches(facts):
            return None
        if self.kind == BOUND:
            return self.bound
        allowed = [e.interior for e in self.entries if e.compatible(facts)]
        return min(allowed) if allowed else self.interior_max + 1


class Rulebase:
    """Rules in evaluation order."""

    def __init__(self, rules: List[Rule]):
        self.rules = rules
        ids = [r.id for r in rules]
        duplicates = {i for i in ids if ids.count(i) > 1}
        if duplicates:
            raise ParseError(f"duplicate rule id '{sorted(duplicates)[0]}'")

    def __len__(self) -> int:
        return len(self.rules)

    def __contains__(self, rule_id: str) -> bool:
        return any(r.id == rule_id for r in self.rules)

    def get(self, rule_id: str) -> Rule:
        for rule in self.rules:
            if rule.id == rule_id:
                return rule
        raise DanglingReference(f"unknown rule '{rule_id}'")

    def of_kind(self, *kinds: str) -> List[Rule]:
        return [r for r in self.rules if r.kind in kinds]

    def disk_bound(self, facts: DiskFacts, cited_only: bool = False) -> Tuple[int, Optional[str]]:
        """
        Largest bound any rule gives the disk and the rule giving it.
        Cited rules are asked before derived ones and win ties; `cited_only`
        leaves the derived rules out.
        """
        best, best_rule = 0, None
        ordered = self.of_kind(BOUND, MENU) + self.of_kind(DERIVED)
        if cited_only:
            ordered = [r for r in ordered if r.trust == 'cited']
        for rule in ordered:
            bound = rule.disk_bound(facts)
            if bound is not None and bound > best:
                best, best_rule = bound, rule.id
        return best, best_rule

    def subset(self, rule_ids: List[str]) -> 'Rulebase':
        for rule_id in rule_ids:
            self.get(rule_id)
        return Rulebase([r for r in self.rules if r.id in rule_ids])

    def without(self, rule_ids: List[str]) -> 'Rulebase':
        for rule_id in rule_ids:
            self.get(rule_id)
        return Rulebase([r for r in self.rules if r.id not in rule_ids])


def parse_rulebase(text: str) -> Rulebase:
    try:
        data = yaml.safe_load(text) or {}
    except yaml.YAMLError as exc:
        raise ParseError(f"rulebase is not valid YAML: {exc}") from exc
    stanzas = data.get('rules', [])
    rules = []
    for i, stanza in enumerate(stanzas):
        try:
            rules.append(Rule.model_validate(stanza))
        except ValidationError as exc:
            name = stanza.get('id', f"#{i + 1}") if isinstance(stanza, dict) else f"#{i + 1}"
            raise ParseError(f"rule {name}: {exc.errors()[0]['msg']}") from exc
    logger.debug("parsed %d rules", len(rules))
    return Rulebase(rules)


def load_rulebase(path: Optional[str] = None) -> Rulebase:
    """
    Read the rulebase YAML file.

    Args:
        path: Rulebase file; the packaged rulebase when None

    Returns:
        Rulebase in file order
    """
    file_path = Path(path) if path else DEFAULT_RULEBASE
    if not file_path.is_absolute():
        file_path = PROJECT_ROOT / file_path
    return parse_rulebase(file_path.read_text(encoding='utf-8'))

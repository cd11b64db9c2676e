"""
Exclusion Engine Module
Replays the case analysis that rules candidate components out of a chart.
"""

import logging
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional

from dataclasses_json import dataclass_json

from catalog.enumerator import FILTERS
from catalog.library import CANDIDATES, K4_CASES, SURVIVORS, TWIN_BIGON_CASES, Catalog, catalog_from_config
from catalog.template import GraphTemplate
from common.errors import RulebaseIncomplete
from regions.disks import CornerDart, DiskFacts
from verify.configuration import Branch, branches, count_branches
from verify.orientations import OrientationCensus, enumerate_orientations, matches_entry
from verify.rulebase import LEAF, REFINEMENT, STRUCTURAL, Rulebase, load_rulebase

logger = logging.getLogger(__name__)

CLOSED = 'closed'
OPEN = 'open'
EXCLUDED = 'excluded'
SURVIVES = 'survives'

ARITHMETIC = 'arithmetic'
TRUSTED = 'trusted'


@dataclass_json
@dataclass
class ProofStep:
    """One node of a proof tree: a rule applied to a disk, or the closing sum."""
    rule: str
    detail: str
    bound: Optional[int] = None
    disk: Optional[str] = None
    facts: Optional[Dict[str, Any]] = None


@dataclass_json
@dataclass
class BranchResult:
    key: str
    status: str
    closed_by: Optional[str] = None
    total: int = 0
    sum_text: str = ''
    steps: List[ProofStep] = field(default_factory=list)


@dataclass_json
@dataclass
class CandidateVerdict:
    candidate: str
    verdict: str
    whites: int
    w_total: int
    branch_count: int
    argument: Optional[str] = None
    lemma: Optional[str] = None
    branches: List[BranchResult] = field(default_factory=list)
    incomplete: bool = False

    @property
    def open_branches(self) -> List[BranchResult]:
        return [b for b in self.branches if b.status == OPEN]

    def rules_used(self) -> List[str]:
        used = []
        for b in self.branches:
            for step in b.steps:
                if step.rule not in used and step.rule != ARITHMETIC:
                    used.append(step.rule)
        return used

    def sums(self) -> List[str]:
        return sorted({b.sum_text for b in self.branches if b.closed_by == ARITHMETIC})


@dataclass_json
@dataclass
class VerificationReport:
    w_total: int
    rules: List[str]
    verdicts: List[CandidateVerdict] = field(default_factory=list)
    citations: Dict[str, str] = field(default_factory=dict)
    schema: int = 1

    @property
    def excluded(self) -> List[str]:
        return [v.candidate for v in self.verdicts if v.verdict == EXCLUDED]

    @property
    def survivors(self) -> List[str]:
        return [v.candidate for v in self.verdicts if v.verdict == SURVIVES]

    @property
    def incomplete(self) -> List[str]:
        return [v.candidate for v in self.verdicts if v.incomplete]

    def verdict(self, candidate: str) -> CandidateVerdict:
        for v in self.verdicts:
            if v.candidate == candidate:
                return v
        raise KeyError(candidate)


def facts_record(facts: DiskFacts) -> Dict[str, Any]:
    return asdict(facts)


def facts_from_record(record: Dict[str, Any]) -> DiskFacts:
    data = dict(record)
    data['corner_darts'] = tuple(CornerDart(**c) for c in data.get('corner_darts', ()))
    return DiskFacts(**data)


def closing_sum(whites: int, bounds: List[int], w_total: int) -> Optional[List[int]]:
    """Fewest disk bounds, largest first, that push the count past w_total."""
    chosen, total = [], whites
    for bound in sorted((b for b in bounds if b > 0), reverse=True):
        if total > w_total:
            break
        chosen.append(bound)
        total += bound
    return sorted(chosen) if total > w_total else None


def sum_text(whites: int, chosen: List[int]) -> str:
    return ' + '.join(str(x) for x in [whites] + chosen) + f" = {whites + sum(chosen)}"


class Verifier:
    """Runs the exclusion argument for catalog candidates against a rulebase."""

    def __init__(self, config: Dict[str, Any], rulebase: Optional[Rulebase] = None,
                 catalog: Optional[Catalog] = None):
        self.config = config
        settings = config.get('verify', {})
        self.w_total = settings.get('w_total', 7)
        # a claim is an argument name, or a mapping with `argument` and `lemma`
        self.claims: Dict[str, Dict[str, str]] = {
            name: claim if isinstance(claim, dict) else {'argument': claim}
            for name, claim in (settings.get('claims') or {}).items()}
        self.pruning_rules: List[str] = settings.get('orientation_pruning_rules', [])
        self.strict = settings.get('strict', False)
        self.rulebase = rulebase if rulebase is not None else load_rulebase(settings.get('rulebase'))
        self.catalog = catalog if catalog is not None else catalog_from_config(config)

    # -- branch level -------------------------------------------------------

    def _refinement_step(self, branch: Branch, rulebase: Rulebase) -> Optional[ProofStep]:
        for rule in rulebase.of_kind(REFINEMENT):
            refined = rule.refinements.get(branch.candidate)
            if refined is None:
                continue
            if not matches_entry(self.catalog.entry(refined), branch.orientation):
                return ProofStep(rule.id, f"orientation is not an instance of {refined}")
        return None

    def _leaf_step(self, branch: Branch, rulebase: Rulebase, total: int,
                   w_total: int) -> Optional[ProofStep]:
        for rule in rulebase.of_kind(LEAF):
            for case in rule.cases:
                if case.candidate != branch.candidate:
                    continue
                detail = []
                if case.orientation is not None:
                    entry = self.catalog.entry(case.orientation)
                    target = branch.expanded if entry.blacks() else branch.orientation
                    if not matches_entry(entry, target):
                        continue
                    detail.append(f"matches {case.orientation}")
                if case.disk is not None:
                    hits = [d for d in branch.disks if case.disk.matches(d)]
                    if not hits:
                        continue
                    detail.append(f"has a {case.disk.describe()} disk")
                if case.slack is not None:
                    if w_total - total > case.slack:
                        continue
                    detail.append(f"leaves {w_total - total} white vertices to spare")
                return ProofStep(rule.id, ', '.join(detail) or branch.candidate)
        return None

    def close_branch(self, branch: Branch, rulebase: Optional[Rulebase] = None,
                     w_total: Optional[int] = None) -> BranchResult:
        """
        Try to close one branch: by refinement, by counting, then by a trusted leaf.

        Returns:
            BranchResult, open when nothing closes it
        """
        rulebase = rulebase if rulebase is not None else self.rulebase
        w_total = w_total if w_total is not None else self.w_total
        result = BranchResult(branch.key, OPEN)

        step = self._refinement_step(branch, rulebase)
        if step is not None:
            result.status, result.closed_by = CLOSED, TRUSTED
            result.steps.append(step)
            return result

        whites = len(branch.orientation.whites())
        # cited bounds alone first, derived ones only when those fall short
        for cited_only in (True, False):
            bounded = []
            for facts in branch.disks:
                bound, rule_id = rulebase.disk_bound(facts, cited_only)
                bounded.append((facts, bound, rule_id))
            result.total = whites + sum(b for _, b, _ in bounded)
            chosen = closing_sum(whites, [b for _, b, _ in bounded], w_total)
            if chosen is not None:
                break
        if chosen is not None:
            remaining = list(chosen)
            for facts, bound, rule_id in sorted(bounded, key=lambda x: -x[1]):
                if bound in remaining:
                    remaining.remove(bound)
                    result.steps.append(ProofStep(
                        rule_id, f"{facts.angled_k}-angled disk with {facts.feelers} feelers "
                                 f"holds at least {bound}", bound, facts.disk_id, facts_record(facts)))
            result.sum_text = sum_text(whites, chosen)
            result.steps.append(ProofStep(ARITHMETIC, f"{result.sum_text} > {w_total}"))
            result.status, result.closed_by = CLOSED, ARITHMETIC
            return result

        step = self._leaf_step(branch, rulebase, result.total, w_total)
        if step is not None:
            result.status, result.closed_by = CLOSED, TRUSTED
            result.steps.append(step)
            return result
        logger.debug("open branch of %s: %s (total %d)", branch.candidate, branch.key, result.total)
        return result

    # -- candidate level ----------------------------------------------------

    def exclude_candidate(self, candidate: GraphTemplate, rulebase: Optional[Rulebase] = None,
                          w_total: Optional[int] = None) -> CandidateVerdict:
        """
        Explore every orientation and terminal placement of a candidate.

        Args:
            candidate: Catalog candidate
            rulebase: Rules to use, the loaded rulebase when None
            w_total: White vertices of the whole chart

        Returns:
            CandidateVerdict, excluded when every branch closes

        Raises:
            RulebaseIncomplete: in strict mode, when a claimed exclusion has open branches
        """
        rulebase = rulebase if rulebase is not None else self.rulebase
        w_total = w_total if w_total is not None else self.w_total
        claim = self.claims.get(candidate.name, {})
        verdict = CandidateVerdict(candidate.name, SURVIVES, len(candidate.whites()), w_total,
                                   0, claim.get('argument'), claim.get('lemma'))

        for rule in rulebase.of_kind(STRUCTURAL):
            if not FILTERS[rule.filter](candidate):
                verdict.verdict = EXCLUDED
                verdict.branches.append(BranchResult(
                    'component', CLOSED, TRUSTED, steps=[ProofStep(rule.id, rule.statement)]))
                logger.info("%s: excluded by %s", candidate.name, rule.id)
                return verdict

        verdict.branch_count = count_branches(candidate)
        for branch in branches(candidate):
            verdict.branches.append(self.close_branch(branch, rulebase, w_total))

        if verdict.branches and not verdict.open_branches:
            verdict.verdict = EXCLUDED
        elif candidate.name in self.claims:
            verdict.incomplete = True
            message = (f"{candidate.name}: {len(verdict.open_branches)} branches neither close "
                       f"nor match a rule")
            if self.strict:
                raise RulebaseIncomplete(message, len(verdict.open_branches))
            logger.warning(message)
        logger.info("%s: %s (%d branches, %d open)", candidate.name, verdict.verdict,
                    len(verdict.branches), len(verdict.open_branches))
        return verdict

    def theorem_pipeline(self, rulebase: Optional[Rulebase] = None,
                         w_total: Optional[int] = None) -> VerificationReport:
        """Run the exclusion over every candidate and both surviving shapes."""
        rulebase = rulebase if rulebase is not None else self.rulebase
        w_total = w_total if w_total is not None else self.w_total
        report = VerificationReport(w_total, [r.id for r in rulebase.rules],
                                    citations={r.id: r.cite for r in rulebase.rules if r.cite})
        for group in (CANDIDATES, SURVIVORS):
            for candidate in self.catalog.group(group):
                report.verdicts.append(self.exclude_candidate(candidate, rulebase, w_total))
        logger.info("pipeline: %d excluded, %d survive", len(report.excluded), len(report.survivors))
        return report

    def enumerate_orientations(self, candidate: GraphTemplate) -> OrientationCensus:
        named = self.catalog.group(K4_CASES) + self.catalog.group(TWIN_BIGON_CASES)
        return enumerate_orientations(candidate, self.rulebase, self.pruning_rules,
                                      self.w_total, named)


def recheck(report: VerificationReport, rulebase: Rulebase) -> List[str]:
    """
    Re-evaluate an excluded verdict's proof trees from the recorded facts only:
    every disk step must follow from its rule, and every sum must exceed the
    white vertex budget. Returns the problems found.
    """
    problems = []
    for verdict in report.verdicts:
        if verdict.verdict != EXCLUDED:
            continue
        name = verdict.candidate
        if verdict.branch_count and len(verdict.branches) != verdict.branch_count:
            problems.append(f"{name}: {len(verdict.branches)} of {verdict.branch_count} branches recorded")
        for branch in verdict.branches:
            if branch.status != CLOSED:
                problems.append(f"{name}: branch {branch.key} is open")
                continue
            last = branch.steps[-1].rule if branch.steps else None
            if last is None or (last not in rulebase and last != ARITHMETIC):
                problems.append(f"{name}: branch {branch.key} ends in an unknown rule")
                continue
            if branch.closed_by != ARITHMETIC:
                continue
            counted = verdict.whites
            for step in branch.steps[:-1]:
                rule = rulebase.get(step.rule)
                given = rule.disk_bound(facts_from_record(step.facts))
                if given is None or given < step.bound:
                    problems.append(f"{name}: {step.rule} does not give {step.bound} on {step.disk}")
                counted += step.bound
            if counted <= verdict.w_total:
                problems.append(f"{name}: branch {branch.key} sums to {counted}")
    return problems

import copy
import json
import random

import pytest

from catalog.template import parse_template
from chart.model import INWARD, OUTWARD
from common.errors import DanglingReference, ParseError, RulebaseIncomplete
from regions.disks import BOTH_IN, MIXED, CornerDart, DiskFacts
from report.reporter import Reporter
from verify.configuration import branches, count_branches, template_disks
from verify.engine import (ARITHMETIC, CLOSED, EXCLUDED, SURVIVES, VerificationReport, Verifier,
                           closing_sum, recheck, sum_text)
from verify.io_calc import corner_spec, io_balance, io_balance_bruteforce, min_interior_whites
from verify.rulebase import parse_rulebase


def facts(angled_k, feelers=0, terminal_feelers=None, directed=False, outside=None,
          corners=(), simple=True, lens=False):
    terminal_feelers = feelers if terminal_feelers is None else terminal_feelers
    return DiskFacts('d', angled_k, simple, feelers, terminal_feelers, directed, outside,
                     tuple(corners), None, lens)


class TestIOBalance:

    @pytest.mark.parametrize('n_in,n_out,whites,terminals,expected', [
        (1, 1, 0, 0, True),
        (1, 0, 0, 0, False),
        (1, 0, 1, 0, True),
        (3, 0, 0, 0, False),
        (2, 0, 2, 0, True),
        (2, 1, 1, 0, True),
        (3, 0, 2, 1, True),
        (3, 0, 2, 0, False),
    ])
    def test_examples(self, n_in, n_out, whites, terminals, expected):
        assert io_balance(n_in, n_out, whites, terminals) is expected

    def test_agrees_with_bruteforce(self):
        rng = random.Random(20)
        for _ in range(10_000):
            args = (rng.randint(0, 6), rng.randint(0, 6), rng.randint(0, 4), rng.randint(0, 4))
            assert io_balance(*args) == io_balance_bruteforce(*args), args

    def test_negative_counts(self):
        with pytest.raises(ValueError):
            io_balance(-1, 0, 0, 0)


class TestMinInteriorWhites:

    def test_balanced_boundary(self):
        assert min_interior_whites([(INWARD, False), (OUTWARD, False)]) == 0

    def test_one_excess_arc(self):
        spec = [(OUTWARD, False), (OUTWARD, False), (INWARD, False)]
        assert min_interior_whites(spec) == 1

    def test_three_outward_arcs(self):
        assert min_interior_whites([(OUTWARD, False)] * 3) == 2

    def test_terminal_arcs_may_drop_out(self):
        assert min_interior_whites([(OUTWARD, True)]) == 0
        assert min_interior_whites([(OUTWARD, True), (OUTWARD, True), (OUTWARD, False)]) == 1

    def test_corner_spec(self):
        corners = [CornerDart(OUTWARD, True), CornerDart(INWARD, False)]
        assert corner_spec(corners) == [(OUTWARD, True), (INWARD, False)]

    def test_limit(self):
        assert min_interior_whites([(OUTWARD, False)] * 3, limit=1) == 2


class TestRulebase:

    def test_loads(self, rulebase):
        assert len(rulebase) == 17
        assert 'io_balance' in rulebase
        assert rulebase.get('pentagon_two_feelers').trust == 'cited'

    def test_unknown_rule(self, rulebase):
        with pytest.raises(DanglingReference):
            rulebase.get('no_such_rule')
        with pytest.raises(DanglingReference):
            rulebase.without(['no_such_rule'])

    @pytest.mark.parametrize('text', [
        "rules: [",
        "rules:\n  - {id: a, kind: bound, trust: cited, cite: L, quote: q, statement: s}\n",
        "rules:\n  - {id: a, kind: magic, trust: cited, cite: L, quote: q, statement: s}\n",
        "rules:\n  - {id: a, kind: structural, trust: cited, cite: L, quote: q, statement: s, filter: nope}\n",
        "rules:\n  - {id: a, kind: structural, trust: cited, quote: q, statement: s, filter: connected}\n",
        "rules:\n  - {id: a, kind: structural, trust: cited, cite: L, statement: s, filter: connected}\n",
        "rules:\n  - {id: a, kind: derived, trust: maybe, statement: s}\n",
        "rules:\n  - {id: a, kind: derived, trust: derived, statement: s}\n"
        "  - {id: a, kind: derived, trust: derived, statement: s}\n",
        "rules:\n  - id: a\n    kind: menu\n    trust: cited\n    cite: L\n    quote: q\n    statement: s\n    when: {angled_k: 2}\n"
        "    interior_max: 0\n    entries: [{interior: 1}]\n",
    ])
    def test_malformed_rulebase(self, text):
        with pytest.raises(ParseError):
            parse_rulebase(text)

    @pytest.mark.parametrize('rule_id,disk,expected', [
        ('lens_needs_three_interior', facts(2, lens=True), 3),
        ('lens_needs_three_interior', facts(2), None),
        ('pentagon_one_feeler', facts(5, feelers=1), 1),
        ('pentagon_one_feeler', facts(5), None),
        ('pentagon_two_feelers', facts(5, feelers=2), 2),
        ('pentagon_two_feelers', facts(5, feelers=2, terminal_feelers=1), None),
        ('pentagon_two_feelers', facts(4, feelers=2), None),
        ('square_one_feeler', facts(4, feelers=1), 1),
        ('square_two_feelers', facts(4, feelers=3), 2),
        ('square_two_feelers', facts(4, feelers=1), None),
        ('bigon_coherent_outside', facts(2, outside=BOTH_IN), 1),
        ('bigon_coherent_outside', facts(2, outside=MIXED), None),
        ('bigon_coherent_outside', facts(2, feelers=1, outside=BOTH_IN), None),
        ('two_angled_menu', facts(2, outside=MIXED), 0),
        ('two_angled_menu', facts(2, directed=True, outside=MIXED), 1),
        ('two_angled_menu', facts(2, feelers=1), 1),
        ('two_angled_menu', facts(3), None),
        ('triangle_menu', facts(3), 0),
        ('triangle_menu', facts(3, directed=True), 1),
        ('triangle_menu', facts(3, feelers=3), None),
        ('bigon_extended_menu', facts(2, feelers=1), 1),
        ('bigon_extended_menu', facts(2, directed=True, outside=BOTH_IN), 1),
        ('bigon_extended_menu', facts(2, directed=True, outside=MIXED), 2),
        ('triangle_single_interior_menu', facts(3, directed=True), 1),
        ('io_balance', facts(3, corners=[CornerDart(OUTWARD, False)] * 3), 2),
        ('io_balance', facts(2, corners=[CornerDart(OUTWARD, True), CornerDart(INWARD, True)]), 0),
    ])
    def test_disk_bounds(self, rulebase, rule_id, disk, expected):
        assert rulebase.get(rule_id).disk_bound(disk) == expected

    def test_largest_bound_wins(self, rulebase):
        best, rule_id = rulebase.disk_bound(facts(5, feelers=2))
        assert (best, rule_id) == (2, 'pentagon_two_feelers')

    def test_cited_rule_wins_ties(self, rulebase):
        disk = facts(2, directed=True, outside=BOTH_IN, corners=[CornerDart(OUTWARD, False)] * 2 +
                     [CornerDart(INWARD, False)])
        assert rulebase.disk_bound(disk) == (1, 'bigon_coherent_outside')

    def test_silent_rules_give_zero(self, rulebase):
        assert rulebase.subset(['pentagon_one_feeler']).disk_bound(facts(3)) == (0, None)

    def test_cited_only_leaves_derived_rules_out(self, rulebase):
        disk = facts(3, corners=[CornerDart(OUTWARD, False)] * 3)
        assert rulebase.disk_bound(disk) == (2, 'io_balance')
        assert rulebase.disk_bound(disk, cited_only=True) == (0, None)

    def test_cited_rules_carry_their_source(self, rulebase):
        cited = [r for r in rulebase.rules if r.trust == 'cited']
        assert cited
        assert all(r.cite and r.quote for r in cited)
        assert rulebase.get('square_one_feeler').cite.startswith('Corollary 6.3')

    def test_cited_stanza_parses(self):
        text = ("rules:\n  - {id: a, kind: structural, trust: cited, cite: L, quote: q, "
                "statement: s, filter: connected}\n")
        (rule,) = parse_rulebase(text).rules
        assert (rule.cite, rule.quote) == ('L', 'q')


class TestBranches:

    def test_branch_count(self, catalog):
        for name in ('theta_003', 'twin_bigons', 'k4_subdivided'):
            t = catalog.entry(name)
            assert count_branches(t) == sum(1 for _ in branches(t))

    def test_one_disk_per_face(self, catalog):
        for branch in branches(catalog.entry('theta_111')):
            assert len(branch.disks) == len(branch.expanded.faces())
            assert not branch.expanded.bw_ids()

    def test_disk_whites(self, catalog):
        branch = next(branches(catalog.entry('theta_003')))
        disks = template_disks(branch.expanded)
        assert sorted(d.angled_k for d in disks)[-1] <= 5
        assert sum(d.feelers for d in disks) == len(branch.expanded.blacks())


class TestSums:

    def test_closing_sum(self):
        assert closing_sum(5, [1, 2, 0], 7) == [1, 2]
        assert closing_sum(5, [1], 7) is None
        assert closing_sum(8, [], 7) == []
        assert sum_text(5, [1, 2]) == '5 + 1 + 2 = 8'


class TestOrientations:

    def test_k4_cases(self, verifier):
        census = verifier.enumerate_orientations(verifier.catalog.entry('k4_subdivided'))
        assert len(census.classes) == 3
        assert {c.name for c in census.classes} == {
            'k4_subdivided_first_square', 'k4_subdivided_second_square', 'k4_subdivided_lone_entry'}
        assert census.conserved

    def test_twin_bigon_cases(self, verifier):
        census = verifier.enumerate_orientations(verifier.catalog.entry('twin_bigons'))
        assert len(census.classes) == 4
        assert {c.name for c in census.classes} == {
            'twin_bigons_cycle_closed', 'twin_bigons_cycle_open', 'twin_bigons_fork', 'twin_bigons_parallel'}
        assert census.conserved


class TestExclusion:

    def test_pipeline(self, pipeline_report, catalog):
        assert sorted(pipeline_report.survivors) == ['dumbbell_102', 'dumbbell_111']
        assert sorted(pipeline_report.excluded) == sorted(catalog.names('candidates'))
        assert pipeline_report.incomplete == []

    def test_every_branch_closes(self, pipeline_report):
        for name in pipeline_report.excluded:
            verdict = pipeline_report.verdict(name)
            if verdict.branch_count:
                assert verdict.branch_count == len(verdict.branches)
            assert all(b.status == CLOSED for b in verdict.branches)

    def test_recheck(self, pipeline_report, rulebase):
        assert recheck(pipeline_report, rulebase) == []

    def test_recheck_catches_a_forged_sum(self, pipeline_report, rulebase):
        forged = copy.deepcopy(pipeline_report)
        for verdict in forged.verdicts:
            for branch in verdict.branches:
                if branch.closed_by == ARITHMETIC:
                    branch.steps[0].bound += 5
                    assert recheck(forged, rulebase)
                    return
        pytest.fail('no arithmetic branch to forge')

    def test_report_survives_json(self, pipeline_report, rulebase):
        again = VerificationReport.from_dict(pipeline_report.to_dict())
        assert again.excluded == pipeline_report.excluded
        assert recheck(again, rulebase) == []

    def test_crowded_pentagon_sum(self, verifier, rulebase):
        subset = rulebase.subset(['bigon_coherent_outside', 'pentagon_two_feelers'])
        verdict = verifier.exclude_candidate(verifier.catalog.entry('theta_003'), subset)
        assert verdict.verdict == EXCLUDED
        assert '5 + 1 + 2 = 8' in verdict.sums()

    def test_three_square_sum(self, verifier, rulebase):
        subset = rulebase.subset(['square_one_feeler', 'square_two_feelers'])
        verdict = verifier.exclude_candidate(verifier.catalog.entry('theta_111'), subset)
        assert verdict.verdict == EXCLUDED
        assert '5 + 1 + 1 + 1 = 8' in verdict.sums()

    def test_three_square_sum_with_every_rule(self, pipeline_report):
        assert '5 + 1 + 1 + 1 = 8' in pipeline_report.verdict('theta_111').sums()

    def test_claims_name_their_lemma(self, pipeline_report):
        assert pipeline_report.verdict('theta_003').lemma == 'Lemma 7.4'
        assert pipeline_report.verdict('twin_bigons').lemma == 'Proposition 14.5'
        for name in pipeline_report.survivors:
            assert pipeline_report.verdict(name).lemma is None

    def test_missing_rule_leaves_claim_incomplete(self, verifier, rulebase):
        verdict = verifier.exclude_candidate(verifier.catalog.entry('theta_003'),
                                             rulebase.without(['pentagon_two_feelers']))
        assert verdict.verdict == SURVIVES
        assert verdict.incomplete
        assert verdict.open_branches

    def test_strict_mode_raises(self, base_config, rulebase, catalog):
        config = copy.deepcopy(base_config)
        config['verify']['strict'] = True
        strict = Verifier(config, rulebase, catalog)
        with pytest.raises(RulebaseIncomplete) as excinfo:
            strict.exclude_candidate(catalog.entry('theta_003'), rulebase.without(['pentagon_two_feelers']))
        assert excinfo.value.open_branches > 0

    def test_larger_budget_lets_candidate_survive(self, verifier):
        verdict = verifier.exclude_candidate(verifier.catalog.entry('theta_003'), w_total=9)
        assert verdict.verdict == SURVIVES

    def test_structural_rejection(self, verifier):
        lone = parse_template("graph lone\nwhite w1 ports=p1,p2,p3\nblack b1 port=q1\n"
                              "edge e1 p1-p2\nedge e2 p3-q1\n")
        verdict = verifier.exclude_candidate(lone)
        assert verdict.verdict == EXCLUDED
        assert verdict.branches[0].steps[0].rule == 'no_single_white_component'

    def test_survivors_keep_open_branches(self, pipeline_report):
        for name in pipeline_report.survivors:
            assert pipeline_report.verdict(name).open_branches


class TestReports:

    def test_markdown_summary(self, pipeline_report, config):
        text = Reporter(config).summary_markdown(pipeline_report)
        assert text.startswith('# Verification summary')
        assert '| candidate' in text
        assert '## theta_003' in text
        assert '5 + 1 + 2 = 8' in text

    def test_json_export(self, pipeline_report, config, tmp_path):
        path = tmp_path / 'report.json'
        Reporter(config).export_json(pipeline_report, path)
        data = path.read_text()
        assert '"schema": 1' in data
        assert '"w_total": 7' in data

    def test_json_carries_lemmas_and_citations(self, pipeline_report, config, tmp_path):
        path = tmp_path / 'report.json'
        Reporter(config).export_json(pipeline_report, path)
        data = json.loads(path.read_text())
        by_name = {v['candidate']: v for v in data['verdicts']}
        assert by_name['theta_111']['lemma'] == 'Lemma 7.5'
        assert data['citations']['pentagon_two_feelers'] == pipeline_report.citations['pentagon_two_feelers']

    def test_summary_shows_lemmas(self, pipeline_report, config):
        text = Reporter(config).summary_markdown(pipeline_report)
        assert '- lemma: Lemma 7.4' in text

import itertools

import pytest

from catalog.enumerator import FILTERS, Enumerator
from catalog.library import CANDIDATES, K4_CASES, REFINED, SURVIVORS, TWIN_BIGON_CASES
from catalog.matcher import chart_from_template, contains_template, embed, terminal_expansions
from catalog.template import (T_WHITE, orientation_assignments, parse_template, render_template,
                              ro_canonical, ro_equivalent_bruteforce)
from chart.textio import build_chart
from chart.validator import validate
from common.errors import BudgetExceeded, ChartForgeError, DanglingReference, ParseError
from features.strands import strand_components, strands
from regions.disks import complementary_disks


@pytest.fixture(scope='module')
def shapes(catalog):
    return catalog.group(SURVIVORS) + catalog.group(CANDIDATES)


@pytest.fixture(scope='module')
def enumeration(base_config):
    return Enumerator(base_config).enumerate_components(5, 'paper')


class TestCatalog:

    @pytest.mark.parametrize('group,size', [
        (SURVIVORS, 2), (CANDIDATES, 7), (REFINED, 4), (K4_CASES, 3), (TWIN_BIGON_CASES, 4),
    ])
    def test_group_sizes(self, catalog, group, size):
        assert len(catalog.group(group)) == size

    def test_unknown_entry(self, catalog):
        with pytest.raises(DanglingReference):
            catalog.entry('no_such_graph')

    def test_shapes_have_five_whites(self, shapes):
        assert all(len(t.whites()) == 5 for t in shapes)

    def test_canonical_forms_are_distinct(self, shapes):
        forms = {ro_canonical(t).canonical_form for t in shapes}
        assert len(forms) == len(shapes)

    def test_bruteforce_agrees_with_canonical_forms(self, shapes):
        for s, t in itertools.combinations(shapes, 2):
            same = ro_canonical(s).canonical_form == ro_canonical(t).canonical_form
            assert ro_equivalent_bruteforce(s, t) == same, (s.name, t.name)

    def test_mirror_and_reverse_stay_in_class(self, shapes):
        for t in shapes:
            form = ro_canonical(t).canonical_form
            assert ro_canonical(t.mirrored()).canonical_form == form
            assert ro_canonical(t.reversed()).canonical_form == form

    def test_text_round_trip(self, shapes):
        for t in shapes:
            again = parse_template(render_template(t))
            assert ro_canonical(again).canonical_form == ro_canonical(t).canonical_form
            assert embed(t, again) is not None

    def test_identify(self, catalog, shapes):
        for t in shapes:
            assert catalog.identify(ro_canonical(t)) == t.name

    def test_refined_forms_are_instances_of_their_candidates(self, catalog):
        for refined in catalog.group(REFINED):
            base = catalog.entry(refined.name.replace('_oriented', ''))
            assert embed(base, refined) is not None, refined.name


class TestTemplateParsing:

    def test_unknown_port(self):
        text = "graph t\nwhite w1 ports=a,b,c\nedge e1 a-zz\n"
        with pytest.raises(ChartForgeError):
            parse_template(text)

    def test_missing_header(self):
        with pytest.raises(ParseError):
            parse_template("white w1 ports=a,b,c\n")


class TestRealization:

    def test_realized_candidates_are_valid_and_found(self, shapes):
        for t in shapes:
            chart = chart_from_template(t, m=1)
            assert validate(chart).ok, t.name
            assert contains_template(chart, t, m=1) is not None, t.name

    def test_orientations_respect_the_white_condition(self, catalog):
        t = catalog.entry('theta_111')
        for oriented in orientation_assignments(t):
            assert oriented.is_oriented()
            for v in oriented.vertices.values():
                if v.kind == T_WHITE:
                    assert len({oriented.direction(p) for p in v.ports}) == 2

    def test_contains_agrees_with_bruteforce(self, shapes):
        for t in shapes:
            chart = chart_from_template(t, m=1)
            for s in shapes:
                found = contains_template(chart, s, m=1, ro=True) is not None
                assert found == ro_equivalent_bruteforce(s, t), (t.name, s.name)

    def test_twin_bigons_is_not_theta_003(self, catalog):
        chart = chart_from_template(catalog.entry('twin_bigons'), m=1)
        assert contains_template(chart, catalog.entry('theta_003')) is None
        assert contains_template(chart, catalog.entry('twin_bigons')) is not None

    def test_empty_chart_holds_no_template(self, shapes):
        empty = build_chart("chart n=4\n")
        assert all(contains_template(empty, t) is None for t in shapes)

    def test_realized_disk_angles(self, shapes):
        found = set()
        for t in shapes:
            chart = chart_from_template(t, m=1)
            strand_list = strands(chart, 1)
            (component,) = [c for c in strand_components(chart, 1, strand_list) if c.whites]
            disks = complementary_disks(chart, component, strand_list)
            found.add(tuple(sorted(d.angled_k for d in disks)))
        assert {(2, 5, 5), (3, 4, 5), (3, 3, 4, 4)} <= found

    def test_terminal_expansions(self, catalog):
        t = catalog.entry('twin_bigons')
        expanded = list(terminal_expansions(t))
        assert len(expanded) == 2
        assert all(len(e.blacks()) == 1 and not e.bw_ids() for e in expanded)


class TestEnumeration:

    def test_nine_classes_at_five_whites(self, enumeration, catalog, shapes):
        assert len(enumeration.classes) == 9
        names = {catalog.identify(c) for c in enumeration.classes}
        assert names == {t.name for t in shapes}

    def test_provenance_covers_every_class(self, enumeration):
        table = enumeration.provenance
        assert len(table) >= 9
        assert table['rejected_by'].isna().sum() == 9
        assert sum(enumeration.kill_counts().values()) == len(enumeration.rejected)

    def test_loose_preset_keeps_more(self, base_config, enumeration):
        loose = Enumerator(base_config).enumerate_components(5, 'loose')
        assert len(loose.classes) > len(enumeration.classes)

    def test_budget(self, base_config):
        with pytest.raises(BudgetExceeded):
            Enumerator(base_config).enumerate_components(7, 'paper')

    def test_unknown_filter(self, base_config):
        with pytest.raises(ChartForgeError):
            Enumerator(base_config).enumerate_components(3, filters=['no_such_filter'])

    def test_paper_filters_carry_citations(self, enumeration):
        assert enumeration.filters[0] == 'connected'
        assert set(enumeration.citations) == set(enumeration.filters)
        assert enumeration.citations['min_white'].startswith('Lemma 4.1')

    def test_minimal_is_an_alias(self, base_config):
        enumerator = Enumerator(base_config)
        assert enumerator.resolve_filters('minimal') == enumerator.resolve_filters('paper')
        assert enumerator.resolve_filters() == enumerator.resolve_filters('paper')

    def test_min_white_filter(self, catalog):
        assert FILTERS['min_white'](catalog.entry('theta_003'))

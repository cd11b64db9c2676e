import pytest

from chart.textio import build_chart
from chart.validator import check_assumptions, validate
from common.errors import LabelOutOfRange, NotIncident
from features.strands import (FREE, HOOP, INTERNAL, LOOP, RING, TERMINAL, all_strands, bw_vertices, flank_edges,
                              is_middle, middle_darts, strand_components, strands)

STAR = """
chart n=3
white w1 darts=a1,a2,a3,a4,a5,a6
black b1 darts=c1
black b2 darts=c2
black b3 darts=c3
black b4 darts=c4
black b5 darts=c5
black b6 darts=c6
edge e1 label=1 tail=c1 head=a1
edge e2 label=2 tail=c2 head=a2
edge e3 label=1 tail=c3 head=a3
edge e4 label=2 tail=a4 head=c4
edge e5 label=1 tail=a5 head=c5
edge e6 label=2 tail=a6 head=c6
"""

HOOP_CHART = """
chart n=3
phantom p1 darts=h1,h2
edge e1 label=1 tail=h1 head=h2
"""

LOOP_CHART = """
chart n=3
white w1 darts=a1,a2,a3,a4,a5,a6
black c2 darts=d2
black c3 darts=d3
black c4 darts=d4
black c6 darts=d6
edge e1 label=1 tail=a5 head=a1
edge e2 label=2 tail=d2 head=a2
edge e3 label=1 tail=d3 head=a3
edge e4 label=2 tail=a4 head=d4
edge e6 label=2 tail=a6 head=d6
"""

RING_CHART = """
chart n=5
cross x darts=xs,xe,xn,xw
black b1 darts=y1
black b2 darts=y2
edge r label=1 tail=xn head=xs
edge f1 label=3 tail=y1 head=xe
edge f2 label=3 tail=xw head=y2
"""


@pytest.fixture
def star():
    return build_chart(STAR)


class TestStrandClasses:

    def test_internal_strands(self, white_pair):
        found = strands(white_pair, 1)
        assert len(found) == 3
        assert {s.strand_class for s in found} == {INTERNAL}
        assert sorted(e for s in found for e in s.edges) == ['e1', 'e3', 'e5']

    def test_strands_run_along_orientation(self, white_pair):
        for s in strands(white_pair, 2):
            assert white_pair.direction(s.end_darts[0]) == 'out'

    def test_terminal_strands(self, star):
        assert validate(star).ok
        found = all_strands(star)
        assert len(found) == 6
        assert {s.strand_class for s in found} == {TERMINAL}

    def test_free_edge(self, chart_file):
        (strand,) = all_strands(chart_file('free_edge.chart'))
        assert strand.strand_class == FREE

    def test_hoop(self):
        chart = build_chart(HOOP_CHART)
        assert validate(chart).ok
        (strand,) = strands(chart, 1)
        assert strand.closed
        assert strand.strand_class == HOOP

    def test_label_out_of_range(self, white_pair):
        with pytest.raises(LabelOutOfRange):
            strands(white_pair, 3)

    def test_loop(self):
        chart = build_chart(LOOP_CHART)
        assert validate(chart).ok
        by_edge = {s.edges[0]: s for s in all_strands(chart)}
        loop = by_edge['e1']
        assert loop.strand_class == LOOP
        assert loop.endpoints == ('w1', 'w1')
        assert loop.simple
        assert by_edge['e3'].strand_class == TERMINAL

    def test_ring(self):
        chart = build_chart(RING_CHART)
        assert validate(chart).ok
        (ring,) = strands(chart, 1)
        assert ring.closed
        assert ring.strand_class == RING
        assert ring.crossings == ('x',)
        (through,) = strands(chart, 3)
        assert through.strand_class == FREE
        assert through.crossings == ('x',)


class TestMiddle:

    def test_middle_darts(self, white_pair):
        assert sorted(middle_darts(white_pair, 'w1')) == ['a2', 'a5']

    def test_one_middle_per_label(self, white_pair):
        for white in ('w1', 'w2'):
            labels = sorted(white_pair.label(d) for d in middle_darts(white_pair, white))
            assert labels == [1, 2]

    def test_is_middle(self, star):
        by_edge = {s.edges[0]: s for s in all_strands(star)}
        assert is_middle(star, by_edge['e2'], 'w1')
        assert is_middle(star, by_edge['e5'], 'w1')
        assert not is_middle(star, by_edge['e1'], 'w1')

    def test_is_middle_needs_incidence(self, star):
        strand = strands(star, 1)[0]
        with pytest.raises(NotIncident):
            is_middle(star, strand, 'b2')

    def test_non_middle_terminals_break_assumptions(self, star):
        report = check_assumptions(star)
        assert report.rules() == ['terminal_middle']
        assert len(report.violations) == 4

    def test_simple_hoop_is_reported_once(self):
        report = check_assumptions(build_chart(HOOP_CHART))
        assert [v.rule for v in report.violations] == ['no_simple_hoop']

    def test_ring_without_whites(self):
        chart = build_chart(RING_CHART)
        (ring,) = strands(chart, 1)
        report = check_assumptions(chart)
        assert [v.rule for v in report.violations if v.location == ring.id] == ['domain_has_white']
        assert report.rules() == ['domain_has_white', 'no_free_edge']


class TestComponents:

    def test_white_pair_component(self, white_pair):
        (component,) = strand_components(white_pair, 1)
        assert component.whites == ('w1', 'w2')
        assert component.blacks == ()
        assert len(component.strands) == 3

    def test_bw_vertices(self, star, white_pair):
        assert bw_vertices(star, 1) == ['w1']
        assert bw_vertices(white_pair, 1) == []

    def test_flank_edges(self, white_pair):
        found = strands(white_pair, 1)
        by_edge = {s.edges[0]: s for s in found}
        before, after = flank_edges(white_pair, 'w1', by_edge['e3'], found)
        assert before.edges == ('e1',)
        assert after.edges == ('e5',)

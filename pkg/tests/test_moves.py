import random
from collections import Counter

import pytest

from chart.isomorphism import isomorphic
from chart.textio import build_chart
from chart.validator import validate
from common.errors import BlockedPath, InvalidResult, ParseError
from features.strands import HOOP, all_strands
from moves.engine import Counts, apply, move_black_along, rewrite, search_reductions
from moves.matcher import find_sites
from moves.template import Effect, inverse_template, parse_move_template, template_library, variants


FREE_PAIR = """
chart n=5
black b1 darts=x
black b2 darts=y
black b3 darts=u
black b4 darts=v
edge e1 label=1 tail=x head=y
edge e2 label=3 tail=u head=v
place b1 in root
place b3 via u in face(x)
"""

HOOP_AND_EDGE = """
chart n=5
black b1 darts=x
black b2 darts=y
phantom p1 darts=h1,h2
edge e1 label=1 tail=x head=y
edge e2 label=3 tail=h1 head=h2
place b1 in root
place p1 via h1 in face(x)
"""

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

WALK_SEEDS = ("chart n=4\n", FREE_PAIR, STAR)


def undoes(chart, site, original, library):
    """Some site of the inverse template takes `chart` back to `original`."""
    for back in find_sites(chart, library[site.template.inverse], dedupe=False):
        try:
            if isomorphic(rewrite(chart, back), original):
                return True
        except InvalidResult:
            continue
    return False


@pytest.fixture(scope='module')
def library():
    return template_library()


class TestTemplateLibrary:

    def test_builtin_families(self, library):
        families = {t.family for t in library.values()}
        assert {'CI-R2', 'CI-M1', 'CI-M2', 'CI-M3', 'C-II', 'C-III'} <= families

    def test_every_template_has_its_inverse(self, library):
        for template in library.values():
            assert template.inverse in library, template.key

    def test_inverse_of_inverse(self, library):
        push = library['c_ii_push']
        back = inverse_template(inverse_template(push))
        assert back.key == push.key
        assert back.before.signature() == push.before.signature()
        assert back.effect == push.effect

    def test_inverse_negates_effect(self, library):
        assert library['ci_m1_death'].effect.hoops == -1
        assert Effect(w=2, f=None).negated() == Effect(w=-2, f=None, hoops=0, crossings=0)

    def test_variants_are_distinct(self, library):
        found = variants(library['c_ii_push'])
        assert 1 <= len(found) <= 4
        assert found[0].variant == 'identity'


class TestTemplateParsing:

    def test_missing_header(self):
        with pytest.raises(ParseError):
            parse_move_template("vars i\nbefore\nafter\n")

    def test_legs_must_be_numbered_in_order(self):
        text = """
template broken
vars i
leg 1 label=i dir=in
before
after
"""
        with pytest.raises(ParseError):
            parse_move_template(text)

    def test_fragment_line_outside_section(self):
        with pytest.raises(ParseError):
            parse_move_template("template t\nedge a label=i tail=@0 head=@1\n")


class TestApply:

    def test_hoop_birth_and_death(self, library):
        empty = build_chart("chart n=3\n")
        sites = [s for s in find_sites(empty, library['ci_m1_birth']) if s.labels == {'i': 1}]
        assert sites
        born = apply(empty, sites[0])
        assert validate(born).ok
        assert [s.strand_class for s in all_strands(born)] == [HOOP]
        assert Counts.of(empty).delta(Counts.of(born))['hoops'] == 1

        deaths = find_sites(born, library['ci_m1_death'])
        assert deaths
        assert apply(born, deaths[0]).is_empty

    def test_births_cover_every_label(self, library):
        empty = build_chart("chart n=4\n")
        labels = {s.labels['i'] for s in find_sites(empty, library['ci_m1_birth'])}
        assert labels == {1, 2, 3}

    def test_blocked_path(self, chart_file):
        with pytest.raises(BlockedPath):
            move_black_along(chart_file('free_edge.chart'), 'b1', ['nope'])

    def test_search_finds_nothing_on_empty_chart(self, library):
        result = search_reductions(build_chart("chart n=3\n"), library.values(), bound=1)
        assert not result.found


class TestOpenArcs:

    def test_open_directive(self, library):
        assert library['c_ii_push'].open_arcs == ('a',)
        assert library['ci_m2'].open_arcs == ('a', 'b')

    def test_inverse_arcs_are_open(self, library):
        assert library['c_iii_expand'].open_arcs == ('a', 'b')
        assert library['c_ii_pull'].open_arcs == ()

    @pytest.mark.parametrize('line', ['open', 'open z', 'open t'])
    def test_open_names_a_before_arc(self, line):
        text = f"""
template t
vars i j
{line}
leg 0 label=i dir=in
leg 1 label=j dir=in
leg 2 label=j dir=out
before
black b darts=b0
edge t label=i tail=@0 head=b0
edge a label=j tail=@1 head=@2
after
black b darts=b0
edge t label=i tail=@0 head=b0
edge a label=j tail=@1 head=@2
"""
        with pytest.raises(ParseError):
            parse_move_template(text)


class TestSites:

    def test_dedupe_on_a_black_vertex_site(self, library):
        chart = build_chart(FREE_PAIR)
        every = find_sites(chart, library['c_ii_push'], dedupe=False)
        kept = find_sites(chart, library['c_ii_push'])
        assert kept
        assert len(kept) <= len(every)
        assert all(len(s.touched_vertices()) == 1 for s in kept)

    def test_push_is_undone_by_pull(self, library):
        chart = build_chart(FREE_PAIR)
        pushed = move_black_along(chart, 'b2', ['e2'])
        assert validate(pushed).ok
        assert Counts.of(pushed).crossings == 1
        assert Counts.of(pushed).f == Counts.of(chart).f
        site = next(s for s in find_sites(chart, library['c_ii_push'], dedupe=False)
                    if s.touched_vertices() == ('b2',))
        assert undoes(pushed, site, chart, library)

    def test_no_push_across_a_hoop(self, library):
        chart = build_chart(HOOP_AND_EDGE)
        assert validate(chart).ok
        sites = find_sites(chart, library['c_ii_push'], dedupe=False)
        assert not any('e2' in dict(s.arcs).values() for s in sites)
        with pytest.raises(BlockedPath):
            move_black_along(chart, 'b2', ['e2'])

    def test_hoop_arcs_stay_out_of_band_moves(self, library):
        chart = build_chart(HOOP_AND_EDGE)
        for key in ('ci_r2_codirected', 'ci_r2_opposed', 'ci_m2'):
            for site in find_sites(chart, library[key], dedupe=False):
                assert 'e2' not in dict(site.arcs).values(), site.describe()


def walk_options(chart, library):
    options = {}
    for key in sorted(library):
        sites = find_sites(chart, library[key], dedupe=False)
        if sites:
            options[key] = sites
    return options


class TestMoveWalk:

    def test_random_walk(self, library):
        rng = random.Random(1729)
        seeds = [build_chart(text) for text in WALK_SEEDS]
        chart = seeds[0]
        families = Counter()
        applied = 0
        while applied < 1000:
            if len(chart.components) > 2 or len(chart.vertices) > 12 or rng.random() < 0.05:
                chart = rng.choice(seeds)
            options = walk_options(chart, library)
            site = rng.choice(options[rng.choice(sorted(options))])
            result = apply(chart, site)
            assert validate(result).ok, site.describe()
            delta = Counts.of(chart).delta(Counts.of(result))
            for name, declared in site.template.effect.as_dict().items():
                if declared is not None:
                    assert delta[name] == declared, site.describe()
            assert undoes(result, site, chart, library), site.describe()
            families[site.template.family] += 1
            applied += 1
            chart = result
        assert {'CI-M1', 'CI-M2', 'CI-M3', 'CI-R2', 'C-II', 'C-III'} <= set(families)

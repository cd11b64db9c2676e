import pytest

from chart.analysis import chart_type, complexity, gamma, move_infinity, reflect, reverse
from chart.isomorphism import canonical_code, isomorphic
from chart.model import WHITE
from chart.textio import build_chart, load_chart, render_text
from chart.validator import check_assumptions, validate
from common.errors import DanglingReference, InvalidChart, LabelOutOfRange, ParseError


def euler_holds(chart):
    v = len(chart.vertices)
    e = len(chart.real_edges())
    f = len(chart.face_list)
    return v - e + f == 1 + len(chart.components)


class TestBuildAndValidate:

    def test_white_pair_is_valid(self, white_pair):
        report = validate(white_pair)
        assert report.ok, report.violations
        assert white_pair.vertices_of_kind(WHITE) == ['w1', 'w2']
        assert len(white_pair.face_list) == 6
        assert euler_holds(white_pair)

    def test_empty_chart(self):
        chart = build_chart("chart n=3\n")
        assert chart.is_empty
        assert validate(chart).ok
        assert complexity(chart) == (0, 0)

    def test_free_edge_counts_in_complexity(self, chart_file):
        chart = chart_file('free_edge.chart')
        assert validate(chart).ok
        assert complexity(chart) == (0, -1)
        assert 'no_free_edge' in check_assumptions(chart).rules()

    def test_degree_violation_is_reported(self, chart_file):
        report = validate(chart_file('bad_degree.chart'))
        assert not report.ok
        assert 'degree' in report.rules()

    def test_label_out_of_range(self):
        chart = build_chart("""
chart n=2
black b1 darts=x
black b2 darts=y
edge e1 label=3 tail=x head=y
""")
        assert 'label_range' in validate(chart).rules()

    def test_white_alternation(self):
        text = """
chart n=3
white w1 darts=a1,a2,a3,a4,a5,a6
white w2 darts=b6,b5,b4,b3,b2,b1
edge e1 label=1 tail=b1 head=a1
edge e2 label=1 tail=b2 head=a2
edge e3 label=2 tail=b3 head=a3
edge e4 label=2 tail=a4 head=b4
edge e5 label=1 tail=a5 head=b5
edge e6 label=2 tail=a6 head=b6
"""
        assert 'white_condition' in validate(build_chart(text)).rules()

    def test_chart_type(self, white_pair):
        assert chart_type(white_pair) == (1, [2])

    def test_label_view(self, white_pair):
        view = gamma(white_pair, 1)
        assert view.edges == ('e1', 'e3', 'e5')
        assert view.vertices == ('w1', 'w2')
        assert view.crossings == ()
        with pytest.raises(LabelOutOfRange):
            gamma(white_pair, 3)


class TestParseErrors:

    @pytest.mark.parametrize('text', [
        "white w1 darts=a\n",
        "chart n=3\nsquare s1 darts=a\n",
        "chart n=3\nedge e1 label=x tail=a head=b\n",
        "chart n=3\nblack b1 darts=a\nblack b1 darts=b\n",
        "chart n=3\nblack b1\n",
        "chart n=3\nedge e1 label=1 tail=a\n",
    ])
    def test_malformed_text(self, text):
        with pytest.raises(ParseError):
            build_chart(text)

    def test_line_number_is_kept(self):
        with pytest.raises(ParseError) as excinfo:
            build_chart("chart n=3\n\nfoo bar\n")
        assert excinfo.value.line_no == 3

    def test_unknown_infinity_dart(self):
        with pytest.raises(DanglingReference):
            build_chart("chart n=3\nblack b1 darts=x\nblack b2 darts=y\n"
                        "edge e1 label=1 tail=x head=y\ninfinity face(zz)\n")


class TestSerialization:

    def test_round_trip_is_isomorphic(self, white_pair):
        again = build_chart(render_text(white_pair))
        assert isomorphic(white_pair, again)
        assert render_text(again) == render_text(white_pair)

    def test_two_components_round_trip(self):
        chart = build_chart("""
chart n=4
black b1 darts=x
black b2 darts=y
black b3 darts=u
black b4 darts=v
edge e1 label=1 tail=x head=y
edge e2 label=3 tail=u head=v
place b1 in root
place b3 via u in face(x)
""")
        assert validate(chart).ok
        assert len(chart.components) == 2
        text = render_text(chart)
        assert render_text(build_chart(text)) == text


class TestSymmetries:

    def test_reflect_and_reverse_stay_valid(self, white_pair):
        for chart in (reflect(white_pair), reverse(white_pair)):
            assert validate(chart).ok
            assert euler_holds(chart)

    def test_double_reflection_is_identity(self, white_pair):
        assert canonical_code(reflect(reflect(white_pair))) == canonical_code(white_pair)

    def test_reverse_changes_directions(self, white_pair):
        flipped = reverse(white_pair)
        assert flipped.direction('a1') != white_pair.direction('a1')

    def test_move_infinity(self, white_pair):
        moved = move_infinity(white_pair, 'a3')
        assert moved.infinity_face.key == white_pair.face_of('a3').key
        with pytest.raises(DanglingReference):
            move_infinity(white_pair, 'nope')

    def test_white_labels_on_invalid_chart(self):
        chart = build_chart("""
chart n=4
white w1 darts=a1,a2,a3,a4,a5,a6
black b1 darts=c1
black b2 darts=c2
black b3 darts=c3
black b4 darts=c4
black b5 darts=c5
black b6 darts=c6
edge e1 label=1 tail=c1 head=a1
edge e2 label=2 tail=c2 head=a2
edge e3 label=3 tail=c3 head=a3
edge e4 label=1 tail=a4 head=c4
edge e5 label=2 tail=a5 head=c5
edge e6 label=3 tail=a6 head=c6
""")
        with pytest.raises(InvalidChart):
            chart_type(chart)


class TestDefaultDegree:

    def test_header_is_needed_without_a_default(self):
        with pytest.raises(ParseError):
            build_chart("black b1 darts=x\nblack b2 darts=y\nedge e1 label=1 tail=x head=y\n")

    def test_default_applies_without_a_header(self, tmp_path):
        path = tmp_path / 'free.chart'
        path.write_text("black b1 darts=x\nblack b2 darts=y\nedge e1 label=1 tail=x head=y\n")
        assert load_chart(str(path), 5).degree_n == 5

    def test_header_wins_over_the_default(self):
        assert build_chart("chart n=3\n", 6).degree_n == 3

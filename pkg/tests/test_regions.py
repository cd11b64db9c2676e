import pytest

from catalog.library import CANDIDATES, SURVIVORS
from catalog.matcher import chart_from_template
from chart.analysis import reflect, reverse
from chart.textio import build_chart
from features.strands import INTERNAL, TERMINAL, middle_darts, strand_components, strand_index, strands
from regions.disks import (MIXED, complementary_disks, disk_facts, feelers, interior_whites, is_special,
                           local_complexity)
from regions.lenses import DOUBLE_MIDDLE, NO_MIDDLE, find_lenses

# label 2 between whites of types (1, 2) and (2, 3)
MIXED_PAIR = """
chart n=4
white w1 darts=a1,a2,a3,a4,a5,a6
white w2 darts=b6,b5,b4,b3,b2,b1
black c2 darts=d2
black c4 darts=d4
black c6 darts=d6
black k2 darts=g2
black k4 darts=g4
black k6 darts=g6
edge e1 label=2 tail=b1 head=a1
edge e3 label=2 tail=b3 head=a3
edge e5 label=2 tail=a5 head=b5
edge t2 label=1 tail=d2 head=a2
edge t4 label=1 tail=a4 head=d4
edge t6 label=1 tail=a6 head=d6
edge u2 label=3 tail=b2 head=g2
edge u4 label=3 tail=g4 head=b4
edge u6 label=3 tail=g6 head=b6
"""


def naive_feelers(chart, disk, strand_list):
    """Strands at a boundary white lying wholly inside the disk, boundary strands aside."""
    faces = set(disk.faces)
    on_boundary = {sid for sid, _ in disk.boundary}
    found = set()
    for s in strand_list:
        if s.id in on_boundary or s.closed:
            continue
        if not any(v in disk.boundary_whites for v in s.endpoints):
            continue
        if all(chart.face_of(d).key in faces for d in s.darts):
            found.add(s.id)
    return found


def bigon_lenses(chart, m):
    """Faces bounded by exactly one internal edge of label m and one of label m+1."""
    index = strand_index(strands(chart, m) + strands(chart, m + 1))
    found = set()
    for face in chart.face_list:
        if face.hosted:
            continue
        sides = {index[d].id: index[d] for d in face.darts if d in index}
        if len(sides) != 2 or len(face.darts) != 2:
            continue
        lower = [s for s in sides.values() if s.label == m]
        upper = [s for s in sides.values() if s.label == m + 1]
        if len(lower) != 1 or len(upper) != 1:
            continue
        e1, e2 = lower[0], upper[0]
        if {e1.strand_class, e2.strand_class} != {INTERNAL} or set(e1.endpoints) != set(e2.endpoints):
            continue
        w1, w2 = e1.endpoints
        mid = set(middle_darts(chart, w1)) | set(middle_darts(chart, w2))
        ends = [set(e1.end_darts) & mid, set(e2.end_darts) & mid]
        if not ends[0] and not ends[1]:
            found.add((e1.id, e2.id, face.key, NO_MIDDLE))
        elif len(ends[0]) == 2 or len(ends[1]) == 2:
            found.add((e1.id, e2.id, face.key, DOUBLE_MIDDLE))
    return found


@pytest.fixture
def label_one_disks(white_pair):
    strand_list = strands(white_pair, 1)
    (component,) = strand_components(white_pair, 1, strand_list)
    disks = complementary_disks(white_pair, component, strand_list)
    return disks, [disk_facts(white_pair, d, strand_list) for d in disks]


class TestComplementaryDisks:

    def test_three_bigons(self, label_one_disks):
        disks, facts = label_one_disks
        assert len(disks) == 3
        assert all(d.angled_k == 2 for d in disks)
        assert all(set(d.boundary_whites) == {'w1', 'w2'} for d in disks)

    def test_bigon_facts(self, label_one_disks):
        _, facts = label_one_disks
        assert all(f.feelers == 0 and f.special for f in facts)
        assert all(f.interior_whites == 0 for f in facts)
        assert sum(1 for f in facts if f.directed) == 2
        assert {f.outside for f in facts} == {MIXED}

    def test_corner_darts(self, label_one_disks):
        _, facts = label_one_disks
        assert all(len(f.corner_darts) == 2 for f in facts)
        # only the bigon holding e2 sees middle label-2 darts
        middle_flags = sorted(tuple(c.middle for c in f.corner_darts) for f in facts)
        assert middle_flags == [(False, False), (False, False), (True, True)]
        for f in facts:
            assert {c.direction for c in f.corner_darts} == {'in', 'out'}

    def test_disk_ids_are_distinct(self, label_one_disks):
        disks, _ = label_one_disks
        assert len({d.id for d in disks}) == 3

    def test_local_complexity(self, white_pair, label_one_disks):
        disks, _ = label_one_disks
        for disk in disks:
            counted = local_complexity(white_pair, disk)
            assert counted.w_int == len(interior_whites(white_pair, disk)) == 0
            assert counted.c_boundary == 0

    def test_hoop_has_two_sides(self):
        chart = build_chart("chart n=3\nphantom p1 darts=h1,h2\nedge e1 label=1 tail=h1 head=h2\n")
        (component,) = strand_components(chart, 1)
        disks = complementary_disks(chart, component)
        assert len(disks) == 2
        assert all(d.angled_k == 0 for d in disks)


class TestLenses:

    def test_every_neighbouring_pair_is_a_lens(self, white_pair):
        lenses = find_lenses(white_pair, 1)
        assert len(lenses) == 6
        kinds = sorted(lens.kind for lens in lenses)
        assert kinds.count(DOUBLE_MIDDLE) == 4
        assert kinds.count(NO_MIDDLE) == 2

    def test_lens_pairs(self, white_pair):
        pairs = {(lens.e1.edges[0], lens.e2.edges[0]) for lens in find_lenses(white_pair, 1)}
        assert pairs == {('e1', 'e2'), ('e3', 'e2'), ('e3', 'e4'),
                         ('e5', 'e4'), ('e5', 'e6'), ('e1', 'e6')}

    def test_lens_disks_are_two_angled(self, white_pair):
        for lens in find_lenses(white_pair, 1):
            assert lens.disk.angled_k == 2
            assert {lens.w1, lens.w2} == {'w1', 'w2'}

    def test_top_label_has_no_lenses(self, white_pair):
        assert find_lenses(white_pair, 2) == []

    def test_lenses_match_bigon_faces(self, white_pair):
        for chart in (white_pair, reflect(white_pair), reverse(white_pair)):
            found = set()
            for lens in find_lenses(chart, 1):
                assert len(lens.disk.faces) == 1
                found.add((lens.e1.id, lens.e2.id, lens.disk.faces[0], lens.kind))
            assert found == bigon_lenses(chart, 1)


class TestCornerDarts:

    @pytest.fixture
    def mixed_pair_facts(self):
        chart = build_chart(MIXED_PAIR)
        strand_list = strands(chart, 2)
        (component,) = strand_components(chart, 2, strand_list)
        disks = complementary_disks(chart, component, strand_list)
        return chart, disks, strand_list

    def test_only_the_upper_neighbour_by_default(self, mixed_pair_facts):
        chart, disks, strand_list = mixed_pair_facts
        facts = [disk_facts(chart, d, strand_list) for d in disks]
        assert len(facts) == 3
        assert all(len(f.corner_darts) == 1 for f in facts)
        assert sorted(f.corner_darts[0].direction for f in facts) == ['in', 'in', 'out']
        assert sorted(f.corner_darts[0].middle for f in facts) == [False, False, True]

    def test_lower_neighbour_on_request(self, mixed_pair_facts):
        chart, disks, strand_list = mixed_pair_facts
        facts = [disk_facts(chart, d, strand_list, neighbour=1) for d in disks]
        assert all(len(f.corner_darts) == 1 for f in facts)
        assert sorted(f.corner_darts[0].direction for f in facts) == ['in', 'out', 'out']


class TestFeelers:

    @pytest.fixture(scope='class')
    def realized(self, catalog):
        charts = []
        for t in catalog.group(SURVIVORS) + catalog.group(CANDIDATES):
            chart = chart_from_template(t, m=1)
            strand_list = strands(chart, 1)
            (component,) = [c for c in strand_components(chart, 1, strand_list) if c.whites]
            charts.append((t.name, chart, strand_list, complementary_disks(chart, component, strand_list)))
        return charts

    def test_feelers_match_the_definition(self, realized):
        for name, chart, strand_list, disks in realized:
            for disk in disks:
                got = {s.id for s in feelers(chart, disk, strand_list)}
                assert got == naive_feelers(chart, disk, strand_list), (name, disk.id)

    def test_special_means_terminal_feelers(self, realized):
        for name, chart, strand_list, disks in realized:
            for disk in disks:
                expected = all(s.strand_class == TERMINAL for s in feelers(chart, disk, strand_list))
                assert is_special(chart, disk, strand_list) == expected, (name, disk.id)
                assert disk_facts(chart, disk, strand_list).special == expected

    def test_twin_bigons_has_one_terminal_feeler(self, realized):
        (_, chart, strand_list, disks) = next(r for r in realized if r[0] == 'twin_bigons')
        with_feelers = [d for d in disks if feelers(chart, d, strand_list)]
        assert len(with_feelers) == 1
        (feeler,) = feelers(chart, with_feelers[0], strand_list)
        assert feeler.strand_class == TERMINAL
        assert is_special(chart, with_feelers[0], strand_list)

    def test_bigons_have_no_feelers(self, white_pair):
        strand_list = strands(white_pair, 1)
        (component,) = strand_components(white_pair, 1, strand_list)
        for disk in complementary_disks(white_pair, component, strand_list):
            assert feelers(white_pair, disk, strand_list) == []
            assert is_special(white_pair, disk, strand_list)

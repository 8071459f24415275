import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from foclogic.dyadic import dy
from foclogic.graphs import (
    LabelledGraph,
    Signal,
    are_isomorphic,
    canonical_form,
    enumerate_graphs,
    parse_graph_file,
    write_graph_file,
)


def path3():
    return LabelledGraph.make(3, [(0, 1), (1, 2)], [(1,), (0,), (1,)])


class TestLabelledGraph:
    def test_basic(self):
        g = path3()
        assert g.n == 3
        assert g.has_edge(0, 1) and g.has_edge(1, 0)
        assert not g.has_edge(0, 2)
        assert g.degree(1) == 2
        assert sorted(g.neighbors(1)) == [0, 2]
        assert g.label_width == 1
        assert g.label_bit(0, 0) and not g.label_bit(1, 0)
        # bits beyond the label width read as 0
        assert not g.label_bit(0, 5)

    def test_rejects_self_loop(self):
        with pytest.raises(ValueError):
            LabelledGraph.make(2, [(0, 0)])

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            LabelledGraph.make(2, [(0, 2)])

    def test_edges_normalized(self):
        g = LabelledGraph.make(3, [(2, 0), (0, 2)])
        assert g.edges == frozenset({(0, 2)})

    def test_relabel(self):
        g = path3()
        h = g.relabel({0: 2, 1: 1, 2: 0})
        assert h.has_edge(2, 1) and h.has_edge(1, 0) and not h.has_edge(0, 2)
        assert h.label_bit(2, 0) and not h.label_bit(1, 0)

    def test_unlabelled(self):
        g = LabelledGraph.make(2, [(0, 1)])
        assert g.label_width == 0
        assert not g.label_bit(0, 0)


class TestEnumerate:
    def test_count_order2(self):
        gs = list(enumerate_graphs(2))
        assert len(gs) == 2

    def test_count_order3_width1(self):
        gs = list(enumerate_graphs(3, label_width=1))
        # 2^3 edge masks times 2^3 labelings
        assert len(gs) == 64

    def test_count_order4(self):
        gs = list(enumerate_graphs(4))
        assert len(gs) == 2 ** 6

    def test_dedup_order3(self):
        gs = list(enumerate_graphs(3, dedup=True))
        # unlabelled graphs on 3 vertices up to isomorphism
        assert len(gs) == 4

    def test_dedup_order4(self):
        gs = list(enumerate_graphs(4, dedup=True))
        assert len(gs) == 11

    def test_guard(self):
        with pytest.raises(ValueError):
            list(enumerate_graphs(8))


class TestIsomorphism:
    def test_paths_isomorphic(self):
        g = LabelledGraph.make(3, [(0, 1), (1, 2)])
        h = LabelledGraph.make(3, [(0, 2), (1, 2)])
        assert are_isomorphic(g, h)
        assert canonical_form(g) == canonical_form(h)

    def test_labels_matter(self):
        g = LabelledGraph.make(2, [(0, 1)], [(1,), (0,)])
        h = LabelledGraph.make(2, [(0, 1)], [(1,), (1,)])
        assert not are_isomorphic(g, h)

    def test_label_permutation(self):
        g = LabelledGraph.make(2, [(0, 1)], [(1,), (0,)])
        h = LabelledGraph.make(2, [(0, 1)], [(0,), (1,)])
        assert are_isomorphic(g, h)

    @given(st.integers(0, 2 ** 6 - 1), st.permutations(range(4)))
    @settings(max_examples=60, deadline=None)
    def test_relabel_preserves_class(self, mask, perm):
        pairs = [(i, j) for i in range(4) for j in range(i + 1, 4)]
        edges = [p for k, p in enumerate(pairs) if mask >> k & 1]
        g = LabelledGraph.make(4, edges)
        h = g.relabel({i: perm[i] for i in range(4)})
        assert canonical_form(g) == canonical_form(h)


class TestGraphFile:
    def test_round_trip(self, tmp_path):
        g = path3()
        sig = Signal.make([(dy("3/2^1"),), (dy(0),), (dy("-1/2^2"),)])
        p = tmp_path / "g.graph"
        p.write_text(write_graph_file(g, sig))
        g2, sig2 = parse_graph_file(p.read_text())
        assert g2 == g
        assert sig2 == sig

    def test_no_signal(self):
        g, sig = parse_graph_file("graph 2\nedge 0 1\n")
        assert g.n == 2 and g.has_edge(0, 1)
        assert sig is None

    def test_comments_and_default_labels(self):
        text = "# a triangle, one labelled vertex\ngraph 3\nedge 0 1\nedge 1 2\nedge 0 2\nlabel 1 1\n"
        g, _ = parse_graph_file(text)
        assert g.label_width == 1
        assert g.label_bit(1, 0) and not g.label_bit(0, 0)

    def test_bad_vertex(self):
        with pytest.raises(ValueError) as e:
            parse_graph_file("graph 2\nedge 0 5\n")
        assert "line 2" in str(e.value)

    def test_bad_directive(self):
        with pytest.raises(ValueError) as e:
            parse_graph_file("graph 2\nfrobnicate\n")
        assert "line 2" in str(e.value)

    def test_signal_round_trip_negative(self, tmp_path):
        g = LabelledGraph.make(1, [])
        sig = Signal.make([(dy("-7/2^3"), dy(2))])
        text = write_graph_file(g, sig)
        _, sig2 = parse_graph_file(text)
        assert sig2 == sig
        assert sig2.sup_norm() == dy(2)

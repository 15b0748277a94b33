import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from annograph import (
    LabelClass,
    PhraseRule,
    TypeHierarchy,
    assoc,
    build_graph,
    dom,
    i_dom,
    in_class,
    kleene,
    s_incl,
    s_prec,
    t_prec,
)
from annograph.graph import Arc
from oracles import label_paths, random_dag, reach

seeds = st.integers(0, 2**32 - 1)


class TestStructuralPrecedence:
    def test_path_to_end(self, sa1):
        assert s_prec(sa1)(0, 17)

    def test_reflexive(self, sa1):
        assert s_prec(sa1)(5, 5)

    def test_no_backwards_path(self, sa1):
        assert not s_prec(sa1)(3, 1)

    def test_matches_dfs_on_sa1(self, sa1):
        assert s_prec(sa1).pairs == reach(sa1)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(2, 120), seeds)
    def test_naive_equals_semi_naive(self, n, seed):
        g = random_dag(random.Random(seed), n)
        assert s_prec(g) == s_prec(g, naive=True)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(2, 80), seeds)
    def test_structural_implies_temporal(self, n, seed):
        g = random_dag(random.Random(seed), n)
        for x, y in s_prec(g):
            if x in g.times and y in g.times:
                assert g.times[x] <= g.times[y]


class TestTemporalPrecedence:
    def test_equal_times_both_ways(self, sa1):
        tp = t_prec(sa1)
        assert tp(19, 20) and tp(20, 19)

    def test_start_before_far_node(self, sa1):
        assert t_prec(sa1)(0, 18)

    def test_size_by_sorting(self, sa1):
        # every ordered pair (x, y) with tau(x) <= tau(y), counted from a sort
        ts = sorted(sa1.times.values())
        expected = sum(1 for a in ts for b in ts if a <= b)
        assert len(t_prec(sa1)) == expected
        assert expected == 21 * 22 // 2 + 1  # one tie (13650 twice)

    def test_untimed_nodes_excluded(self):
        g = build_graph([Arc(1, 0, 1, "P", "a")], [(0, 3)])
        assert t_prec(g).pairs == {(0, 0)}

    @settings(max_examples=40, deadline=None)
    @given(st.integers(2, 40), seeds)
    def test_total_preorder(self, n, seed):
        g = random_dag(random.Random(seed), n)
        tp = t_prec(g)
        timed = list(g.times)
        for x in timed:
            assert tp(x, x)
            for y in timed:
                assert tp(x, y) or tp(y, x)
        for x, y in tp:
            for z in tp.image(y):
                assert tp(x, z)


class TestInclusion:
    def test_word_includes_phoneme(self, sa1):
        assert s_incl(sa1)(21, 12)

    def test_reflexive(self, sa1):
        assert s_incl(sa1)(21, 21)

    def test_not_converse(self, sa1):
        assert not s_incl(sa1)(12, 21)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(2, 40), seeds)
    def test_reflexive_and_transitive(self, n, seed):
        g = random_dag(random.Random(seed), n)
        si = s_incl(g)
        sp = s_prec(g)
        for a in g.arcs:
            assert si(a.id, a.id)
        for i, j in si:
            for k in si.image(j):
                assert si(i, k)
            if si(j, i):
                a, b = g.arc(i), g.arc(j)
                assert sp(a.src, b.src) and sp(b.src, a.src)
                assert sp(a.dst, b.dst) and sp(b.dst, a.dst)


class TestDominance:
    def test_word_over_phoneme(self, sa1):
        assert dom(sa1, TypeHierarchy([("W", "P")]))(19, 4)

    def test_irreflexive(self, sa1):
        assert not dom(sa1, TypeHierarchy([("W", "P")]))(19, 19)

    def test_transitive_type_pair(self, sa1):
        d = dom(sa1, TypeHierarchy([("S", "W"), ("W", "P")]))
        # NP she (1->3) over phoneme sh (1->2) only via the closed pair (S, P)
        assert d(25, 2)
        assert not dom(sa1, TypeHierarchy([("S", "W")]))(25, 2)

    def test_sentence_arc_does_not_reach_node_18(self, sa1):
        # S spans 1->18 but no path leads from the phonemes to node 18
        d = dom(sa1, TypeHierarchy([("S", "W"), ("W", "P")]))
        assert not d(23, 16)

    def test_cyclic_hierarchy_rejected(self):
        with pytest.raises(ValueError):
            TypeHierarchy([("W", "P"), ("P", "W")])


class TestImmediateDominance:
    def test_sentence_rule(self, sa1):
        idom = i_dom(sa1, [PhraseRule("S", "NP", "VP")], "S")
        assert idom(23, 25) and idom(23, 24)

    def test_no_rules(self, sa1):
        assert len(i_dom(sa1, [], "S")) == 0

    def test_vp_span_mismatch(self, sa1):
        assert not i_dom(sa1, [PhraseRule("VP", "V", "NP")], "S")(24, 26)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(2, 60), seeds)
    def test_implies_inclusion(self, n, seed):
        rng = random.Random(seed)
        g = random_dag(rng, n, levels=("S",), content=("a", "b", "c"))
        rules = [PhraseRule(*rng.choices("abc", k=3)) for _ in range(3)]
        si = s_incl(g)
        for pair in i_dom(g, rules, "S"):
            assert pair in si


class TestAssociation:
    def test_dark_and_high_tone(self, sa1):
        assert assoc(sa1)(21, 31)

    def test_reflexive_on_classed_arcs(self, sa1):
        assert assoc(sa1)(21, 21)

    def test_absent_class_never_joins(self, sa1):
        a = assoc(sa1)
        assert not a(18, 19)
        assert not a(18, 18)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(2, 60), seeds)
    def test_equivalence_laws(self, n, seed):
        g = random_dag(random.Random(seed), n)
        a = assoc(g)
        classed = [x.id for x in g.arcs if x.eq_class is not None]
        for i in classed:
            assert a(i, i)
        for i, j in a:
            assert a(j, i)
            for k in a.image(j):
                assert a(i, k)


class TestKleene:
    def test_phoneme_chain(self, sa1):
        assert kleene(sa1, "L1", "P")(1, 17)

    def test_reflexive_everywhere(self, sa1):
        k = kleene(sa1, "L2", "no-such-label")
        assert all(k(n, n) for n in sa1.nodes)

    def test_word_paths(self, sa1):
        k = kleene(sa1, "L1", "W")
        assert k(1, 3)
        assert not k(0, 3)

    def test_bad_field(self, sa1):
        with pytest.raises(ValueError):
            kleene(sa1, "L4", "x")

    @pytest.mark.parametrize("field,label", [("L1", "A"), ("L2", "x"), ("L3", "1")])
    def test_matches_path_enumeration(self, field, label):
        rng = random.Random(7)
        for _ in range(20):
            g = random_dag(rng, rng.randint(2, 50))
            assert kleene(g, field, label).pairs == label_paths(g, field, label)


class TestLabelClasses:
    vowels = {"vowel": LabelClass("vowel", {"iy", "ae", "axr", "aa", "uw"})}
    stops = {"stop": LabelClass("stop", {"dcl", "kcl", "d", "k", "q"})}

    def test_member(self):
        assert in_class("ae", "vowel", self.vowels)

    def test_non_member(self):
        assert not in_class("ae", "stop", self.stops)

    def test_unknown_class(self):
        with pytest.raises(KeyError):
            in_class("ae", "nasal", self.vowels)

    def test_iterable_of_classes(self):
        assert in_class("k", "stop", list(self.stops.values()))

    def test_empty_class_rejected(self):
        with pytest.raises(ValueError):
            LabelClass("none", frozenset())

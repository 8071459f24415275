from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from foclogic.graphs import LabelledGraph, enumerate_graphs
from foclogic.semantics import (
    Assignment,
    BUILTIN_REGISTRY,
    EvalError,
    EvalSession,
    eval_naive,
    evaluate,
    term_bound,
)
from foclogic.syntax import (
    Add,
    Const,
    Count,
    Le,
    Mul,
    NBind,
    Not,
    NumVar,
    VBind,
    VertexVar,
    conj,
    disj,
    exists_bounded,
    lt,
    num_eq,
    numeral,
    parse,
    parse_formula,
    parse_term,
)

K1 = LabelledGraph.make(1, [])
PATH4 = LabelledGraph.make(4, [(0, 1), (1, 2), (2, 3)], [(1,), (0,), (0,), (1,)])
TRIANGLE = LabelledGraph.make(3, [(0, 1), (1, 2), (0, 2)])


def both(node, graph, assignment=None, env=None):
    fast = evaluate(node, graph, assignment, env)
    slow = eval_naive(node, graph, assignment, env)
    assert fast == slow, f"optimizer {fast} vs naive {slow} on {node!r}"
    return fast


class TestBasicEvaluation:
    def test_order(self):
        assert both(parse("ord"), PATH4) == 4

    def test_arithmetic(self):
        assert both(parse("(+ (* 2 3) 1)"), K1) == 7

    def test_degree_count(self):
        x1, x2 = VertexVar(1), VertexVar(2)
        deg = Count((VBind(x2),), parse_formula("(E x1 x2)"))
        for v in range(4):
            assert both(deg, PATH4, env={x1: v}) == PATH4.degree(v)

    def test_labels(self):
        f = parse_formula("(P0 x1)")
        x1 = VertexVar(1)
        assert both(f, PATH4, env={x1: 0}) is True
        assert both(f, PATH4, env={x1: 1}) is False

    def test_vertex_order_atom(self):
        f = parse_formula("(vle x1 x2)")
        x1, x2 = VertexVar(1), VertexVar(2)
        assert both(f, PATH4, env={x1: 1, x2: 3}) is True
        assert both(f, PATH4, env={x1: 3, x2: 1}) is False

    def test_unbound_variable(self):
        with pytest.raises(EvalError):
            evaluate(parse("y1"), K1)

    def test_relation_and_builtin(self):
        a = Assignment(
            relations={"S": frozenset({(0, 2), (1, 3)})},
            builtins={"BIT": BUILTIN_REGISTRY["BIT"]},
        )
        x1 = VertexVar(1)
        f = parse_formula("(X S x1 y1)")
        assert both(f, PATH4, a, env={x1: 0, NumVar(1): 2}) is True
        assert both(f, PATH4, a, env={x1: 0, NumVar(1): 3}) is False
        g = parse_formula("(N BIT 1 5)")
        assert both(g, K1, a) is False  # bit 1 of 101 is 0
        assert both(parse_formula("(N BIT 2 5)"), K1, a) is True

    def test_function_table(self):
        a = Assignment(functions={"f": ({(0,): 7}, 1)})
        assert both(parse_term("(U f 0)"), K1, a) == 7
        assert both(parse_term("(U f 1)"), K1, a) == 1

    def test_semantic_function_defaults(self):
        assert evaluate(parse_term("(U arith.pow2 10)"), K1) == 1024
        assert evaluate(parse_term("(U arith.sub 3 5)"), K1) == 0


class TestSugarValues:
    """Frozen values for the counting abbreviations, matching their
    displayed definitions (division rounds up for non-divisible pairs
    and is 6 at (5, 0))."""

    @pytest.mark.parametrize("text,expected", [
        ("(sub 5 3)", 2),
        ("(sub 3 5)", 0),
        ("(sub 0 0)", 0),
        ("(min 3 5)", 3),
        ("(min 5 3)", 3),
        ("(min 0 7)", 0),
        ("(max 3 5)", 5),
        ("(max 5 3)", 5),
        ("(max 0 0)", 0),
        ("(max 7 0)", 7),
        ("(div 6 2)", 3),
        ("(div 7 2)", 4),
        ("(div 5 0)", 6),
        ("(div 0 0)", 0),
        ("(div 0 3)", 0),
        ("(div 1 1)", 1),
    ])
    def test_value(self, text, expected):
        assert both(parse_term(text), K1) == expected

    @given(st.integers(0, 7), st.integers(0, 7))
    @settings(max_examples=64, deadline=None)
    def test_exhaustive_small(self, a, b):
        an, bn = numeral(a), numeral(b)
        y = NumVar(9)
        from foclogic.syntax import div_term, max_term, min_term, truncated_sub
        assert both(truncated_sub(an, bn, y), K1) == max(a - b, 0)
        assert both(min_term(an, bn, y), K1) == min(a, b)
        assert both(max_term(an, bn, y), K1) == max(a, b)
        expected_div = 0 if a == 0 else (a + 1 if b == 0 else -(-a // b))
        assert both(div_term(an, bn, y), K1) == expected_div


class TestOptimizerAgainstNaive:
    FORMULAS = [
        # guarded vertex scan
        "(count ((x x1) (x x2)) (and (E x1 x2) (P0 x1)))",
        # equality-forced vertex
        "(count ((x x1) (x x2)) (and (= x1 x2) (P0 x2)))",
        # excluded vertex
        "(count ((x x1) (x x2)) (and (not (= x1 x2)) (E x1 x2)))",
        # linear equality on numbers
        "(count ((y y1 12)) (and (le y1 7) (le 7 y1)))",
        # interval from two inequalities
        "(count ((y y1 20)) (and (le 5 y1) (not (le 15 y1))))",
        # unused bound variable multiplies
        "(count ((y y1 6) (y y2 5)) (le 2 y1))",
        # adaptive bound
        "(count ((y y1 5) (y y2 (+ y1 1))) (le y2 y1))",
        # monotone body over a large range
        "(count ((y y1 300)) (le (* y1 y1) 10000))",
        # closed single-variable count, prefix path
        "(count ((y y1 200)) (existsn (y y2 y1) (le (+ (* y2 2) 1) y1)))",
        # nested existentials with products
        "(count ((y y1 30)) (existsn (y y2 31) (and (le (* y1 y2) 29) (le 29 (* y1 y2)))))",
        # mixed vertex and number binds
        "(count ((x x1) (y y1 (U deg x1))) (le y1 1))",
        # comparison of two counts
        "(le (count ((x x1)) (P0 x1)) (count ((x x1)) (not (P0 x1))))",
    ]

    @pytest.mark.parametrize("text", FORMULAS)
    def test_on_path(self, text):
        deg_table = {(v,): PATH4.degree(v) for v in range(PATH4.n)}
        a = Assignment(functions={"deg": (deg_table, 0)})
        both(parse(text), PATH4, a)

    @pytest.mark.parametrize("text", FORMULAS)
    def test_on_triangle(self, text):
        deg_table = {(v,): TRIANGLE.degree(v) for v in range(TRIANGLE.n)}
        a = Assignment(functions={"deg": (deg_table, 0)})
        both(parse(text), TRIANGLE, a)

    @given(st.integers(0, 2 ** 6 - 1), st.integers(0, 2 ** 4 - 1))
    @settings(max_examples=40, deadline=None)
    def test_random_graphs(self, mask, labelmask):
        pairs = [(i, j) for i in range(4) for j in range(i + 1, 4)]
        edges = [p for k, p in enumerate(pairs) if mask >> k & 1]
        labels = [(labelmask >> v & 1,) for v in range(4)]
        g = LabelledGraph.make(4, edges, labels)
        for text in [
            "(count ((x x1) (x x2)) (and (E x1 x2) (P0 x2)))",
            "(count ((x x1)) (and (P0 x1) (le 1 (count ((x x2)) (E x1 x2)))))",
            "(le 1 (count ((x x1) (x x2) (x x3)) (and (E x1 x2) (and (E x2 x3) (E x1 x3)))))",
        ]:
            both(parse(text), g)

    @given(st.integers(0, 40), st.integers(0, 40), st.integers(1, 12))
    @settings(max_examples=40, deadline=None)
    def test_divisor_pattern(self, c, lo, b):
        # count divisors of c that are at least lo: exercises the
        # divisor-candidate rule against the naive sweep
        y1, y2 = NumVar(1), NumVar(2)
        cnum = numeral(c)
        inner = exists_bounded(y2, Add(cnum, Const(1)),
                               num_eq(Mul(y1, y2), cnum))
        body = conj(Le(numeral(lo), y1), inner)
        t = Count((NBind(y1, Add(cnum, Const(1))),), body)
        both(t, K1)

    def test_budget_partial_then_exact(self):
        # first query an existential (early stop), then the exact count
        s = EvalSession(K1)
        t = parse_term("(count ((y y1 50)) (le 10 y1))")
        f = Le(Const(1), t)
        assert s.eval(f) is True
        assert s.eval(t) == 40
        assert s.eval(f) is True

    def test_exact_then_budget(self):
        s = EvalSession(K1)
        t = parse_term("(count ((y y1 50)) (le 10 y1))")
        assert s.eval(t) == 40
        assert s.eval(Le(numeral(41), t)) is False
        assert s.eval(Le(numeral(40), t)) is True

    def test_session_memo_reuse(self):
        s = EvalSession(PATH4)
        t = parse_term("(count ((x x1) (x x2)) (E x1 x2))")
        assert s.eval(t) == 6
        calls_before = s.count_calls
        assert s.eval(t) == 6
        assert s.count_calls == calls_before + 1  # memo hit, no rescan

    def test_free_variable_memo_keys(self):
        # same node under different bindings must not collide
        s = EvalSession(PATH4)
        x1, x2 = VertexVar(1), VertexVar(2)
        deg = Count((VBind(x2),), parse_formula("(E x1 x2)"))
        assert s.eval(deg, {x1: 0}) == 1
        assert s.eval(deg, {x1: 1}) == 2
        assert s.eval(deg, {x1: 0}) == 1


class TestMonotoneAndPrefixRules:
    def test_mono_body_boundary(self):
        # body true on a prefix: y1 + 100 <= 400
        t = parse_term("(count ((y y1 1000)) (le (+ y1 100) 400))")
        assert evaluate(t, K1) == 301
        assert eval_naive(t, K1) == 301

    def test_mono_body_suffix(self):
        t = parse_term("(count ((y y1 1000)) (le 400 (+ y1 100)))")
        assert evaluate(t, K1) == 700

    def test_mono_all_true(self):
        t = parse_term("(count ((y y1 500)) (le y1 1000))")
        assert evaluate(t, K1) == 500

    def test_mono_all_false(self):
        t = parse_term("(count ((y y1 500)) (le 1000 y1))")
        assert evaluate(t, K1) == 0

    def test_prefix_table_many_bounds(self):
        # odd numbers below y1, repeatedly with growing bounds
        s = EvalSession(K1)
        y1, y2 = NumVar(1), NumVar(2)
        odd = exists_bounded(y2, Add(y1, Const(1)),
                             num_eq(y1, Add(Mul(numeral(2), y2), Const(1))))
        t = Count((NBind(y1, NumVar(3)),), odd)
        for b in [100, 200, 150, 400]:
            assert s.eval(t, {NumVar(3): b}) == b // 2

    def test_narrowing_with_square(self):
        # y1*y1 <= 200 narrows by binary search on a monotone term
        t = parse_term("(count ((y y1 10000)) (le (* y1 y1) 200))")
        assert evaluate(t, K1) == 15


class TestTermBound:
    def test_const_and_order(self):
        assert term_bound(parse_term("(+ 1 1)"), 5) == 2
        assert term_bound(parse_term("ord"), 5) == 5

    def test_count_bound(self):
        t = parse_term("(count ((x x1) (y y1 3)) true)")
        assert term_bound(t, 4) == 12

    def test_adaptive(self):
        t = parse_term("(count ((y y1 3) (y y2 y1)) true)")
        # y1 < 3 means y1 <= 2, so y2 ranges over at most 2 values
        assert term_bound(t, 1) == 6

    def test_free_var_needs_bound(self):
        with pytest.raises(EvalError):
            term_bound(parse_term("y1"), 3)
        assert term_bound(parse_term("y1"), 3, {NumVar(1): 10}) == 9

    def test_funapp_rejected(self):
        with pytest.raises(EvalError):
            term_bound(parse_term("(U f 0)"), 3)


class TestAgainstNaiveOnAllSmallGraphs:
    def test_battery_order3(self):
        formulas = [parse(t) for t in [
            "(count ((x x1)) (le (count ((x x2)) (E x1 x2)) 1))",
            "(le 1 (count ((x x1) (x x2)) (and (not (= x1 x2)) (not (E x1 x2)))))",
            "(count ((y y1 (+ ord 1))) (le (count ((x x1)) (P0 x1)) y1))",
        ]]
        for g in enumerate_graphs(3, label_width=1):
            for f in formulas:
                both(f, g)

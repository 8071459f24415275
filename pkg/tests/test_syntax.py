import pytest

from foclogic import syntax as sx
from foclogic.syntax import (
    Add,
    And,
    Adj,
    Builtin,
    Const,
    Count,
    FunApp,
    Label,
    Le,
    Mul,
    NBind,
    Not,
    NumVar,
    ParseError,
    RelApp,
    VBind,
    VOrd,
    VarEq,
    VertexVar,
    all_vars,
    check_signatures,
    emit,
    free_vars,
    is_order_term,
    numeral,
    parse,
    parse_formula,
    parse_term,
)


class TestNodes:
    def test_structural_equality(self):
        a = Add(NumVar(1), Const(1))
        b = Add(NumVar(1), Const(1))
        assert a == b
        assert hash(a) == hash(b)
        assert a != Add(NumVar(2), Const(1))

    def test_sort_discipline(self):
        with pytest.raises(TypeError):
            Add(VertexVar(1), Const(0))
        with pytest.raises(TypeError):
            Le(Const(0), VertexVar(1))
        with pytest.raises(TypeError):
            VarEq(NumVar(1), NumVar(2))
        with pytest.raises(TypeError):
            Count((), sx.TRUE)

    def test_repeated_bound_var_rejected(self):
        y = NumVar(1)
        with pytest.raises(TypeError):
            Count((NBind(y, Const(1)), NBind(y, Const(1))), sx.TRUE)

    def test_const_range(self):
        with pytest.raises(ValueError):
            Const(2)


class TestFreeVars:
    def test_count_binding(self):
        y1, y2 = NumVar(1), NumVar(2)
        t = Count((NBind(y1, NumVar(3)),), Le(y1, y2))
        assert free_vars(t) == frozenset({NumVar(3), y2})

    def test_adaptive_bound_sees_earlier(self):
        y1, y2 = NumVar(1), NumVar(2)
        # second bound mentions the first variable: not free
        t = Count((NBind(y1, Const(1)), NBind(y2, y1)), Le(y2, y1))
        assert free_vars(t) == frozenset()

    def test_bound_of_first_is_free(self):
        y1, y2 = NumVar(1), NumVar(2)
        t = Count((NBind(y1, y2),), Le(y1, y1))
        assert free_vars(t) == frozenset({y2})

    def test_vertex_vars(self):
        x1, x2 = VertexVar(1), VertexVar(2)
        f = And(Adj(x1, x2), Le(Const(0), Const(1)))
        assert free_vars(f) == frozenset({x1, x2})
        g = Le(Const(1), Count((VBind(x2),), Adj(x1, x2)))
        assert free_vars(g) == frozenset({x1})

    def test_all_vars_includes_bound(self):
        y1 = NumVar(1)
        t = Count((NBind(y1, Const(1)),), Le(y1, Const(0)))
        assert y1 in all_vars(t)


class TestParsePrint:
    ROUND_TRIPS = [
        "0",
        "1",
        "y3",
        "ord",
        "(+ y1 1)",
        "(* (+ 0 1) y2)",
        "(U deg x1)",
        "(U f y1 x2)",
        "(count ((x x1)) (E x1 x2))",
        "(count ((y y1 ord) (y y2 y1)) (le y2 y1))",
        "(le (+ y1 1) ord)",
        "(= x1 x2)",
        "(E x2 x1)",
        "(vle x1 x2)",
        "(P0 x1)",
        "(P3 x2)",
        "(X S x1 y1)",
        "(N BIT y1 y2)",
        "(not (le 0 1))",
        "(and (le 0 1) (E x1 x2))",
        "(count ((x x1) (y y1 (U f x1))) (and (P0 x1) (le y1 1)))",
    ]

    @pytest.mark.parametrize("text", ROUND_TRIPS)
    def test_round_trip(self, text):
        node = parse(text)
        printed = emit(node)
        assert printed == text
        assert parse(printed) == node

    def test_ord_reprints(self):
        assert emit(parse("ord")) == "ord"
        assert is_order_term(parse("ord"))

    def test_numeral_value(self):
        from foclogic.graphs import LabelledGraph
        from foclogic.semantics import evaluate
        g = LabelledGraph.make(1, [])
        for n in [0, 1, 2, 3, 5, 12, 100, 237165]:
            assert evaluate(numeral(n), g) == n

    def test_numeral_parse(self):
        assert parse("5") == numeral(5)
        assert parse("0") == Const(0)

    def test_sugar_and_nary(self):
        f = parse_formula("(and (le 0 1) (le 1 1) (le 0 0))")
        assert f == And(And(parse_formula("(le 0 1)"),
                            parse_formula("(le 1 1)")),
                        parse_formula("(le 0 0)"))

    def test_sugar_or(self):
        f = parse_formula("(or (le 1 0) (le 0 0))")
        assert f == Not(And(Not(parse_formula("(le 1 0)")),
                            Not(parse_formula("(le 0 0)"))))

    def test_sugar_exists(self):
        f = parse_formula("(exists (x x1) (P0 x1))")
        assert f == Le(Const(1), Count((VBind(VertexVar(1)),),
                                       Label(0, VertexVar(1))))

    def test_sugar_forall(self):
        f = parse_formula("(forall (x x1) (P0 x1))")
        inner = Le(Const(1), Count((VBind(VertexVar(1)),),
                                   Not(Label(0, VertexVar(1)))))
        assert f == Not(inner)

    def test_sugar_existsn(self):
        f = parse_formula("(existsn (y y1 3) (le y1 1))")
        assert isinstance(f, Le)
        assert f.left == Const(1)

    def test_sugar_min_shape(self):
        # min(a, b) counts z < a with z < b; fresh variable avoids capture
        t = parse_term("(min y1 y2)")
        assert isinstance(t, Count)
        assert len(t.binds) == 1
        z = t.binds[0].var
        assert z not in (NumVar(1), NumVar(2))
        assert t.binds[0].bound == NumVar(1)
        assert t.body == Le(Add(z, Const(1)), NumVar(2))

    def test_sugar_fresh_avoids_used_indices(self):
        t = parse_term("(min y7 y7)")
        assert t.binds[0].var.index > 7

    def test_true_false(self):
        assert parse("true") == sx.TRUE
        assert parse("false") == sx.FALSE

    def test_parse_errors(self):
        for bad in ["(le 0)", "(", ")", "(le x1 0)", "(frob 1 2)",
                    "(count ((z y1 1)) true)", "(= y1 y2)", "", "(and (le 0 0))"]:
            with pytest.raises(ParseError):
                parse(bad)

    def test_two_expressions_rejected(self):
        with pytest.raises(ParseError):
            parse("0 1")


class TestSignatures:
    def test_consistent(self):
        f = parse_formula("(and (X S x1 y1) (X S x2 y2))")
        sigs = check_signatures(f)
        assert sigs["S"] == ("rel", ("v", "n"))

    def test_inconsistent(self):
        f = parse_formula("(and (X S x1) (X S y1))")
        with pytest.raises(TypeError):
            check_signatures(f)

    def test_fun_vs_rel(self):
        f = parse_formula("(le (U g y1) (count ((x x1)) (X g x1)))")
        with pytest.raises(TypeError):
            check_signatures(f)

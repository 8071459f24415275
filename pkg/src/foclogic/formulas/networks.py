"""Piecewise-linear function application and feedforward-net evaluation in
the logic.

A PL function arrives through the schema Llen (piece count, nullary
function) and three r-schemas with a leading piece index: Lth (thresholds,
meaningful at 1..len), Lsl and Lco (slopes and constants, 0..len).  When the
thresholds fail to increase strictly or the pieces disagree at a threshold,
the denoted function is constant 0, and mk_apply returns exact zero.

A feedforward net arrives through Fnv (largest node id, nullary function),
Fedge (directed wiring over node ids), the per-node activation schema
Factlen/Factth/Factsl/Factco (piece index first, then node id), the weight
r-schema Fwt over (source, target), and the bias r-schema Fbi over (node).
Inputs come from the r-schema Xin indexed by input position; sources and
sinks are taken in increasing node id order.  mk_fnn_eval(d) returns the
r-expressions eval_0..eval_d over the free node variable NumVar(1); eval_t
gives the value computed at every node whose depth is at most t.  When the
wiring is not a dag that stabilizes within d steps, every eval_t falls back
to the input at position 0, the value of the trivial one-node net.

LExpression and FExpression bundle concrete component formulas with their
designated index variables, so whole networks can be plugged into the
schema-level builders.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..dyadic import PiecewiseLinear, canonical_rtuple, dy
from ..rexpr import RExpression
from ..syntax import (
    Add,
    And,
    Count,
    FALSE,
    Formula,
    FunApp,
    Le,
    Mul,
    NBind,
    Not,
    NumVar,
    ONE,
    RelApp,
    Term,
    ZERO,
    conj,
    disj,
    exists_bounded,
    forall_bounded,
    implies,
    lt,
    num_eq,
    numeral,
    truncated_sub,
)
from .base import (
    DEFAULT_WIDTH,
    PURE,
    FidelityLevel,
    cached,
    fresh_num,
    hold_at,
    indicator,
    value_at,
)
from .rational import (
    ZERO_REXPR,
    mk_rat_arith,
    plug_into_rexpr,
    plug_rexprs,
    rexpr_at,
    rexpr_gate,
    rexpr_if,
    rexpr_of_schema,
)


@dataclass(frozen=True)
class LExpression:
    """A PL function as formulas: piece count plus three constant families
    indexed by the free variable index_var (thresholds at 1..length, slopes
    and constants at 0..length)."""

    length: Term
    thresholds: RExpression
    slopes: RExpression
    constants: RExpression
    index_var: NumVar


@dataclass(frozen=True)
class FExpression:
    """A feedforward net as formulas.  edge and weight read the free
    variables (src_var, dst_var); bias reads node_var; the activation
    families read (act.index_var, node_var)."""

    node_max: Term
    edge: Formula
    act: LExpression
    weight: RExpression
    bias: RExpression
    src_var: NumVar
    dst_var: NumVar
    node_var: NumVar


# --- constant families ------------------------------------------------------


def _match(index_vars, key) -> Formula:
    return conj(*(num_eq(v, numeral(i)) for v, i in zip(index_vars, key)))


def term_family(values: dict, index_vars: tuple) -> Term:
    """Term equal to values[key] when the index variables equal key, else 0."""
    out = ZERO
    for key, val in sorted(values.items()):
        out = Add(out, Mul(indicator(_match(index_vars, key)), numeral(val)))
    return out


def rexpr_const_family(values: dict, index_vars: tuple) -> RExpression:
    """R-expression over index variables taking fixed dyadic values.

    values maps index tuples to dyadic rationals; unmatched indices denote 0.
    """
    index_vars = tuple(index_vars)
    y = fresh_num()
    sg_cases = []
    ind_cases = []
    dn = {}
    bd = {}
    for key, val in sorted(values.items()):
        rt = canonical_rtuple(dy(val))
        match = _match(index_vars, key)
        if rt.r:
            sg_cases.append(match)
        if rt.I:
            bit_hit = disj(*(num_eq(y, numeral(b)) for b in rt.I))
            ind_cases.append(And(match, bit_hit))
        dn[key] = rt.s
        bd[key] = rt.t
    return RExpression(
        disj(*sg_cases) if sg_cases else FALSE,
        disj(*ind_cases) if ind_cases else FALSE,
        term_family(dn, index_vars),
        term_family(bd, index_vars),
        y,
    )


def rexpr_const(value) -> RExpression:
    """Closed r-expression for one dyadic rational."""
    return rexpr_const_family({(): dy(value)}, ())


def rexpr_select(index: Term, options) -> RExpression:
    """The options[i] whose position i equals the index term (0 past the end)."""
    out = ZERO_REXPR
    for i in reversed(range(len(options))):
        out = rexpr_if(num_eq(index, numeral(i)), options[i], out)
    return out


def lexpr_const(pl: PiecewiseLinear) -> LExpression:
    """Encode one concrete PL function as an LExpression."""
    idx = fresh_num()
    k = len(pl.thresholds)
    th = {(j + 1,): pl.thresholds[j] for j in range(k)}
    sl = {(i,): pl.slopes[i] for i in range(k + 1)}
    co = {(i,): pl.constants[i] for i in range(k + 1)}
    return LExpression(
        numeral(k),
        rexpr_const_family(th, (idx,)),
        rexpr_const_family(sl, (idx,)),
        rexpr_const_family(co, (idx,)),
        idx,
    )


def fexpr_from_tables(
    node_count: int,
    edges: dict,
    activations,
    biases,
) -> FExpression:
    """Concrete net encoding: edges maps (source, target) to a dyadic weight,
    activations and biases are per-node lists."""
    if node_count < 1:
        raise ValueError("a net needs at least one node")
    if len(activations) != node_count or len(biases) != node_count:
        raise ValueError("need one activation and one bias per node")
    src, dst, node, piece = (fresh_num() for _ in range(4))
    edge = disj(
        *(
            And(num_eq(src, numeral(u)), num_eq(dst, numeral(v)))
            for (u, v) in sorted(edges)
        )
    )
    weight = rexpr_const_family(
        {(u, v): dy(w) for (u, v), w in edges.items()}, (src, dst)
    )
    bias = rexpr_const_family(
        {(v,): dy(b) for v, b in enumerate(biases)}, (node,)
    )
    th, sl, co, lens = {}, {}, {}, {}
    for v, pl in enumerate(activations):
        lens[(v,)] = len(pl.thresholds)
        for j, t in enumerate(pl.thresholds):
            th[(j + 1, v)] = t
        for i in range(len(pl.thresholds) + 1):
            sl[(i, v)] = pl.slopes[i]
            co[(i, v)] = pl.constants[i]
    act = LExpression(
        term_family(lens, (node,)),
        rexpr_const_family(th, (piece, node)),
        rexpr_const_family(sl, (piece, node)),
        rexpr_const_family(co, (piece, node)),
        piece,
    )
    return FExpression(
        numeral(node_count - 1), edge, act, weight, bias, src, dst, node
    )


# --- schema-level builders --------------------------------------------------


def mk_apply(
    level: FidelityLevel = PURE, width: int = DEFAULT_WIDTH, cap: int = 8
) -> RExpression:
    """Value of the PL function coded by the L-schema at the operand Z1."""

    def make():
        x = rexpr_of_schema("Z1")
        length = FunApp("Llen", ())
        leq = mk_rat_arith("leq", level, width)
        mul = mk_rat_arith("mul", level, width, cap=cap)
        add = mk_rat_arith("add", level, width)

        def th(j):
            return rexpr_of_schema("Lth", (j,))

        def rat_leq(a, b):
            return plug_rexprs(leq, {"Z1": a, "Z2": b})

        def line_at(j, operand):
            prod = plug_into_rexpr(
                mul, {"Z1": rexpr_of_schema("Lsl", (j,)), "Z2": operand}
            )
            return plug_into_rexpr(
                add, {"Z1": prod, "Z2": rexpr_of_schema("Lco", (j,))}
            )

        jv = fresh_num()
        piece = Count(
            (NBind(jv, Add(length, ONE)),), And(Le(ONE, jv), rat_leq(th(jv), x))
        )

        j2 = fresh_num()
        prev2 = truncated_sub(j2, ONE, fresh_num())
        increasing = forall_bounded(
            j2,
            Add(length, ONE),
            implies(Le(numeral(2), j2), Not(rat_leq(th(j2), th(prev2)))),
        )
        j3 = fresh_num()
        prev3 = truncated_sub(j3, ONE, fresh_num())
        left = line_at(prev3, th(j3))
        right = line_at(j3, th(j3))
        continuity = forall_bounded(
            j3,
            Add(length, ONE),
            implies(
                Le(ONE, j3), And(rat_leq(left, right), rat_leq(right, left))
            ),
        )
        return rexpr_gate(And(increasing, continuity), line_at(piece, x))

    return cached("apply", (level, width, cap), make)


def mk_fnn_eval(
    depth: int,
    level: FidelityLevel = PURE,
    width: int = DEFAULT_WIDTH,
    cap: int = 8,
) -> tuple:
    """The family eval_0..eval_depth over the F-schema, free variable
    NumVar(1) naming the node."""

    def make():
        y = NumVar(1)
        nv = FunApp("Fnv", ())
        n_nodes = Add(nv, ONE)

        def edge(u, v):
            return RelApp("Fedge", (u, v))

        uv = fresh_num()
        wv = fresh_num()
        source_f = And(Le(uv, nv), Not(exists_bounded(wv, n_nodes, edge(wv, uv))))

        def source_at(t):
            return hold_at(source_f, [(uv, t)])

        rv = fresh_num()

        def rank_at(t):
            return Count((NBind(rv, t),), source_at(rv))

        dep = [source_f]
        for _ in range(depth):
            wq = fresh_num()
            settled = hold_at(dep[-1], [(uv, wq)])
            dep.append(
                And(
                    Le(uv, nv),
                    forall_bounded(wq, n_nodes, implies(edge(wq, uv), settled)),
                )
            )
        vq = fresh_num()
        dag_ok = forall_bounded(vq, n_nodes, hold_at(dep[depth], [(uv, vq)]))

        def x_at(t):
            return rexpr_of_schema("Xin", (t,))

        itadd = mk_rat_arith("itadd", level, width, arity=(0, 1), cap=cap)
        mul = mk_rat_arith("mul", level, width, cap=cap)
        add = mk_rat_arith("add", level, width)
        apply_rx = mk_apply(level, width, cap)

        evals = [rexpr_if(source_at(y), x_at(rank_at(y)), ZERO_REXPR)]
        for t in range(1, depth + 1):
            prev = evals[t - 1]

            def member(a, prev=prev):
                u = a[0]
                wt = rexpr_of_schema("Fwt", (u, y))
                return plug_into_rexpr(
                    mul, {"Z1": wt, "Z2": rexpr_at(prev, y, u)}
                )

            agg = plug_into_rexpr(
                itadd,
                {"Z": member},
                rel_map={"X": lambda a: And(edge(a[0], y), Le(a[0], nv))},
                fun_map={"V": lambda a: n_nodes},
            )
            pre = plug_into_rexpr(
                add, {"Z1": agg, "Z2": rexpr_of_schema("Fbi", (y,))}
            )
            post = plug_into_rexpr(
                apply_rx,
                {
                    "Z1": pre,
                    "Lth": lambda a: rexpr_of_schema("Factth", tuple(a) + (y,)),
                    "Lsl": lambda a: rexpr_of_schema("Factsl", tuple(a) + (y,)),
                    "Lco": lambda a: rexpr_of_schema("Factco", tuple(a) + (y,)),
                },
                fun_map={"Llen": lambda a: FunApp("Factlen", (y,))},
            )
            settled_y = hold_at(dep[t - 1], [(uv, y)])
            evals.append(rexpr_if(settled_y, prev, post))

        return tuple(rexpr_if(dag_ok, e, x_at(ZERO)) for e in evals)

    return cached("fnn-eval", (depth, level, width, cap), make)


def mk_fnn_output(
    depth: int,
    level: FidelityLevel = PURE,
    width: int = DEFAULT_WIDTH,
    cap: int = 8,
) -> RExpression:
    """eval_depth read at the i-th sink, free variable NumVar(1) naming the
    output position."""

    def make():
        i = NumVar(1)
        nv = FunApp("Fnv", ())
        n_nodes = Add(nv, ONE)
        uv = fresh_num()
        wv = fresh_num()
        sink_f = And(
            Le(uv, nv),
            Not(exists_bounded(wv, n_nodes, RelApp("Fedge", (uv, wv)))),
        )

        def sink_at(t):
            return hold_at(sink_f, [(uv, t)])

        rv = fresh_num()

        def sink_rank(t):
            return Count((NBind(rv, t),), sink_at(rv))

        zv = fresh_num()
        vv = fresh_num()
        chosen = conj(sink_at(vv), num_eq(sink_rank(vv), i), lt(zv, vv))
        node = Count((NBind(zv, n_nodes),), exists_bounded(vv, n_nodes, chosen))

        final = mk_fnn_eval(depth, level, width, cap)[depth]
        return rexpr_at(final, NumVar(1), node)

    return cached("fnn-output", (depth, level, width, cap), make)


# --- plugging concrete networks into the schema builders ---------------------


def apply_lexpr(
    lx: LExpression,
    operand: RExpression,
    level: FidelityLevel = PURE,
    width: int = DEFAULT_WIDTH,
    cap: int = 8,
) -> RExpression:
    """mk_apply instantiated with a concrete L-expression and operand."""
    return plug_into_rexpr(
        mk_apply(level, width, cap),
        {
            "Z1": operand,
            "Lth": lambda a: rexpr_at(lx.thresholds, lx.index_var, a[0]),
            "Lsl": lambda a: rexpr_at(lx.slopes, lx.index_var, a[0]),
            "Lco": lambda a: rexpr_at(lx.constants, lx.index_var, a[0]),
        },
        fun_map={"Llen": lambda a: lx.length},
    )


def _fexpr_maps(fx: FExpression, inputs):
    inputs = list(inputs)

    def weight_at(a):
        return rexpr_at(rexpr_at(fx.weight, fx.src_var, a[0]), fx.dst_var, a[1])

    def act_family(rx):
        def at(a):
            return rexpr_at(rexpr_at(rx, fx.act.index_var, a[0]), fx.node_var, a[1])

        return at

    mapping = {
        "Fwt": weight_at,
        "Fbi": lambda a: rexpr_at(fx.bias, fx.node_var, a[0]),
        "Factth": act_family(fx.act.thresholds),
        "Factsl": act_family(fx.act.slopes),
        "Factco": act_family(fx.act.constants),
        "Xin": lambda a: rexpr_select(a[0], inputs),
    }
    rel_map = {
        "Fedge": lambda a: hold_at(
            fx.edge, [(fx.src_var, a[0]), (fx.dst_var, a[1])]
        )
    }
    fun_map = {
        "Fnv": lambda a: fx.node_max,
        "Factlen": lambda a: value_at(fx.act.length, [(fx.node_var, a[0])]),
    }
    return mapping, rel_map, fun_map


def fnn_eval_fexpr(
    fx: FExpression,
    inputs,
    depth: int,
    level: FidelityLevel = PURE,
    width: int = DEFAULT_WIDTH,
    cap: int = 8,
) -> tuple:
    """mk_fnn_eval instantiated with a concrete F-expression and a list of
    input r-expressions."""
    mapping, rel_map, fun_map = _fexpr_maps(fx, inputs)
    return tuple(
        plug_into_rexpr(e, mapping, rel_map=rel_map, fun_map=fun_map)
        for e in mk_fnn_eval(depth, level, width, cap)
    )


def fnn_output_fexpr(
    fx: FExpression,
    inputs,
    depth: int,
    level: FidelityLevel = PURE,
    width: int = DEFAULT_WIDTH,
    cap: int = 8,
) -> RExpression:
    """mk_fnn_output instantiated with a concrete F-expression and inputs."""
    mapping, rel_map, fun_map = _fexpr_maps(fx, inputs)
    return plug_into_rexpr(
        mk_fnn_output(depth, level, width, cap),
        mapping,
        rel_map=rel_map,
        fun_map=fun_map,
    )

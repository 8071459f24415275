"""Signed dyadic rational arithmetic expressed inside the logic.

An operand arrives through a four-symbol schema read by rexpr_of_schema:
<prefix>sg (nullary or member-indexed relation, negative when it holds),
<prefix>ind (bit positions of the numerator, bit index first), and the
functions <prefix>dn and <prefix>bd (denominator exponent and numerator
width bound).  Binary operations use prefixes Z1 and Z2; family operations
use prefix Z with the member index coded by the relation X and the bound
function V exactly as in the integer family module.

Every operation aligns denominators first: with s = max(s1, s2) the
numerators are shifted up by s - si, after which signs and magnitudes are
handled by the integer machinery.  Results are plain r-expressions over the
schema symbols, so they compose further by substitution.
"""

from __future__ import annotations

from ..rexpr import NumValue, RExpression
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
    forall_bounded,
    implies,
    lt,
    max_term,
    min_term,
    truncated_sub,
)
from .base import (
    DEFAULT_WIDTH,
    PURE,
    SEMANTIC,
    FidelityLevel,
    cached,
    fresh_num,
    hold_at,
    indicator,
    substitute,
    value_at,
)
from .bits import bit_at, exp2_at
from .families import _family_parts, _quantify
from .intarith import mk_int_arith
from .numops import (
    nv_add,
    nv_bit_at,
    nv_leq,
    nv_mul,
    nv_shift,
    nv_sub,
    nv_zero,
    term_of_nv,
)

RAT_KINDS = (
    "add",
    "sub",
    "mul",
    "leq",
    "crep",
    "div_approx",
    "itadd",
    "max",
    "min",
)


def rexpr_of_schema(prefix: str, args: tuple = ()) -> RExpression:
    """Fresh r-expression reading the schema symbols at the given index."""
    args = tuple(args)
    y = fresh_num()
    bd = FunApp(prefix + "bd", args)
    ind = And(RelApp(prefix + "ind", (y,) + args), lt(y, bd))
    return RExpression(RelApp(prefix + "sg", args), ind, FunApp(prefix + "dn", args), bd, y)


ZERO_REXPR = RExpression(FALSE, FALSE, ZERO, ZERO, NumVar(8999))


def plug_rexprs(node, mapping, rel_map=None, fun_map=None):
    """Substitute whole r-expressions for schema prefixes inside a node.

    mapping sends a prefix to an RExpression, or to a callable producing one
    from the index argument tuple; the four symbol applications of that
    prefix are replaced componentwise (the bit index, which comes first in
    the ind relation, is pinned onto the replacement's bit variable).
    Extra plain symbol maps may ride along in the same pass.
    """
    rels = dict(rel_map) if rel_map else {}
    funs = dict(fun_map) if fun_map else {}
    for prefix, target in mapping.items():
        get = target if callable(target) else (lambda a, _t=target: _t)

        def ind_at(a, g=get):
            r = g(tuple(a[1:]))
            return hold_at(r.ind, [(r.bit_var, a[0])])

        rels[prefix + "sg"] = lambda a, g=get: g(tuple(a)).sg
        rels[prefix + "ind"] = ind_at
        funs[prefix + "dn"] = lambda a, g=get: g(tuple(a)).dn
        funs[prefix + "bd"] = lambda a, g=get: g(tuple(a)).bd
    return substitute(node, rel_map=rels, fun_map=funs)


def plug_into_rexpr(
    target: RExpression, mapping, rel_map=None, fun_map=None
) -> RExpression:
    """plug_rexprs applied to each component of a target r-expression."""
    return RExpression(
        plug_rexprs(target.sg, mapping, rel_map, fun_map),
        plug_rexprs(target.ind, mapping, rel_map, fun_map),
        plug_rexprs(target.dn, mapping, rel_map, fun_map),
        plug_rexprs(target.bd, mapping, rel_map, fun_map),
        target.bit_var,
    )


def rexpr_at(rx: RExpression, var, term) -> RExpression:
    """The r-expression with one of its free variables pinned to a term."""
    pins = [(var, term)]
    return RExpression(
        hold_at(rx.sg, pins),
        hold_at(rx.ind, pins),
        value_at(rx.dn, pins),
        value_at(rx.bd, pins),
        rx.bit_var,
    )


def rexpr_if(cond: Formula, a: RExpression, b: RExpression) -> RExpression:
    """Conditional r-expression: a when cond holds, b otherwise."""
    y = fresh_num()
    ind = disj(
        And(cond, hold_at(a.ind, [(a.bit_var, y)])),
        And(Not(cond), hold_at(b.ind, [(b.bit_var, y)])),
    )
    sg = disj(And(cond, a.sg), And(Not(cond), b.sg))
    dn = Add(Mul(indicator(cond), a.dn), Mul(indicator(Not(cond)), b.dn))
    bd = Add(Mul(indicator(cond), a.bd), Mul(indicator(Not(cond)), b.bd))
    return RExpression(sg, ind, dn, bd, y)


def rexpr_gate(cond: Formula, rx: RExpression) -> RExpression:
    """rx when cond holds, exact zero otherwise."""
    return RExpression(
        And(cond, rx.sg),
        And(cond, rx.ind),
        Mul(indicator(cond), rx.dn),
        Mul(indicator(cond), rx.bd),
        rx.bit_var,
    )


def _nv(r: RExpression) -> NumValue:
    return NumValue(r.ind, r.bd, r.bit_var)


def _aligned(r1: RExpression, r2: RExpression):
    """Common scale and the two numerators shifted onto it."""
    s = max_term(r1.dn, r2.dn, fresh_num())
    q1 = nv_shift(_nv(r1), truncated_sub(s, r1.dn, fresh_num()))
    q2 = nv_shift(_nv(r2), truncated_sub(s, r2.dn, fresh_num()))
    return s, q1, q2


def _xor(a: Formula, b: Formula) -> Formula:
    return disj(And(a, Not(b)), And(Not(a), b))


def _add_core(flip_second: bool, level: FidelityLevel, width: int) -> RExpression:
    r1 = rexpr_of_schema("Z1")
    r2 = rexpr_of_schema("Z2")
    sg1 = r1.sg
    sg2 = Not(r2.sg) if flip_second else r2.sg
    s, q1, q2 = _aligned(r1, r2)

    le12 = nv_leq(q1, q2, level, width)
    le21 = nv_leq(q2, q1, level, width)
    total = nv_add(q1, q2, level, width)
    d12 = nv_sub(q1, q2, level, width)
    d21 = nv_sub(q2, q1, level, width)
    # all three come from the same arithmetic kit, over one bit variable
    assert total.bit_var == d12.bit_var == d21.bit_var

    agree = disj(And(sg1, sg2), And(Not(sg1), Not(sg2)))
    ind = disj(
        And(agree, total.bits),
        conj(Not(agree), le12, d21.bits),
        conj(Not(agree), Not(le12), d12.bits),
    )
    sg = disj(
        And(sg1, sg2),
        conj(sg1, Not(sg2), Not(le12)),
        conj(Not(sg1), sg2, Not(le21)),
    )
    bd = Add(max_term(q1.bound, q2.bound, fresh_num()), ONE)
    return RExpression(sg, ind, s, bd, total.bit_var)


def _leq_formula(level: FidelityLevel, width: int) -> Formula:
    r1 = rexpr_of_schema("Z1")
    r2 = rexpr_of_schema("Z2")
    _, q1, q2 = _aligned(r1, r2)
    return disj(
        conj(r1.sg, Not(r2.sg)),
        conj(r1.sg, r2.sg, nv_leq(q2, q1, level, width)),
        conj(Not(r1.sg), Not(r2.sg), nv_leq(q1, q2, level, width)),
        conj(Not(r1.sg), r2.sg, nv_zero(q1), nv_zero(q2)),
    )


def _mul_rexpr(level: FidelityLevel, width: int, cap: int) -> RExpression:
    r1 = rexpr_of_schema("Z1")
    r2 = rexpr_of_schema("Z2")
    prod = nv_mul(_nv(r1), _nv(r2), level, width, cap)
    return RExpression(
        _xor(r1.sg, r2.sg), prod.bits, Add(r1.dn, r2.dn), prod.bound, prod.bit_var
    )


def _crep_rexpr() -> RExpression:
    """Equal-value reduced form: bits below the bound, scale zero or bit 0
    set, and the all-zero tuple for value zero."""
    r = rexpr_of_schema("Z1")
    nv = _nv(r)
    iv = fresh_num()
    nonzero = Le(ONE, Count((NBind(iv, r.bd),), nv_bit_at(nv, iv)))
    iv2 = fresh_num()
    jv = fresh_num()
    below_lowest = forall_bounded(jv, Add(iv2, ONE), Not(nv_bit_at(nv, jv)))
    trailing = Count((NBind(iv2, r.bd),), below_lowest)
    shift = min_term(trailing, r.dn, fresh_num())

    y = fresh_num()
    ind = nv_bit_at(nv, Add(y, shift))
    sg = And(r.sg, nonzero)
    dn = Mul(indicator(nonzero), truncated_sub(r.dn, shift, fresh_num()))
    bd = Mul(indicator(nonzero), truncated_sub(r.bd, shift, fresh_num()))
    return RExpression(sg, ind, dn, bd, y)


def _div_rexpr(level: FidelityLevel, width: int) -> RExpression:
    """Quotient to within 2^-W(): numerator floor(|Z1| * 2^W / |Z2|) at
    scale W.  The divisor must be nonzero for the value to mean anything,
    but the width bound holds regardless."""
    r1 = rexpr_of_schema("Z1")
    r2 = rexpr_of_schema("Z2")
    w = FunApp("W", ())
    n1 = term_of_nv(_nv(r1), level, width)
    n2 = term_of_nv(_nv(r2), level, width)
    # floor((n1 * 2^(s2 + W)) / (n2 * 2^s1)) = floor(|Z1| / |Z2| * 2^W)
    scaled1 = Mul(n1, exp2_at(Add(r2.dn, w), level, width))
    scaled2 = Mul(n2, exp2_at(r1.dn, level, width))
    top = Add(r1.bd, Add(r2.dn, w))
    if level is SEMANTIC:
        quot = FunApp("arith.div", (scaled1, scaled2))
    else:
        cv = fresh_num()
        quot = Count(
            (NBind(cv, exp2_at(top, level, width)),),
            Le(Mul(Add(cv, ONE), scaled2), scaled1),
        )
    y = fresh_num()
    return RExpression(
        _xor(r1.sg, r2.sg), bit_at(y, quot, level, width), w, Add(top, ONE), y
    )


def _member_schema(args: tuple, scale: Term):
    """Sign and scale-aligned numerator of the family member at args."""
    args = tuple(args)
    sg = RelApp("Zsg", args)
    shift = truncated_sub(scale, FunApp("Zdn", args), fresh_num())
    y = fresh_num()
    pos = truncated_sub(y, shift, fresh_num())
    bits = conj(
        Le(shift, y),
        RelApp("Zind", (pos,) + args),
        lt(pos, FunApp("Zbd", args)),
    )
    q = NumValue(bits, Add(FunApp("Zbd", args), shift), y)
    return sg, q


def _common_scale(arity) -> Term:
    from .families import mk_u_agg

    return substitute(
        mk_u_agg("u_max", arity), fun_map={"U": lambda a: FunApp("Zdn", tuple(a))}
    )


def _shifted_width(scale: Term):
    def width_of(a):
        args = tuple(a)
        return Add(
            FunApp("Zbd", args), truncated_sub(scale, FunApp("Zdn", args), fresh_num())
        )

    return width_of


def _itadd_rexpr(arity, level: FidelityLevel, width: int, cap: int) -> RExpression:
    """Family sum: positive and negative members summed apart on the common
    scale, then combined as a signed difference."""
    from .families import mk_itadd_binary

    scale = _common_scale(arity)
    width_of = _shifted_width(scale)
    binary = mk_itadd_binary(arity, level, width, cap)

    def side(negated: bool):
        def bit_of(a):
            sg, q = _member_schema(tuple(a[1:]), scale)
            side_sign = sg if negated else Not(sg)
            return And(side_sign, nv_bit_at(q, a[0]))

        bits = substitute(binary.bits, rel_map={"Y": bit_of}, fun_map={"U": width_of})
        bound = substitute(binary.bound, rel_map={"Y": bit_of}, fun_map={"U": width_of})
        return NumValue(bits, bound, binary.bit_var)

    pos = side(False)
    neg = side(True)
    neg_small = nv_leq(neg, pos, level, width)
    d_pn = nv_sub(pos, neg, level, width)
    d_np = nv_sub(neg, pos, level, width)
    assert d_pn.bit_var == d_np.bit_var
    ind = disj(And(neg_small, d_pn.bits), And(Not(neg_small), d_np.bits))
    bd = Add(max_term(pos.bound, neg.bound, fresh_num()), ONE)
    return RExpression(Not(neg_small), ind, scale, bd, d_pn.bit_var)


def _value_leq(sg_a, q_a, sg_b, q_b, level, width) -> Formula:
    """Signed comparison value(a) <= value(b) on scale-aligned numerators."""
    return disj(
        conj(sg_a, Not(sg_b)),
        conj(sg_a, sg_b, nv_leq(q_b, q_a, level, width)),
        conj(Not(sg_a), Not(sg_b), nv_leq(q_a, q_b, level, width)),
        conj(Not(sg_a), sg_b, nv_zero(q_a), nv_zero(q_b)),
    )


def _extremal_rexpr(kind: str, arity, level: FidelityLevel, width: int) -> RExpression:
    from .families import mk_u_agg

    k, l = arity
    xs, ys, args, member, _, y_bound = _family_parts(k, l)
    xsp, ysp, argsp, memberp, _, y_boundp = _family_parts(k, l, primed=True)

    scale = _common_scale(arity)
    sg, q = _member_schema(args, scale)
    sgp, qp = _member_schema(argsp, scale)

    if kind == "max":
        dominates = _value_leq(sgp, qp, sg, q, level, width)
    else:
        dominates = _value_leq(sg, q, sgp, qp, level, width)
    extremal = conj(
        member,
        _quantify(xsp, ysp, y_boundp, implies(memberp, dominates), exists=False),
    )

    ind = _quantify(xs, ys, y_bound, conj(extremal, q.bits), exists=True)
    sg_out = _quantify(
        xs, ys, y_bound, conj(extremal, sg, Not(nv_zero(q))), exists=True
    )
    bd = substitute(
        mk_u_agg("u_max", arity), fun_map={"U": _shifted_width(scale)}
    )
    return RExpression(sg_out, ind, scale, bd, q.bit_var)


def mk_rat_arith(
    kind: str,
    level: FidelityLevel = PURE,
    width: int = DEFAULT_WIDTH,
    arity: tuple[int, int] = (1, 0),
    cap: int | None = None,
):
    """Rational arithmetic over the operand schema.

    Binary kinds (add, sub, mul, leq, crep, div_approx) read operands Z1 and
    Z2; leq yields a formula, the rest yield r-expressions.  Family kinds
    (itadd, max, min) read the member-indexed schema Zsg/Zind/Zdn/Zbd under
    X and V with the given arity.  cap limits the exact range of the pure
    bitwise sums (products and family sums of combined size beyond it come
    out wrong at the pure level; the semantic level has no such limit).
    """
    if kind not in RAT_KINDS:
        raise ValueError(f"unknown rational operation {kind!r}")
    if cap is None:
        cap = 8 if kind == "mul" else 6

    def make():
        if kind == "add":
            return _add_core(False, level, width)
        if kind == "sub":
            return _add_core(True, level, width)
        if kind == "mul":
            return _mul_rexpr(level, width, cap)
        if kind == "leq":
            return _leq_formula(level, width)
        if kind == "crep":
            return _crep_rexpr()
        if kind == "div_approx":
            return _div_rexpr(level, width)
        if kind == "itadd":
            return _itadd_rexpr(arity, level, width, cap)
        return _extremal_rexpr(kind, arity, level, width)

    return cached("rat-arith", (kind, level, width, arity, cap), make)

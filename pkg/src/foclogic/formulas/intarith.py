"""Integer arithmetic on bit-encoded operands.

Operands come in through a schema: relation symbol Y1 (the set of set bit
positions) and nullary function symbol U1 (the width cap) denote the number
sum(2**i for i in Y1 if i < U1()), and likewise Y2/U2.  The iterated sum
works over a two-place symbol Y (bit index first: Y(j, i) says bit j of
family member i is set) with one cap U bounding both member count and
width.  Callers instantiate the schema symbols with `substitute` to plug in
their own formulas.

Addition and subtraction results are NumValue records: a bits formula over a
distinguished variable, plus a bound term sitting above every set bit.
Comparison returns a plain formula.

The pure iterated sum dispatches on the family size m = U(): families up to
a static cap are summed by a chain of pairwise additions, and families of
size at least 128 by the logarithmic column-sum cascade (column sums, their
shrinking widths coded as a sequence, one verified compression step per
level, and a final two-number addition).  The gap between the cap and 128
evaluates to 0; callers that need wider exact families raise the cap.
"""

from __future__ import annotations

from ..rexpr import NumValue
from ..syntax import (
    Add,
    And,
    Builtin,
    Count,
    Formula,
    FunApp,
    Le,
    Mul,
    NBind,
    Not,
    RelApp,
    Term,
    ZERO,
    ONE,
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
    SEMANTIC,
    FidelityLevel,
    cached,
    fresh_num,
    hold_at,
    substitute,
)
from .bits import TWO, bit_at
from .seqcode import seq_kit

U1 = FunApp("U1", ())
U2 = FunApp("U2", ())
U = FunApp("U", ())


def operand_value(rel_name: str, cap: Term, scan, mult) -> Term:
    """Term for sum(2**i for i in rel, i < cap), via an unused multiplier."""
    return Count(
        (NBind(scan, cap), NBind(mult, FunApp("arith.pow2", (scan,)))),
        RelApp(rel_name, (scan,)),
    )


class IntArithKit:
    """Two-operand bit arithmetic at one fidelity level and width."""

    def __init__(self, level: FidelityLevel, width: int):
        self.level = level
        self.width = width
        self.yhat = fresh_num()  # distinguished result bit
        self.jv = fresh_num()  # carry/borrow witness
        self.kv = fresh_num()  # inner sweep
        self.iv = fresh_num()  # comparison sweep
        self.kv2 = fresh_num()  # comparison witness
        self.vv = fresh_num()  # operand value scan (semantic)
        self.cv = fresh_num()  # operand value multiplier (semantic)

    def a(self, t: Term) -> Formula:
        return And(RelApp("Y1", (t,)), lt(t, U1))

    def b(self, t: Term) -> Formula:
        return And(RelApp("Y2", (t,)), lt(t, U2))

    def _xor3(self, p: Formula, q: Formula, r: Formula) -> Formula:
        return disj(
            conj(p, q, r),
            conj(p, Not(q), Not(r)),
            conj(Not(p), q, Not(r)),
            conj(Not(p), Not(q), r),
        )

    def carry(self, t: Term) -> Formula:
        """A carry arrives at position t: some lower position has both bits
        set and every position between feeds the carry through."""
        jv, kv = self.jv, self.kv
        return exists_bounded(
            jv,
            t,
            conj(
                self.a(jv),
                self.b(jv),
                forall_bounded(
                    kv, t, implies(lt(jv, kv), disj(self.a(kv), self.b(kv)))
                ),
            ),
        )

    def borrow(self, t: Term) -> Formula:
        """A borrow arrives at position t in the subtraction."""
        jv, kv = self.jv, self.kv
        agree = disj(
            And(self.a(kv), self.b(kv)),
            And(Not(self.a(kv)), Not(self.b(kv))),
        )
        return exists_bounded(
            jv,
            t,
            conj(
                Not(self.a(jv)),
                self.b(jv),
                forall_bounded(kv, t, implies(lt(jv, kv), agree)),
            ),
        )

    def leq(self) -> Formula:
        """First operand <= second operand."""
        if self.level is SEMANTIC:
            return Le(self._value("Y1", U1), self._value("Y2", U2))
        iv, kv2 = self.iv, self.kv2
        higher = exists_bounded(
            kv2,
            Add(U2, ONE),
            conj(lt(iv, kv2), self.b(kv2), Not(self.a(kv2))),
        )
        return forall_bounded(
            iv,
            Add(U1, ONE),
            implies(And(self.a(iv), Not(self.b(iv))), higher),
        )

    def geq(self) -> Formula:
        """Second operand <= first operand (same shape, roles swapped)."""
        if self.level is SEMANTIC:
            return Le(self._value("Y2", U2), self._value("Y1", U1))
        iv, kv2 = self.iv, self.kv2
        higher = exists_bounded(
            kv2,
            Add(U1, ONE),
            conj(lt(iv, kv2), self.a(kv2), Not(self.b(kv2))),
        )
        return forall_bounded(
            iv,
            Add(U2, ONE),
            implies(And(self.b(iv), Not(self.a(iv))), higher),
        )

    def _value(self, rel: str, cap: Term) -> Term:
        return operand_value(rel, cap, self.vv, self.cv)

    def add(self) -> NumValue:
        y = self.yhat
        bound = Add(Add(U1, U2), ONE)
        if self.level is SEMANTIC:
            total = FunApp("arith.add", (self._value("Y1", U1), self._value("Y2", U2)))
            return NumValue(Builtin("BIT", (y, total)), bound, y)
        bits = self._xor3(self.a(y), self.b(y), self.carry(y))
        return NumValue(bits, bound, y)

    def sub(self) -> NumValue:
        y = self.yhat
        bound = Add(U1, ONE)
        if self.level is SEMANTIC:
            diff = FunApp("arith.sub", (self._value("Y1", U1), self._value("Y2", U2)))
            return NumValue(Builtin("BIT", (y, diff)), bound, y)
        bits = And(self.geq(), self._xor3(self.a(y), self.b(y), self.borrow(y)))
        return NumValue(bits, bound, y)


def int_arith_kit(
    level: FidelityLevel = PURE, width: int = DEFAULT_WIDTH
) -> IntArithKit:
    return cached("int-arith-kit", (level, width), lambda: IntArithKit(level, width))


def mk_int_arith(
    kind: str, level: FidelityLevel = PURE, width: int = DEFAULT_WIDTH
):
    """Two-operand arithmetic over the Y1/U1, Y2/U2 schema.

    kind "add" or "sub" gives a NumValue (truncated subtraction: 0 when the
    second operand is larger); kind "leq" gives a formula.
    """

    def make():
        kit = int_arith_kit(level, width)
        if kind == "add":
            return kit.add()
        if kind == "sub":
            return kit.sub()
        if kind == "leq":
            return kit.leq()
        raise ValueError(f"unknown integer operation {kind!r}")

    return cached("int-arith", (kind, level, width), make)


# --- iterated sum ----------------------------------------------------------------


class _CascadeVars:
    """One fresh variable per role in the column-sum cascade."""

    def __init__(self):
        for name in (
            "iv0",  # member scan in the column sum
            "dv1", "sb1",  # first compression level
            "dv2", "sb2",  # second compression level
            "y2v", "zv", "ypv", "sbq",  # width-chain extraction
            "pv",  # shared width-chain code
            "sbr",  # entry index shift inside suffix sums
            "kap", "cv3",  # suffix sum
            "kap2", "cv4", "sbo",  # segment offsets
            "sbs1", "sbs2", "dv4",  # compression step check
            "dv5",  # window comparison
            "rv1", "sbb",  # base segment check
            "kv3", "rv2", "wv2", "sbc",  # level segments check
            "wv3", "zv3", "sbd",  # final value extraction
            "hv2",  # parity witness
            "sbe", "sbf",  # parity splits
        ):
            setattr(self, name, fresh_num())


def cascade_pieces(level: FidelityLevel = PURE, width: int = DEFAULT_WIDTH) -> dict:
    """Component builders of the large-family sum, exposed for unit testing.

    Column sums are compressed level by level, each level's width being the
    floor-log of the previous width plus one; the per-level widths are read
    off a number coding the width chain, each level's sums are coded as a
    sequence checked against the previous level through a window-matching
    compression step, and the two-valued top level splits into even and odd
    positions whose two numbers a single addition combines.
    """
    return cached("cascade-pieces", (level, width), lambda: _build_cascade(level, width))


def _build_cascade(level: FidelityLevel, width: int) -> dict:
    v = _CascadeVars()
    sq = seq_kit(level, width)
    kit = int_arith_kit(level, width)

    def sub(a, b, var):
        return truncated_sub(a, b, var)

    # column sums and the first two compression levels
    def s0_at(jt):
        return Count(
            (NBind(v.iv0, U),),
            conj(RelApp("Y", (jt, v.iv0)), lt(jt, U)),
        )

    p1 = sq.flog_at(U)
    p2 = sq.flog_at(Add(p1, ONE))

    def s1_at(jt):
        return Count(
            (NBind(v.dv1, Add(p1, ONE)),),
            conj(
                Le(v.dv1, jt),
                bit_at(v.dv1, s0_at(sub(jt, v.dv1, v.sb1)), level, width),
            ),
        )

    def s2_at(jt):
        return Count(
            (NBind(v.dv2, Add(p2, ONE)),),
            conj(
                Le(v.dv2, jt),
                bit_at(v.dv2, s1_at(sub(jt, v.dv2, v.sb2)), level, width),
            ),
        )

    # the chain of level widths, coded as a sequence and shared through v.pv
    chain_ok = conj(
        sq.seq_at(v.zv),
        num_eq(sq.entry_at(ZERO, v.zv), sq.flog_at(U)),
        forall_bounded(
            v.ypv,
            sub(sq.seqlen_at(v.zv), ONE, v.sbq),
            num_eq(
                sq.entry_at(Add(v.ypv, ONE), v.zv),
                sq.flog_at(Add(sq.entry_at(v.ypv, v.zv), ONE)),
            ),
        ),
    )
    width_chain = Count(
        (NBind(v.y2v, U),),
        exists_bounded(v.zv, U, conj(chain_ok, lt(v.y2v, v.zv))),
    )

    levels = sq.seqlen_at(v.pv)

    def p_at(it):
        return sq.entry_at(sub(it, ONE, v.sbr), v.pv)

    def suffix_at(kt):
        return Count(
            (NBind(v.kap, Add(levels, ONE)), NBind(v.cv3, p_at(v.kap))),
            Le(Add(kt, ONE), v.kap),
        )

    def offset_at(kt):
        tail = Count(
            (NBind(v.kap2, kt), NBind(v.cv4, suffix_at(v.kap2))),
            Le(TWO, v.kap2),
        )
        return Add(sub(kt, TWO, v.sbo), tail)

    total_len = offset_at(Add(levels, ONE))

    def step_at(st, tt):
        ln = sq.seqlen_at(tt)
        weight = sub(sub(ln, ONE, v.sbs1), v.dv4, v.sbs2)
        return num_eq(
            st,
            Count(
                (NBind(v.dv4, ln),),
                bit_at(weight, sq.entry_at(v.dv4, tt), level, width),
            ),
        )

    def window_match(wt, tt, at, pt):
        return conj(
            sq.seq_at(wt),
            num_eq(sq.seqlen_at(wt), Add(pt, ONE)),
            forall_bounded(
                v.dv5,
                Add(pt, ONE),
                num_eq(sq.entry_at(v.dv5, wt), sq.entry_at(Add(at, v.dv5), tt)),
            ),
        )

    def all_sums(jt, zt):
        base_suffix = suffix_at(TWO)
        base = forall_bounded(
            v.rv1,
            Add(base_suffix, ONE),
            conj(
                implies(
                    Le(base_suffix, Add(jt, v.rv1)),
                    num_eq(
                        sq.entry_at(v.rv1, zt),
                        s2_at(sub(Add(jt, v.rv1), base_suffix, v.sbb)),
                    ),
                ),
                implies(
                    lt(Add(jt, v.rv1), base_suffix),
                    num_eq(sq.entry_at(v.rv1, zt), ZERO),
                ),
            ),
        )
        window_pos = Add(offset_at(sub(v.kv3, ONE, v.sbc)), v.rv2)
        upper = forall_bounded(
            v.kv3,
            Add(levels, ONE),
            implies(
                Le(numeral(3), v.kv3),
                forall_bounded(
                    v.rv2,
                    Add(suffix_at(v.kv3), ONE),
                    exists_bounded(
                        v.wv2,
                        U,
                        conj(
                            window_match(v.wv2, zt, window_pos, p_at(v.kv3)),
                            step_at(
                                sq.entry_at(Add(offset_at(v.kv3), v.rv2), zt),
                                v.wv2,
                            ),
                        ),
                    ),
                ),
            ),
        )
        return conj(
            sq.seq_at(zt),
            num_eq(sq.seqlen_at(zt), total_len),
            base,
            upper,
        )

    def top_at(jt):
        """Top-level column sum at position jt (a value in {0, 1, 2})."""
        last = sq.entry_at(sub(sq.seqlen_at(v.zv3), ONE, v.sbd), v.zv3)
        return Count(
            (NBind(v.wv3, numeral(3)),),
            exists_bounded(v.zv3, U, conj(all_sums(jt, v.zv3), lt(v.wv3, last))),
        )

    def even_at(t):
        return exists_bounded(v.hv2, Add(t, ONE), num_eq(t, Add(v.hv2, v.hv2)))

    def even_side(t):
        return disj(
            And(even_at(t), num_eq(top_at(t), ONE)),
            And(Not(even_at(t)), num_eq(top_at(sub(t, ONE, v.sbe)), TWO)),
        )

    def odd_side(t):
        return disj(
            And(Not(even_at(t)), num_eq(top_at(t), ONE)),
            And(
                even_at(t),
                conj(Le(ONE, t), num_eq(top_at(sub(t, ONE, v.sbf)), TWO)),
            ),
        )

    side_bound = Add(Mul(TWO, U), TWO)
    combined = substitute(
        mk_int_arith("add", level, width).bits,
        rel_map={
            "Y1": lambda args: even_side(args[0]),
            "Y2": lambda args: odd_side(args[0]),
        },
        fun_map={
            "U1": lambda args: side_bound,
            "U2": lambda args: side_bound,
        },
    )

    def bits_at(result_var) -> Formula:
        return exists_bounded(
            v.pv,
            Add(U, ONE),
            And(
                num_eq(v.pv, width_chain),
                hold_at(combined, [(kit.yhat, result_var)]),
            ),
        )

    return {
        "s0_at": s0_at,
        "s1_at": s1_at,
        "s2_at": s2_at,
        "p1": p1,
        "p2": p2,
        "width_chain": width_chain,
        "shared_chain_var": v.pv,
        "levels": levels,
        "p_at": p_at,
        "suffix_at": suffix_at,
        "offset_at": offset_at,
        "step_at": step_at,
        "window_match": window_match,
        "all_sums": all_sums,
        "top_at": top_at,
        "bits_at": bits_at,
    }


def _chain_bits(level: FidelityLevel, width: int, cap: int, result_var) -> Formula:
    """Bits of the family sum by a chain of cap pairwise additions."""
    kit = int_arith_kit(level, width)
    add_nv = mk_int_arith("add", level, width)

    def member_at(t: Term, index: int) -> Formula:
        return conj(
            lt(numeral(index), U),
            RelApp("Y", (t, numeral(index))),
            lt(t, U),
        )

    bits = member_at(kit.yhat, 0)
    bound: Term = U
    for index in range(1, cap):
        prev = bits
        bits = substitute(
            add_nv.bits,
            rel_map={
                "Y1": lambda args, prev=prev: hold_at(prev, [(kit.yhat, args[0])]),
                "Y2": lambda args, index=index: member_at(args[0], index),
            },
            fun_map={
                "U1": lambda args, bound=bound: bound,
                "U2": lambda args: U,
            },
        )
        # partial sum of index+1 members, each below 2**U()
        bound = Add(U, numeral((index + 1).bit_length()))
    return hold_at(bits, [(kit.yhat, result_var)])


def mk_s_itadd(
    level: FidelityLevel = PURE,
    width: int = DEFAULT_WIDTH,
    cap: int = 6,
) -> NumValue:
    """Sum of the family coded by Y (bit j of member i as Y(j, i)) and U.

    The bound 2*U() is sound because the sum of at most m numbers below 2**m
    stays below 2**(2m).  The pure formula is exact for families of size up
    to cap and (structurally) of size at least 128; between those the pure
    formula denotes 0.
    """
    if cap < 1:
        raise ValueError("chain cap must be at least 1")

    def make():
        y = fresh_num()
        bound = Mul(TWO, U)
        if level is SEMANTIC:
            iv, jv, cv = fresh_num(), fresh_num(), fresh_num()
            total = Count(
                (
                    NBind(iv, U),
                    NBind(jv, U),
                    NBind(cv, FunApp("arith.pow2", (jv,))),
                ),
                RelApp("Y", (jv, iv)),
            )
            return NumValue(Builtin("BIT", (y, total)), bound, y)
        bits = disj(
            And(Le(U, numeral(cap)), _chain_bits(level, width, cap, y)),
            And(Le(numeral(128), U), cascade_pieces(level, width)["bits_at"](y)),
        )
        return NumValue(bits, bound, y)

    return cached("s-itadd", (level, width, cap), make)


def cascade_widths(m: int) -> list[int]:
    """Level widths of the cascade for family size m: the floor-log chain
    from floor(log2 m) down to its first 1."""
    if m < 2:
        raise ValueError("cascade widths need m >= 2")
    p = m.bit_length() - 1
    out = [p]
    while p != 1:
        p = (p + 1).bit_length() - 1
        out.append(p)
    return out


# --- multiplication and division ---------------------------------------------------


def mk_mul_div(
    level: FidelityLevel = PURE,
    width: int = DEFAULT_WIDTH,
    cap: int = 8,
) -> dict:
    """Product and quotient over the Y1/U1, Y2/U2 schema.

    The product is the family sum of the first operand shifted by every set
    bit of the second, so the pure product is exact while U1() + U2() stays
    within the chain cap.  The quotient leans on the division oracle at
    either level; a pure-logic quotient is out of scope here.
    """

    def make():
        sum_nv = mk_s_itadd(level, width, cap)
        sv = fresh_num()

        def shifted_member(jt: Term, it: Term) -> Formula:
            # bit jt of (first operand << it), for a set second-operand bit it
            d = truncated_sub(jt, it, sv)
            return conj(
                RelApp("Y2", (it,)),
                lt(it, U2),
                Le(it, jt),
                RelApp("Y1", (d,)),
                lt(d, U1),
            )

        mul_bits = substitute(
            sum_nv.bits,
            rel_map={"Y": lambda args: shifted_member(args[0], args[1])},
            fun_map={"U": lambda args: Add(U1, U2)},
        )
        mul = NumValue(mul_bits, Add(U1, U2), sum_nv.bit_var)

        dy, dv, dc = fresh_num(), fresh_num(), fresh_num()
        quotient = FunApp(
            "arith.div",
            (
                operand_value("Y1", U1, dv, dc),
                operand_value("Y2", U2, dv, dc),
            ),
        )
        div = NumValue(Builtin("BIT", (dy, quotient)), Add(U1, ONE), dy)
        return {"mul": mul, "div": div}

    return cached("mul-div", (level, width, cap), make)

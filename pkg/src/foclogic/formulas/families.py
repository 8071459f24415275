"""Aggregation over definable families of numbers.

A family is coded by a schema: relation X picks the member index tuples
(k vertex coordinates, then l number coordinates, the latter bounded by the
function V over the vertex part), and the function U gives each member's
value.  For bit-level aggregation the members' values arrive instead through
a relation Y carrying bit positions (bit index first: Y(z, index...) says
bit z of that member is set), with U giving each member's width and V again
bounding the number coordinates.

Value-level aggregation (sum, max, min of the U values) stays inside plain
counting and never touches bit machinery, so it has no fidelity level.  The
bit-level sum reduces to the two-place family sum by summing columns; max
and min select an extremal member by bitwise comparison and read its bits.

With k = 0 every output is free of vertex variables.
"""

from __future__ import annotations

from ..rexpr import NumValue
from ..syntax import (
    Add,
    And,
    Count,
    Formula,
    FunApp,
    Le,
    NBind,
    ONE,
    RelApp,
    Term,
    VBind,
    VertexVar,
    conj,
    exists_bounded,
    exists_vertex,
    forall_bounded,
    forall_vertex,
    implies,
    lt,
    truncated_sub,
)
from .base import (
    DEFAULT_WIDTH,
    PURE,
    FidelityLevel,
    cached,
    fresh_num,
    substitute,
)
from .bits import bit_at
from .intarith import mk_int_arith, mk_s_itadd


def _family_parts(k: int, l: int, primed: bool = False):
    """Vertex vars, fresh number vars, and the standard schema applications.

    The primed variant uses a disjoint block of vertex variables so a member
    quantifier can nest inside another member quantifier.
    """
    lo = k + 1 if primed else 1
    xs = tuple(VertexVar(i) for i in range(lo, lo + k))
    ys = tuple(fresh_num() for _ in range(l))
    args = xs + ys
    member = RelApp("X", args)
    value = FunApp("U", args)
    y_bound = FunApp("V", xs)
    return xs, ys, args, member, value, y_bound


def _quantify(xs, ys, y_bound, body: Formula, exists: bool) -> Formula:
    for y in reversed(ys):
        body = (
            exists_bounded(y, y_bound, body)
            if exists
            else forall_bounded(y, y_bound, body)
        )
    for x in reversed(xs):
        body = exists_vertex(x, body) if exists else forall_vertex(x, body)
    return body


def _count_members(xs, ys, y_bound, body: Formula, extra_bind=None) -> Term:
    """Count (or weighted-count, via extra_bind) of members satisfying body."""
    binds = tuple(VBind(x) for x in xs) + tuple(NBind(y, y_bound) for y in ys)
    if extra_bind is not None:
        binds = binds + (extra_bind,)
    if not binds:
        binds = (NBind(fresh_num(), ONE),)
    return Count(binds, body)


def mk_u_agg(kind: str, arity: tuple[int, int] = (1, 0)) -> Term:
    """Sum, max, or min of the member values U over the family X.

    kind is one of "u_itadd", "u_max", "u_min"; arity = (k, l) fixes the
    member index shape.  Empty families aggregate to 0.
    """

    def make():
        k, l = arity
        xs, ys, _, member, value, y_bound = _family_parts(k, l)
        zv = fresh_num()
        total = _count_members(xs, ys, y_bound, member, NBind(zv, value))
        if kind == "u_itadd":
            return total
        z2 = fresh_num()
        if kind == "u_max":
            below_some = _quantify(
                xs, ys, y_bound, conj(member, lt(z2, value)), exists=True
            )
            return Count((NBind(z2, total),), below_some)
        if kind == "u_min":
            below_all = _quantify(
                xs, ys, y_bound, implies(member, lt(z2, value)), exists=False
            )
            return Count((NBind(z2, total),), below_all)
        raise ValueError(f"unknown aggregation {kind!r}")

    return cached("u-agg", (kind, arity), make)


def mk_itadd_binary(
    arity: tuple[int, int] = (1, 0),
    level: FidelityLevel = PURE,
    width: int = DEFAULT_WIDTH,
    cap: int = 6,
) -> NumValue:
    """Bits of the sum over the family of bit-coded members Y/U.

    Columns are summed first (how many members have bit i set), then the
    column sums, shifted into place, feed the two-place family sum.  The
    size handed to that sum is the maximal member width plus the member
    count, which bounds both of its coordinates; the pure result is exact
    while that stays within the chain cap.
    """

    def make():
        k, l = arity
        xs, ys, args, member, value, y_bound = _family_parts(k, l)

        def column_at(it: Term) -> Term:
            body = conj(member, RelApp("Y", (it,) + args), lt(it, value))
            return _count_members(xs, ys, y_bound, body)

        width_max = mk_u_agg("u_max", arity)
        member_count = _count_members(xs, ys, y_bound, member)
        size_term = Add(width_max, member_count)

        sum_nv = mk_s_itadd(level, width, cap)
        dv = fresh_num()

        def shifted(jt: Term, it: Term) -> Formula:
            d = truncated_sub(jt, it, dv)
            return And(Le(it, jt), bit_at(d, column_at(it), level, width))

        bits = substitute(
            sum_nv.bits,
            rel_map={"Y": lambda a: shifted(a[0], a[1])},
            fun_map={"U": lambda a: size_term},
        )
        return NumValue(bits, size_term, sum_nv.bit_var)

    return cached("itadd-binary", (arity, level, width, cap), make)


def _extremal_nv(kind: str, arity, level, width) -> NumValue:
    k, l = arity
    xs, ys, args, member, value, y_bound = _family_parts(k, l)
    xsp, ysp, argsp, memberp, valuep, y_boundp = _family_parts(k, l, primed=True)

    # other member's value <= this member's value (or the reverse, for min)
    first, second = (argsp, args) if kind == "max" else (args, argsp)
    comparison = substitute(
        mk_int_arith("leq", level, width),
        rel_map={
            "Y1": lambda a: RelApp("Y", (a[0],) + first),
            "Y2": lambda a: RelApp("Y", (a[0],) + second),
        },
        fun_map={
            "U1": lambda a: FunApp("U", first),
            "U2": lambda a: FunApp("U", second),
        },
    )
    extremal = conj(
        member,
        _quantify(xsp, ysp, y_boundp, implies(memberp, comparison), exists=False),
    )

    yhat = fresh_num()
    bits = _quantify(
        xs,
        ys,
        y_bound,
        conj(extremal, RelApp("Y", (yhat,) + args), lt(yhat, value)),
        exists=True,
    )
    z2 = fresh_num()
    tight = _quantify(xs, ys, y_bound, implies(extremal, lt(z2, value)), exists=False)
    bound = Count((NBind(z2, mk_u_agg("u_max", arity)),), tight)
    return NumValue(bits, bound, yhat)


def mk_itmax(
    arity: tuple[int, int] = (1, 0),
    level: FidelityLevel = PURE,
    width: int = DEFAULT_WIDTH,
) -> NumValue:
    """Bits of the largest member value of the bit-coded family Y/U (0 when
    the family is empty)."""
    return cached(
        "itmax", (arity, level, width), lambda: _extremal_nv("max", arity, level, width)
    )


def mk_itmin(
    arity: tuple[int, int] = (1, 0),
    level: FidelityLevel = PURE,
    width: int = DEFAULT_WIDTH,
) -> NumValue:
    """Bits of the smallest member value of the bit-coded family Y/U (0 when
    the family is empty)."""
    return cached(
        "itmin", (arity, level, width), lambda: _extremal_nv("min", arity, level, width)
    )

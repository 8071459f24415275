"""Combinators on bit-encoded numbers (NumValue records).

These wrap the schema-level integer arithmetic into direct operations on
NumValue operands: plug the operands' bit formulas into the arithmetic
schema, keep the distinguished bit variable of the underlying kit, and
compute sound bounds.  Chaining is safe: pinning a bit formula at an
argument that mentions its own bit variable stages the value through fresh
intermediaries (see hold_at).
"""

from __future__ import annotations

from ..rexpr import NumValue
from ..syntax import (
    Add,
    And,
    Count,
    Formula,
    Le,
    NBind,
    Not,
    ONE,
    Term,
    lt,
    truncated_sub,
)
from .base import (
    DEFAULT_WIDTH,
    PURE,
    FidelityLevel,
    fresh_num,
    hold_at,
    substitute,
)
from .bits import bit_at, exp2_at, len_at
from .intarith import mk_int_arith, mk_mul_div


def nv_bit_at(nv: NumValue, t: Term) -> Formula:
    """The operand's bit formula read at position t."""
    return hold_at(nv.bits, [(nv.bit_var, t)])


def nv_shift(nv: NumValue, e: Term) -> NumValue:
    """The operand shifted left by e (value times 2**e)."""
    y = fresh_num()
    sv = fresh_num()
    bits = And(Le(e, y), nv_bit_at(nv, truncated_sub(y, e, sv)))
    return NumValue(bits, Add(nv.bound, e), y)


def nv_zero(nv: NumValue) -> Formula:
    """No bit of the operand is set."""
    iv = fresh_num()
    return Not(Le(ONE, Count((NBind(iv, nv.bound),), nv_bit_at(nv, iv))))


def _binary(schema, nv1: NumValue, nv2: NumValue):
    return substitute(
        schema,
        rel_map={
            "Y1": lambda a: nv_bit_at(nv1, a[0]),
            "Y2": lambda a: nv_bit_at(nv2, a[0]),
        },
        fun_map={
            "U1": lambda a: nv1.bound,
            "U2": lambda a: nv2.bound,
        },
    )


def nv_add(
    nv1: NumValue,
    nv2: NumValue,
    level: FidelityLevel = PURE,
    width: int = DEFAULT_WIDTH,
) -> NumValue:
    schema = mk_int_arith("add", level, width)
    bits = _binary(schema.bits, nv1, nv2)
    return NumValue(bits, Add(Add(nv1.bound, nv2.bound), ONE), schema.bit_var)


def nv_sub(
    nv1: NumValue,
    nv2: NumValue,
    level: FidelityLevel = PURE,
    width: int = DEFAULT_WIDTH,
) -> NumValue:
    """Truncated difference (0 when the second operand is larger)."""
    schema = mk_int_arith("sub", level, width)
    bits = _binary(schema.bits, nv1, nv2)
    return NumValue(bits, Add(nv1.bound, ONE), schema.bit_var)


def nv_leq(
    nv1: NumValue,
    nv2: NumValue,
    level: FidelityLevel = PURE,
    width: int = DEFAULT_WIDTH,
) -> Formula:
    return _binary(mk_int_arith("leq", level, width), nv1, nv2)


def nv_mul(
    nv1: NumValue,
    nv2: NumValue,
    level: FidelityLevel = PURE,
    width: int = DEFAULT_WIDTH,
    cap: int = 8,
) -> NumValue:
    schema = mk_mul_div(level, width, cap)["mul"]
    bits = _binary(schema.bits, nv1, nv2)
    return NumValue(bits, Add(nv1.bound, nv2.bound), schema.bit_var)


def nv_of_term(
    t: Term, level: FidelityLevel = PURE, width: int = DEFAULT_WIDTH
) -> NumValue:
    """The value of a term as a bit-encoded operand."""
    y = fresh_num()
    return NumValue(bit_at(y, t, level, width), len_at(t, level, width), y)


def term_of_nv(
    nv: NumValue, level: FidelityLevel = PURE, width: int = DEFAULT_WIDTH
) -> Term:
    """The operand's value as a term: sum of 2**i over its set bits."""
    iv = fresh_num()
    cv = fresh_num()
    return Count(
        (NBind(iv, nv.bound), NBind(cv, exp2_at(iv, level, width))),
        nv_bit_at(nv, iv),
    )

"""Numbers and dyadic rationals expressed inside the logic.

A `NumValue` packages a natural number as a bit-indicator formula plus a
width bound: bit i of the value is set exactly when the formula holds with
the designated bit variable assigned i, and no bit at or above the bound is
ever set.

An `RExpression` extends this to signed dyadic rationals with four
components: a sign formula (negative when it holds), a numerator bit
indicator read at the designated bit variable, a denominator-exponent term,
and a numerator width bound.  Its value is

    (-1)^sign * 2^(-denominator_exponent) * sum of 2^i over set bits i.

Every instance records its own designated bit variable; nested constructions
rename it apart, so sharing components between expressions is safe.
"""

from __future__ import annotations

from dataclasses import dataclass

from .dyadic import DyadicRational
from .semantics import Assignment, EvalSession
from .syntax import Formula, NumVar, Term

__all__ = [
    "NumValue",
    "RExpression",
    "read_bits",
    "eval_num",
    "eval_rexpr",
]


@dataclass(frozen=True)
class NumValue:
    """A natural number given by a bit formula and a width bound."""

    bits: Formula
    bound: Term
    bit_var: NumVar

    def free_vars_note(self):  # pragma: no cover - documentation helper
        return "bit_var is bound by the reader, all other free vars are inputs"


@dataclass(frozen=True)
class RExpression:
    """A signed dyadic rational given by four logic components.

    sg: formula, true exactly when the value is negative;
    ind: formula, true with bit_var = i exactly when numerator bit i is set;
    dn: term, the denominator exponent (value is numerator / 2^dn);
    bd: term, strict upper bound on set numerator bit positions.
    """

    sg: Formula
    ind: Formula
    dn: Term
    bd: Term
    bit_var: NumVar


def read_bits(session: EvalSession, bits: Formula, bound: Term,
              bit_var: NumVar, env: dict | None = None) -> int:
    """Assemble the integer whose bit i is set iff `bits` holds at i < bound."""
    env = dict(env) if env else {}
    width = session.eval_term(bound, env)
    out = 0
    for i in range(width):
        env[bit_var] = i
        if session.eval_formula(bits, env):
            out |= 1 << i
    return out


def eval_num(nv: NumValue, graph, assignment: Assignment | None = None,
             env: dict | None = None, session: EvalSession | None = None) -> int:
    if session is None:
        session = EvalSession(graph, assignment)
    return read_bits(session, nv.bits, nv.bound, nv.bit_var, env)


def eval_rexpr(re: RExpression, graph, assignment: Assignment | None = None,
               env: dict | None = None,
               session: EvalSession | None = None) -> DyadicRational:
    """Exact value of an r-expression under a graph and assignment."""
    if session is None:
        session = EvalSession(graph, assignment)
    env = dict(env) if env else {}
    numerator = read_bits(session, re.ind, re.bd, re.bit_var, env)
    negative = session.eval_formula(re.sg, env)
    exponent = session.eval_term(re.dn, env)
    if negative:
        numerator = -numerator
    return DyadicRational.from_signed(numerator, exponent)

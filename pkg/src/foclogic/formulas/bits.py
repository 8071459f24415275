"""Powers of two, bit extraction, and binary length.

The pure constructions are width-capped: a kit built at width K is exact for
numbers below 2**K (the power-of-two test is "divides 2**K", so larger
arguments fall outside the contract).  Width 18 covers everything the desk
scale tests exercise.

Shapes matter for speed here.  The power-of-two test is inlined as a
divisibility conjunct at every scan site so the evaluator can prune the scan
to the divisors of 2**K, and the bit extraction carries redundant linear
envelope conjuncts so the quotient scan narrows to a single candidate.
"""

from __future__ import annotations

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
    NumVar,
    ONE,
    Term,
    ZERO,
    conj,
    free_num_vars,
    lt,
    num_eq,
    numeral,
)
from .base import (
    DEFAULT_WIDTH,
    PURE,
    SEMANTIC,
    FidelityLevel,
    cached,
    fresh_num,
)

TWO = numeral(2)


class BitsKit:
    """Width-capped pure bit machinery with a fixed set of internal variables.

    The internal variables are fixed (not freshly drawn per call) so that
    structurally equal applications built in different places are the same
    AST and share evaluator memo entries.  Callers must not pass terms that
    mention the variables a method binds; each method asserts this.
    """

    def __init__(self, width: int):
        self.width = width
        self.cap = numeral(1 << width)
        # count-of-powers machinery
        self.q = fresh_num()
        self.z = fresh_num()
        self.w = fresh_num()
        self.r = fresh_num()
        self.iz = fresh_num()
        # bit extraction
        self.u = fresh_num()
        self.w1 = fresh_num()
        self.y1 = fresh_num()
        self.y2 = fresh_num()
        # power-of-index machinery
        self.uv = fresh_num()
        self.cv = fresh_num()
        self.wv = fresh_num()
        # count of powers of two strictly below q
        self.m_formula = Count(
            (NBind(self.z, self.q),), self.pow2_inline(self.z, self.w)
        )

    def pow2_inline(self, zt: Term, wvar: NumVar) -> Formula:
        """zt is a power of two: zt >= 1 and zt divides 2**width.

        Meant to sit as a top-level conjunct in a scan over zt, where the
        divisibility shape prunes the scan to the divisors of 2**width.
        """
        divides = Count((NBind(wvar, Add(self.cap, ONE)),), num_eq(Mul(zt, wvar), self.cap))
        return And(Le(ONE, zt), Le(ONE, divides))

    def _check(self, t: Term, banned) -> None:
        hit = free_num_vars(t) & frozenset(banned)
        assert not hit, f"argument term mentions kit-internal variables {hit}"

    def m_at(self, t: Term) -> Term:
        """Number of powers of two strictly below t (= log2 t for powers)."""
        self._check(t, (self.q, self.r, self.z, self.w))
        return Count(
            (NBind(self.q, Add(t, ONE)), NBind(self.r, self.m_formula)),
            num_eq(self.q, t),
        )

    def len_at(self, t: Term) -> Term:
        """Binary length of t: m_at(t+1), plus 1 when t = 0."""
        self._check(t, (self.q, self.r, self.z, self.w, self.iz))
        zero_case = Count((NBind(self.iz, ONE),), num_eq(t, ZERO))
        return Add(self.m_at(Add(t, ONE)), zero_case)

    def bit_at(self, i: Term, n: Term) -> Formula:
        """Bit i of n: exists u = 2**i and a split n = 2*u*y1 + u + y2, y2 < u.

        The envelope conjuncts (2*u*y1 + u <= n < 2*u*y1 + 2*u) are implied
        by the split but stated up front so the y1 scan pins its single
        candidate from linear bounds.
        """
        banned = (self.u, self.w1, self.y1, self.y2, self.q, self.r, self.z, self.w)
        self._check(i, banned)
        self._check(n, banned)
        u, w1, y1, y2 = self.u, self.w1, self.y1, self.y2
        core = Mul(Mul(TWO, u), y1)
        split = Le(
            ONE,
            Count((NBind(y2, u),), num_eq(n, Add(Add(core, u), y2))),
        )
        inner = Count(
            (NBind(y1, Add(n, ONE)),),
            conj(
                Le(Add(core, u), n),
                lt(n, Add(core, Add(u, u))),
                split,
            ),
        )
        outer = Count(
            (NBind(u, Add(self.cap, ONE)),),
            conj(
                self.pow2_inline(u, w1),
                num_eq(i, self.m_at(u)),
                Le(ONE, inner),
            ),
        )
        return Le(ONE, outer)

    def exp2_at(self, t: Term) -> Term:
        """2**t, as 1 plus the sum of all smaller powers of two."""
        banned = (self.uv, self.cv, self.wv, self.q, self.r, self.z, self.w)
        self._check(t, banned)
        uv, cv, wv = self.uv, self.cv, self.wv
        body = conj(self.pow2_inline(uv, wv), lt(self.m_at(uv), t))
        return Add(
            ONE,
            Count((NBind(uv, Add(self.cap, ONE)), NBind(cv, uv)), body),
        )


def bits_kit(width: int = DEFAULT_WIDTH) -> BitsKit:
    return cached("bits-kit", (width,), lambda: BitsKit(width))


# --- level-dispatching helpers for other builders -------------------------------


def bit_at(
    i: Term, n: Term, level: FidelityLevel = PURE, width: int = DEFAULT_WIDTH
) -> Formula:
    """Formula: bit i of n is set."""
    if level is SEMANTIC:
        return Builtin("BIT", (i, n))
    return bits_kit(width).bit_at(i, n)


def len_at(
    t: Term, level: FidelityLevel = PURE, width: int = DEFAULT_WIDTH
) -> Term:
    """Term: binary length of t (1 for t = 0)."""
    if level is SEMANTIC:
        return FunApp("arith.bitlen", (t,))
    return bits_kit(width).len_at(t)


def exp2_at(
    t: Term, level: FidelityLevel = PURE, width: int = DEFAULT_WIDTH
) -> Term:
    """Term: 2**t."""
    if level is SEMANTIC:
        return FunApp("arith.pow2", (t,))
    return bits_kit(width).exp2_at(t)


# --- public builders -------------------------------------------------------------


def mk_pow2(
    level: FidelityLevel = PURE, width: int = DEFAULT_WIDTH
) -> Formula:
    """Formula with free y1: y1 is a power of two (exact below 2**width)."""

    def make():
        y = NumVar(1)
        if level is SEMANTIC:
            bound = Add(FunApp("arith.bitlen", (y,)), ONE)
            iv = fresh_num()
            return Le(
                ONE,
                Count(
                    (NBind(iv, bound),),
                    num_eq(y, FunApp("arith.pow2", (iv,))),
                ),
            )
        kit = bits_kit(width)
        return kit.pow2_inline(y, kit.w)

    return cached("pow2", (level, width), make)


def mk_bit(
    level: FidelityLevel = PURE, width: int = DEFAULT_WIDTH
) -> Formula:
    """Formula with free y1 (bit index) and y2 (number): bit y1 of y2 is set."""

    def make():
        return bit_at(NumVar(1), NumVar(2), level, width)

    return cached("bit", (level, width), make)


def mk_len(level: FidelityLevel = PURE, width: int = DEFAULT_WIDTH) -> Term:
    """Term with free y1: binary length of y1 (1 for 0)."""

    def make():
        return len_at(NumVar(1), level, width)

    return cached("len", (level, width), make)

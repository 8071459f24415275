"""Sequence codes: packing tuples of numbers into a single number.

A tuple (i_0, ..., i_{k-1}) is written as the string
``#bin(i_0)#bin(i_1)...#bin(i_{k-1})`` (binary blocks, most significant digit
first, bin(0) = "0"), and the string becomes a number two bits per character:
0 -> 01, 1 -> 10, # -> 11, concatenated in string order as one binary
numeral.  Reading the number's bit pairs from the low end upward therefore
yields the string reversed: position p = 0 is the last character, each block
appears least significant digit first, blocks are terminated above by their
separator, and block j counted from the top holds entry j.

``encode_sequence`` / ``decode_sequence`` are the reference implementations;
the formula kit recognizes valid codes and extracts lengths and entries
inside the logic.

Validity conditions on the pair string (p from the low end, hl pairs total):
even bit length; no 00 pair; position 0 is not a separator; the top pair is
a separator; no two adjacent separators (blocks are nonempty); and a 0 digit
directly below a separator is a whole block (binary blocks have no leading
zeros).  The number 0 encodes the empty tuple.
"""

from __future__ import annotations

from ..syntax import (
    Add,
    And,
    Count,
    Formula,
    Le,
    Mul,
    NBind,
    Not,
    NumVar,
    ONE,
    Term,
    ZERO,
    conj,
    disj,
    exists_bounded,
    forall_bounded,
    free_num_vars,
    implies,
    lt,
    num_eq,
    truncated_sub,
)
from .base import DEFAULT_WIDTH, PURE, FidelityLevel, cached, fresh_num
from .bits import TWO, bit_at, exp2_at, len_at


# --- reference implementations ---------------------------------------------------


_PAIR_CHAR = {1: "0", 2: "1", 3: "#"}
_CHAR_BITS = {"0": "01", "1": "10", "#": "11"}


def encode_sequence(entries) -> int:
    """The number coding the given tuple of nonnegative integers."""
    entries = tuple(entries)
    if not entries:
        return 0
    s = "".join("#" + format(e, "b") for e in entries)
    return int("".join(_CHAR_BITS[c] for c in s), 2)


def decode_sequence(n: int) -> tuple[int, ...]:
    """Inverse of encode_sequence; raises ValueError on invalid codes."""
    if n < 0:
        raise ValueError("sequence codes are nonnegative")
    if n == 0:
        return ()
    chars = []
    m = n
    while m:
        pair = m & 3
        if pair == 0:
            raise ValueError("00 pair in sequence code")
        chars.append(_PAIR_CHAR[pair])
        m >>= 2
    if chars[-1] != "#":
        raise ValueError("sequence code must top out at a separator")
    if chars[0] == "#":
        raise ValueError("sequence code must not start with a separator")
    blocks = "".join(chars).split("#")[:-1]
    entries = []
    for b in blocks:
        if b == "":
            raise ValueError("empty block in sequence code")
        if len(b) > 1 and b[-1] == "0":
            raise ValueError("leading zero in sequence code block")
        entries.append(int(b[::-1], 2))
    return tuple(reversed(entries))


# --- the formula kit --------------------------------------------------------------


class SeqKit:
    """Sequence-code formulas at one fidelity level and width.

    Methods take the code (and position) as terms, so other builders can
    apply them at their own scan variables.  Internal variables are fixed
    per kit for structural sharing; arguments must not mention them.
    """

    def __init__(self, level: FidelityLevel, width: int):
        self.level = level
        self.width = width
        self.p1 = fresh_num()  # pair-count scan
        self.hv = fresh_num()  # even-length witness
        self.pb = fresh_num()  # no-00 scan
        self.pef = fresh_num()  # separator-shape scans
        self.sv_d = fresh_num()  # top position hl - 1
        self.qv = fresh_num()  # separators-above scan
        self.rv = fresh_num()  # rank scan
        self.pe = fresh_num()  # entry digit scan
        self.ce = fresh_num()  # entry weight multiplier
        self.ps = fresh_num()  # separator count scan
        self.i_seq = fresh_num()
        self.i_val = fresh_num()
        self.i_inv = fresh_num()
        self.i_le = fresh_num()
        self.sv1 = fresh_num()
        self.sv2 = fresh_num()
        self.sv3 = fresh_num()
        self.reserved = frozenset(
            v
            for v in vars(self).values()
            if isinstance(v, NumVar)
        )

    def _check(self, *terms) -> None:
        for t in terms:
            hit = free_num_vars(t) & self.reserved
            assert not hit, f"argument term mentions kit-internal variables {hit}"

    def _bit(self, i: Term, n: Term) -> Formula:
        return bit_at(i, n, self.level, self.width)

    def _ind(self, var: NumVar, f: Formula) -> Term:
        return Count((NBind(var, ONE),), f)

    # pair tests at position t (terms built from the caller's n)

    def sep_at(self, t: Term, n: Term) -> Formula:
        lo = Mul(TWO, t)
        return And(self._bit(lo, n), self._bit(Add(lo, ONE), n))

    def one_at(self, t: Term, n: Term) -> Formula:
        lo = Mul(TWO, t)
        return And(self._bit(Add(lo, ONE), n), Not(self._bit(lo, n)))

    def zero_at(self, t: Term, n: Term) -> Formula:
        lo = Mul(TWO, t)
        return And(self._bit(lo, n), Not(self._bit(Add(lo, ONE), n)))

    def hl_at(self, n: Term) -> Term:
        """Number of bit pairs: positions p with 2p+1 < len(n)."""
        ln = len_at(n, self.level, self.width)
        return Count(
            (NBind(self.p1, ln),),
            lt(Add(Mul(TWO, self.p1), ONE), ln),
        )

    def seq_at(self, n: Term) -> Formula:
        """n codes a tuple (0 codes the empty one)."""
        self._check(n)
        hl = self.hl_at(n)
        ln = len_at(n, self.level, self.width)
        even_len = exists_bounded(
            self.hv, Add(ln, ONE), num_eq(ln, Add(self.hv, self.hv))
        )
        pb = self.pb
        no_double_zero = forall_bounded(
            pb,
            hl,
            disj(
                self._bit(Mul(TWO, pb), n),
                self._bit(Add(Mul(TWO, pb), ONE), n),
            ),
        )
        bottom_not_sep = Not(self.sep_at(ZERO, n))
        top_is_sep = self.sep_at(truncated_sub(hl, ONE, self.sv_d), n)
        p = self.pef
        no_adjacent_seps = forall_bounded(
            p,
            hl,
            implies(
                conj(lt(Add(p, ONE), hl), self.sep_at(Add(p, ONE), n)),
                Not(self.sep_at(p, n)),
            ),
        )
        no_leading_zero = forall_bounded(
            p,
            hl,
            implies(
                conj(
                    lt(Add(p, TWO), hl),
                    self.sep_at(Add(p, TWO), n),
                    self.zero_at(Add(p, ONE), n),
                ),
                self.sep_at(p, n),
            ),
        )
        return disj(
            num_eq(n, ZERO),
            conj(
                even_len,
                no_double_zero,
                bottom_not_sep,
                top_is_sep,
                no_adjacent_seps,
                no_leading_zero,
            ),
        )

    def seqlen_at(self, n: Term) -> Term:
        """Number of entries when n is a valid code, 0 otherwise."""
        self._check(n)
        nsep = Count((NBind(self.ps, self.hl_at(n)),), self.sep_at(self.ps, n))
        return Mul(self._ind(self.i_seq, self.seq_at(n)), nsep)

    def seps_above(self, t: Term, n: Term) -> Term:
        return Count(
            (NBind(self.qv, self.hl_at(n)),),
            And(self.sep_at(self.qv, n), lt(t, self.qv)),
        )

    def rank_at(self, t: Term, n: Term) -> Term:
        """Digit positions below t in t's block (= t's weight exponent)."""
        rv = self.rv
        return Count(
            (NBind(rv, t),),
            And(
                Not(self.sep_at(rv, n)),
                num_eq(self.seps_above(rv, n), self.seps_above(t, n)),
            ),
        )

    def entry_core(self, j: Term, n: Term) -> Term:
        """Entry j of a valid code: sum of 2**rank over its one-digits."""
        pe, ce = self.pe, self.ce
        in_block_j = And(
            Not(self.sep_at(pe, n)),
            num_eq(self.seps_above(pe, n), Add(j, ONE)),
        )
        return Count(
            (
                NBind(pe, self.hl_at(n)),
                NBind(ce, exp2_at(self.rank_at(pe, n), self.level, self.width)),
            ),
            conj(in_block_j, self.one_at(pe, n)),
        )

    def entry_at(self, j: Term, n: Term) -> Term:
        """Entry j of the code n; yields n itself when n is not a valid code
        or j is out of range."""
        self._check(j, n)
        valid = And(self.seq_at(n), lt(j, self.seqlen_at(n)))
        return Add(
            Mul(self._ind(self.i_val, valid), self.entry_core(j, n)),
            Mul(self._ind(self.i_inv, Not(valid)), n),
        )

    def flog_at(self, y: Term) -> Term:
        """floor(log2 y) for y >= 1 (0 for y in {0, 1})."""
        self._check(y)
        return truncated_sub(len_at(y, self.level, self.width), ONE, self.sv1)

    def clog_at(self, y: Term) -> Term:
        """ceil(log2 y) for y >= 1 (0 for y in {0, 1})."""
        self._check(y)
        below = truncated_sub(y, ONE, self.sv2)
        small = self._ind(self.i_le, Le(y, ONE))
        return truncated_sub(len_at(below, self.level, self.width), small, self.sv3)


def seq_kit(level: FidelityLevel = PURE, width: int = DEFAULT_WIDTH) -> SeqKit:
    return cached("seq-kit", (level, width), lambda: SeqKit(level, width))


def mk_seq_ops(level: FidelityLevel = PURE, width: int = DEFAULT_WIDTH) -> dict:
    """The sequence-code operator family over caller variables.

    seq, seqlen, flog, clog read the number from y1; entry reads the
    position from y1 and the code from y2.
    """

    def make():
        kit = seq_kit(level, width)
        y1, y2 = NumVar(1), NumVar(2)
        return {
            "seq": kit.seq_at(y1),
            "seqlen": kit.seqlen_at(y1),
            "entry": kit.entry_at(y1, y2),
            "flog": kit.flog_at(y1),
            "clog": kit.clog_at(y1),
        }

    return cached("seq-ops", (level, width), make)

"""Builders that emit genuine logic ASTs for arithmetic.

Every public builder returns real syntax-tree objects that the evaluator can
run; nothing here is interpreted specially.  Builders come in two fidelity
levels: PURE output is fully spelled out in the core logic, SEMANTIC output
may lean on the registered arithmetic oracle symbols (``arith.*`` functions
and the BIT builtin).  Outputs are cached, immutable, and safe to share.
"""

from .base import (
    PURE,
    SEMANTIC,
    DEFAULT_WIDTH,
    FidelityLevel,
    hold_at,
    indicator,
    substitute,
    value_at,
)
from .bits import bit_at, exp2_at, len_at, mk_bit, mk_len, mk_pow2
from .seqcode import decode_sequence, encode_sequence, mk_seq_ops, seq_kit
from .intarith import cascade_widths, mk_int_arith, mk_mul_div, mk_s_itadd

__all__ = [
    "cascade_widths",
    "decode_sequence",
    "encode_sequence",
    "mk_int_arith",
    "mk_mul_div",
    "mk_s_itadd",
    "mk_seq_ops",
    "seq_kit",
    "PURE",
    "SEMANTIC",
    "DEFAULT_WIDTH",
    "FidelityLevel",
    "bit_at",
    "exp2_at",
    "hold_at",
    "indicator",
    "len_at",
    "mk_bit",
    "mk_len",
    "mk_pow2",
    "substitute",
    "value_at",
]

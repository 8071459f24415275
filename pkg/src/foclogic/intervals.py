"""Outward-rounded interval arithmetic over exact rationals.

Used only by test oracles and by the certified activation approximations:
the core data model never stores an irrational value.  Transcendentals are
computed with the stdlib ``decimal`` module, whose exp/ln are correctly
rounded, under explicit ROUND_FLOOR / ROUND_CEILING contexts so every bound
is sound.  Working precision is 60 digits (just under 200 bits), above the
128-bit floor the oracles assume.
"""

from __future__ import annotations

import decimal
from decimal import Decimal
from fractions import Fraction

_PREC = 60

_FLOOR = decimal.Context(prec=_PREC, rounding=decimal.ROUND_FLOOR)
_CEIL = decimal.Context(prec=_PREC, rounding=decimal.ROUND_CEILING)


def _dec_to_fraction(d: Decimal) -> Fraction:
    sign, digits, exp = d.as_tuple()
    n = int("".join(map(str, digits)))
    if sign:
        n = -n
    if exp >= 0:
        return Fraction(n * 10**exp)
    return Fraction(n, 10**-exp)


class Interval:
    """Closed interval [lo, hi] with Fraction endpoints, lo <= hi."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi=None):
        if hi is None:
            hi = lo
        lo = Fraction(lo)
        hi = Fraction(hi)
        if lo > hi:
            raise ValueError("interval endpoints out of order")
        self.lo = lo
        self.hi = hi

    def __repr__(self):
        return f"Interval({self.lo}, {self.hi})"

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def __add__(self, other):
        other = _as_interval(other)
        return Interval(self.lo + other.lo, self.hi + other.hi)

    def __sub__(self, other):
        other = _as_interval(other)
        return Interval(self.lo - other.hi, self.hi - other.lo)

    def __mul__(self, other):
        other = _as_interval(other)
        products = [
            self.lo * other.lo,
            self.lo * other.hi,
            self.hi * other.lo,
            self.hi * other.hi,
        ]
        return Interval(min(products), max(products))

    __radd__ = __add__
    __rmul__ = __mul__

    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def reciprocal(self):
        if self.lo <= 0 <= self.hi:
            raise ZeroDivisionError("interval contains zero")
        return Interval(1 / self.hi, 1 / self.lo)

    def contains(self, x) -> bool:
        x = Fraction(x)
        return self.lo <= x <= self.hi

    def abs_error_to(self, q) -> Fraction:
        """Largest possible |q - v| over v in the interval."""
        q = Fraction(q)
        return max(abs(q - self.lo), abs(q - self.hi))


def _as_interval(x) -> Interval:
    if isinstance(x, Interval):
        return x
    return Interval(x)


def _exp_bounds(x: Fraction) -> tuple[Fraction, Fraction]:
    lo = _FLOOR.divide(Decimal(x.numerator), Decimal(x.denominator))
    hi = _CEIL.divide(Decimal(x.numerator), Decimal(x.denominator))
    out_lo = _FLOOR.exp(lo)
    out_hi = _CEIL.exp(hi)
    return _dec_to_fraction(out_lo), _dec_to_fraction(out_hi)


def _ln_bounds(x: Fraction) -> tuple[Fraction, Fraction]:
    if x <= 0:
        raise ValueError("ln of non-positive rational")
    lo = _FLOOR.divide(Decimal(x.numerator), Decimal(x.denominator))
    hi = _CEIL.divide(Decimal(x.numerator), Decimal(x.denominator))
    out_lo = _FLOOR.ln(lo)
    out_hi = _CEIL.ln(hi)
    return _dec_to_fraction(out_lo), _dec_to_fraction(out_hi)


def iv_exp(x) -> Interval:
    x = _as_interval(x)
    lo, _ = _exp_bounds(x.lo)
    _, hi = _exp_bounds(x.hi)
    return Interval(lo, hi)


def iv_ln(x) -> Interval:
    x = _as_interval(x)
    lo, _ = _ln_bounds(x.lo)
    _, hi = _ln_bounds(x.hi)
    return Interval(lo, hi)


def iv_sigmoid(x) -> Interval:
    # 1 / (1 + e^{-x}), increasing
    x = _as_interval(x)
    e_lo = iv_exp(Interval(-x.hi, -x.hi))
    e_hi = iv_exp(Interval(-x.lo, -x.lo))
    return Interval(1 / (1 + e_lo.hi), 1 / (1 + e_hi.lo))


def iv_tanh(x) -> Interval:
    # 1 - 2/(e^{2x} + 1), increasing
    x = _as_interval(x)
    e_lo = iv_exp(Interval(2 * x.lo, 2 * x.lo))
    e_hi = iv_exp(Interval(2 * x.hi, 2 * x.hi))
    return Interval(1 - 2 / (e_lo.lo + 1), 1 - 2 / (e_hi.hi + 1))


def iv_softplus(x) -> Interval:
    # ln(1 + e^x), increasing
    x = _as_interval(x)
    e_lo = iv_exp(Interval(x.lo, x.lo))
    e_hi = iv_exp(Interval(x.hi, x.hi))
    return Interval(iv_ln(Interval(1 + e_lo.lo)).lo, iv_ln(Interval(1 + e_hi.hi)).hi)


def iv_elu(x, alpha) -> Interval:
    # x for x >= 0, alpha*(e^x - 1) for x < 0; increasing for alpha > 0
    x = _as_interval(x)
    alpha = Fraction(alpha)

    def one_sided(v: Fraction, upper: bool) -> Fraction:
        if v >= 0:
            return v
        lo, hi = _exp_bounds(v)
        return alpha * ((hi if upper else lo) - 1)

    return Interval(one_sided(x.lo, False), one_sided(x.hi, True))


_UNARY = {
    "sigmoid": iv_sigmoid,
    "tanh": iv_tanh,
    "softplus": iv_softplus,
}


def iv_activation(name: str, x, alpha=None) -> Interval:
    if name == "elu":
        if alpha is None:
            raise ValueError("elu needs alpha")
        return iv_elu(x, alpha)
    try:
        fn = _UNARY[name]
    except KeyError:
        raise ValueError(f"unknown transcendental activation {name!r}") from None
    return fn(x)

"""Signed dyadic rationals, r-tuples, and continuous rational piecewise-linear
functions.

A dyadic rational is sign * mantissa * 2^(-denom_exp), kept canonical:
zero is (+1, 0, 0), and a nonzero value with denom_exp > 0 has odd mantissa.
All arithmetic here is exact; floats never enter the data model.

The piecewise-linear type carries strictly increasing dyadic thresholds
t_1 < ... < t_n and n+1 (slope, constant) pairs.  Piece i applies on
[t_i, t_{i+1}) -- left-closed -- with piece 0 below t_1 and piece n at and
above t_n.  A representation is minimal when adjacent pieces differ.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from foclogic.intervals import Interval, iv_activation


def bsize(n: int) -> int:
    """Length of the binary representation; 1 for zero."""
    if n < 0:
        raise ValueError("bsize of a negative integer")
    return 1 if n == 0 else n.bit_length()


@dataclass(frozen=True)
class DyadicRational:
    sign: int
    mantissa: int
    denom_exp: int

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        if self.mantissa < 0 or self.denom_exp < 0:
            raise ValueError("mantissa and denom_exp must be nonnegative")
        if self.mantissa == 0:
            if self.sign != 1 or self.denom_exp != 0:
                raise ValueError("zero must be (+1, 0, 0)")
        elif self.denom_exp > 0 and self.mantissa % 2 == 0:
            raise ValueError("nonzero mantissa with denom_exp > 0 must be odd")

    # --- constructors ---------------------------------------------------

    @staticmethod
    def from_signed(numerator: int, denom_exp: int = 0) -> "DyadicRational":
        """numerator / 2^denom_exp, any signs, normalised."""
        if numerator == 0:
            return DY_ZERO
        sign = 1 if numerator > 0 else -1
        m = abs(numerator)
        if denom_exp < 0:
            m <<= -denom_exp
            denom_exp = 0
        while denom_exp > 0 and m % 2 == 0:
            m //= 2
            denom_exp -= 1
        return DyadicRational(sign, m, denom_exp)

    @staticmethod
    def from_int(n: int) -> "DyadicRational":
        return DyadicRational.from_signed(n, 0)

    @staticmethod
    def from_fraction(q: Fraction) -> "DyadicRational":
        q = Fraction(q)
        den = q.denominator
        e = 0
        while den % 2 == 0:
            den //= 2
            e += 1
        if den != 1:
            raise ValueError(f"{q} is not a dyadic rational")
        return DyadicRational.from_signed(q.numerator, e)

    @staticmethod
    def parse(text: str) -> "DyadicRational":
        m = re.fullmatch(r"\s*(-?)(\d+)(?:/2\^(\d+))?\s*", text)
        if not m:
            raise ValueError(f"bad dyadic literal {text!r}")
        num = int(m.group(2))
        if m.group(1):
            num = -num
        exp = int(m.group(3)) if m.group(3) else 0
        return DyadicRational.from_signed(num, exp)

    # --- views ----------------------------------------------------------

    @property
    def numerator(self) -> int:
        """Signed numerator over denominator 2^denom_exp."""
        return self.sign * self.mantissa

    def to_fraction(self) -> Fraction:
        return Fraction(self.sign * self.mantissa, 1 << self.denom_exp)

    @property
    def bitsize(self) -> int:
        return bsize(self.mantissa) + self.denom_exp + 1

    def is_zero(self) -> bool:
        return self.mantissa == 0

    def is_integer(self) -> bool:
        return self.denom_exp == 0

    def __str__(self) -> str:
        s = "-" if self.sign < 0 else ""
        if self.denom_exp == 0:
            return f"{s}{self.mantissa}"
        return f"{s}{self.mantissa}/2^{self.denom_exp}"

    def __repr__(self) -> str:
        return f"DyadicRational({self})"

    def __float__(self) -> float:
        return self.sign * self.mantissa / (1 << self.denom_exp)

    # --- arithmetic -----------------------------------------------------

    def _aligned(self, other: "DyadicRational") -> tuple[int, int, int]:
        e = max(self.denom_exp, other.denom_exp)
        a = self.numerator << (e - self.denom_exp)
        b = other.numerator << (e - other.denom_exp)
        return a, b, e

    def __add__(self, other: "DyadicRational") -> "DyadicRational":
        a, b, e = self._aligned(other)
        return DyadicRational.from_signed(a + b, e)

    def __sub__(self, other: "DyadicRational") -> "DyadicRational":
        a, b, e = self._aligned(other)
        return DyadicRational.from_signed(a - b, e)

    def __mul__(self, other: "DyadicRational") -> "DyadicRational":
        return DyadicRational.from_signed(
            self.numerator * other.numerator, self.denom_exp + other.denom_exp
        )

    def __neg__(self) -> "DyadicRational":
        return DyadicRational.from_signed(-self.numerator, self.denom_exp)

    def __abs__(self) -> "DyadicRational":
        return DyadicRational.from_signed(self.mantissa, self.denom_exp)

    def cmp(self, other: "DyadicRational") -> int:
        a, b, _ = self._aligned(other)
        return (a > b) - (a < b)

    def __lt__(self, other):
        return self.cmp(other) < 0

    def __le__(self, other):
        return self.cmp(other) <= 0

    def __gt__(self, other):
        return self.cmp(other) > 0

    def __ge__(self, other):
        return self.cmp(other) >= 0

    def shift(self, k: int) -> "DyadicRational":
        """Multiply by 2^k (k may be negative)."""
        return DyadicRational.from_signed(self.numerator, self.denom_exp - k)


DY_ZERO = DyadicRational(1, 0, 0)
DY_ONE = DyadicRational(1, 1, 0)


def dy(x) -> DyadicRational:
    """Coerce ints, Fractions, strings, and dyadics to DyadicRational."""
    if isinstance(x, DyadicRational):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a dyadic value")
    if isinstance(x, int):
        return DyadicRational.from_int(x)
    if isinstance(x, Fraction):
        return DyadicRational.from_fraction(x)
    if isinstance(x, str):
        return DyadicRational.parse(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to DyadicRational")


def dy_add(a, b):
    return dy(a) + dy(b)


def dy_sub(a, b):
    return dy(a) - dy(b)


def dy_mul(a, b):
    return dy(a) * dy(b)


def dy_neg(a):
    return -dy(a)


def dy_abs(a):
    return abs(dy(a))


def dy_cmp(a, b) -> int:
    return dy(a).cmp(dy(b))


def dy_max(a, b):
    a, b = dy(a), dy(b)
    return a if a >= b else b


def dy_min(a, b):
    a, b = dy(a), dy(b)
    return a if a <= b else b


def round_fraction_to_dyadic(q: Fraction, grid_exp: int) -> DyadicRational:
    """Nearest multiple of 2^-grid_exp (ties away from zero, deterministic)."""
    scaled = q * (1 << grid_exp)
    n = scaled.numerator
    d = scaled.denominator
    quot, rem = divmod(abs(n), d)
    if 2 * rem >= d:
        quot += 1
    if n < 0:
        quot = -quot
    return DyadicRational.from_signed(quot, grid_exp)


# --- r-tuples ---------------------------------------------------------------


@dataclass(frozen=True)
class RTuple:
    """Bit-set representation (r, I, s, t) of a dyadic rational.

    Value: (-1)^r * 2^(-s) * sum of 2^i over i in I with i < t.  The tuple is
    canonical when every i in I is below t, s = 0 or 0 in I, and an empty I
    forces r = s = t = 0.  Non-canonical tuples are representable on purpose:
    formula-level arithmetic produces them.
    """

    r: int
    I: tuple[int, ...]
    s: int
    t: int

    def __post_init__(self):
        if self.r not in (0, 1):
            raise ValueError("r must be 0 or 1")
        if self.s < 0 or self.t < 0:
            raise ValueError("s and t must be nonnegative")
        if any(i < 0 for i in self.I):
            raise ValueError("bit indices must be nonnegative")
        if tuple(sorted(set(self.I))) != self.I:
            raise ValueError("I must be a strictly sorted tuple")

    def is_canonical(self) -> bool:
        if not self.I:
            return self.r == 0 and self.s == 0 and self.t == 0
        if any(i >= self.t for i in self.I):
            return False
        return self.s == 0 or 0 in self.I


def rtuple_value(rt: RTuple) -> DyadicRational:
    mag = sum(1 << i for i in rt.I if i < rt.t)
    num = -mag if rt.r else mag
    return DyadicRational.from_signed(num, rt.s)


def canonical_rtuple(q) -> RTuple:
    q = dy(q)
    if q.is_zero():
        return RTuple(0, (), 0, 0)
    bits = tuple(i for i in range(q.mantissa.bit_length()) if (q.mantissa >> i) & 1)
    return RTuple(0 if q.sign > 0 else 1, bits, q.denom_exp, q.mantissa.bit_length())


# --- piecewise-linear functions ---------------------------------------------


@dataclass(frozen=True)
class PiecewiseLinear:
    thresholds: tuple[DyadicRational, ...]
    slopes: tuple[DyadicRational, ...]
    constants: tuple[DyadicRational, ...]

    def __post_init__(self):
        n = len(self.thresholds)
        if len(self.slopes) != n + 1 or len(self.constants) != n + 1:
            raise ValueError("need one more piece than thresholds")
        for a, b in zip(self.thresholds, self.thresholds[1:]):
            if not a < b:
                raise ValueError("thresholds must be strictly increasing")

    @staticmethod
    def make(thresholds, slopes, constants) -> "PiecewiseLinear":
        return PiecewiseLinear(
            tuple(dy(t) for t in thresholds),
            tuple(dy(a) for a in slopes),
            tuple(dy(b) for b in constants),
        )

    @staticmethod
    def constant(value) -> "PiecewiseLinear":
        return PiecewiseLinear.make((), (0,), (value,))

    @staticmethod
    def identity() -> "PiecewiseLinear":
        return PiecewiseLinear.make((), (1,), (0,))

    @staticmethod
    def relu() -> "PiecewiseLinear":
        return PiecewiseLinear.make((0,), (0, 1), (0, 0))

    @staticmethod
    def lsig() -> "PiecewiseLinear":
        """Clamp to [0, 1]: 0 below 0, identity on [0, 1), 1 at and above 1."""
        return PiecewiseLinear.make((0, 1), (0, 1, 0), (0, 0, 1))

    def piece_at(self, x: DyadicRational) -> int:
        lo, hi = 0, len(self.thresholds)
        while lo < hi:
            mid = (lo + hi) // 2
            if self.thresholds[mid] <= x:
                lo = mid + 1
            else:
                hi = mid
        return lo

    def apply(self, x) -> DyadicRational:
        x = dy(x)
        i = self.piece_at(x)
        return self.slopes[i] * x + self.constants[i]

    def apply_fraction(self, x: Fraction) -> Fraction:
        i = 0
        while i < len(self.thresholds) and self.thresholds[i].to_fraction() <= x:
            i += 1
        return self.slopes[i].to_fraction() * x + self.constants[i].to_fraction()

    def apply_interval(self, x: Interval) -> Interval:
        """Sound range of the function over an interval (uses continuity not
        being assumed: evaluates endpoints of each overlapped piece)."""
        values = []
        ts = [t.to_fraction() for t in self.thresholds]
        points = [x.lo, x.hi] + [t for t in ts if x.lo <= t <= x.hi]
        for p in points:
            values.append(self.apply_fraction(p))
            # left limit just below an interior threshold
        for i, t in enumerate(ts):
            if x.lo < t <= x.hi:
                a = self.slopes[i].to_fraction()
                b = self.constants[i].to_fraction()
                values.append(a * t + b)
        return Interval(min(values), max(values))

    def normalize(self) -> "PiecewiseLinear":
        """Minimal representation: merge adjacent identical pieces."""
        ts, sl, co = [], [self.slopes[0]], [self.constants[0]]
        for i, t in enumerate(self.thresholds):
            if self.slopes[i + 1] == sl[-1] and self.constants[i + 1] == co[-1]:
                continue
            ts.append(t)
            sl.append(self.slopes[i + 1])
            co.append(self.constants[i + 1])
        return PiecewiseLinear(tuple(ts), tuple(sl), tuple(co))

    def is_minimal(self) -> bool:
        return self == self.normalize()

    def is_continuous(self) -> bool:
        for i, t in enumerate(self.thresholds):
            left = self.slopes[i] * t + self.constants[i]
            right = self.slopes[i + 1] * t + self.constants[i + 1]
            if left.cmp(right) != 0:
                return False
        return True

    def lipschitz(self) -> DyadicRational:
        result = DY_ZERO
        for a in self.slopes:
            result = dy_max(result, abs(a))
        return result

    @property
    def bitsize(self) -> int:
        total = 0
        for q in (*self.thresholds, *self.slopes, *self.constants):
            total += q.bitsize
        return total

    def scale(self, c) -> "PiecewiseLinear":
        c = dy(c)
        return PiecewiseLinear(
            self.thresholds,
            tuple(c * a for a in self.slopes),
            tuple(c * b for b in self.constants),
        )

    def __neg__(self) -> "PiecewiseLinear":
        return self.scale(DyadicRational.from_int(-1))

    def _merge(self, other: "PiecewiseLinear", op) -> "PiecewiseLinear":
        ts = sorted(set(self.thresholds) | set(other.thresholds), key=lambda q: q.to_fraction())
        slopes = []
        consts = []
        for i in range(len(ts) + 1):
            # representative piece index on each side
            if i == 0:
                ia = ib = 0
                if ts:
                    ia = self.piece_at_left(ts[0])
                    ib = other.piece_at_left(ts[0])
            else:
                ia = self.piece_at(ts[i - 1])
                ib = other.piece_at(ts[i - 1])
            slopes.append(op(self.slopes[ia], other.slopes[ib]))
            consts.append(op(self.constants[ia], other.constants[ib]))
        return PiecewiseLinear(tuple(ts), tuple(slopes), tuple(consts)).normalize()

    def piece_at_left(self, x: DyadicRational) -> int:
        """Piece index governing points strictly below x (x a threshold)."""
        i = self.piece_at(x)
        if i > 0 and self.thresholds[i - 1].cmp(x) == 0:
            return i - 1
        return i

    def __add__(self, other):
        return self._merge(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._merge(other, lambda a, b: a - b)

    def compose_affine(self, alpha, beta) -> "PiecewiseLinear":
        """The function x |-> self(alpha*x + beta).

        Every transformed threshold (t - beta)/alpha must stay dyadic,
        otherwise the result leaves the representable class and a ValueError
        is raised.  alpha = 0 collapses to a constant.
        """
        alpha, beta = dy(alpha), dy(beta)
        if alpha.is_zero():
            return PiecewiseLinear.constant(self.apply(beta))
        new_ts = []
        for t in self.thresholds:
            q = (t.to_fraction() - beta.to_fraction()) / alpha.to_fraction()
            try:
                new_ts.append(DyadicRational.from_fraction(q))
            except ValueError:
                raise ValueError(
                    "affine pre-composition moves a threshold off the dyadic grid"
                ) from None
        pieces = [
            (a * alpha, a * beta + b) for a, b in zip(self.slopes, self.constants)
        ]
        if alpha.sign > 0:
            return PiecewiseLinear(
                tuple(new_ts), tuple(p[0] for p in pieces), tuple(p[1] for p in pieces)
            ).normalize()
        # alpha < 0 reverses orientation; pieces flip and interval-closure
        # sides move, which is only sound here because the function is
        # required to be continuous for pre-composition with a negative scale.
        if not self.is_continuous():
            raise ValueError("negative-scale pre-composition needs a continuous function")
        new_ts = new_ts[::-1]
        pieces = pieces[::-1]
        return PiecewiseLinear(
            tuple(new_ts), tuple(p[0] for p in pieces), tuple(p[1] for p in pieces)
        ).normalize()


def pl_apply(L: PiecewiseLinear, x) -> DyadicRational:
    return L.apply(x)


def pl_combine(op: str, L: PiecewiseLinear, other=None, beta=None) -> PiecewiseLinear:
    """Closed algebra on PL functions: '+', '-', 'scale', 'compose-with-affine'."""
    if op == "+":
        return L + other
    if op == "-":
        return L - other
    if op == "scale":
        return L.scale(other).normalize()
    if op == "compose-with-affine":
        return L.compose_affine(other, beta if beta is not None else 0)
    raise ValueError(f"unknown combination {op!r}")


# --- certified PL approximation of smooth activations -----------------------

_LIPSCHITZ = {
    "sigmoid": Fraction(1, 4),
    "tanh": Fraction(1),
    "softplus": Fraction(1),
}


def _tail_cutoff(name: str, eps: Fraction, alpha: Fraction | None) -> int:
    """Smallest integer c >= 1 with certified tail oscillation <= eps/4."""
    budget = eps / 4
    c = 1
    while c < 10_000:
        if name == "sigmoid":
            ok = iv_activation("sigmoid", Interval(Fraction(-c))).hi <= budget
        elif name == "tanh":
            ok = (1 - iv_activation("tanh", Interval(Fraction(c))).lo) <= budget
        elif name == "softplus":
            ok = iv_activation("softplus", Interval(Fraction(-c))).hi <= budget
        elif name == "elu":
            val = iv_activation("elu", Interval(Fraction(-c)), alpha).hi
            ok = (val + alpha) <= budget  # alpha*(e^-c - 1) + alpha = alpha*e^-c
        else:
            raise ValueError(f"not rpl-approximable: {name!r}")
        if ok:
            return c
        c += 1
    raise RuntimeError("tail cutoff search failed")


def _grid_exp_at_most(target: Fraction) -> int:
    """Smallest j >= 0 with 2^-j <= target."""
    if target <= 0:
        raise ValueError("target must be positive")
    j = 0
    while Fraction(1, 1 << j) > target:
        j += 1
    return j


def rpl_approximate(name: str, eps, alpha=None) -> PiecewiseLinear:
    """Continuous rational PL approximation L of a smooth activation f with
    |L(x) - f(x)| <= eps*|f(x)| + eps for all x, and Lipschitz constant at
    most (1 + eps) times the activation's.

    Supported names: sigmoid, tanh, softplus, elu (elu takes a positive
    dyadic alpha).  The construction places secants over a dyadic grid of
    pitch at most eps/(4*lambda) on [-c, c] and closes the tails with the
    activation's asymptotes.
    """
    eps = dy(eps)
    if not eps.sign > 0 or eps.is_zero():
        raise ValueError("eps must be positive")
    epsf = eps.to_fraction()
    if name == "elu":
        if alpha is None:
            raise ValueError("elu needs alpha")
        alpha = dy(alpha)
        if alpha.sign < 0 or alpha.is_zero():
            raise ValueError("elu alpha must be positive")
        alphaf = alpha.to_fraction()
        lam = max(Fraction(1), alphaf)
    else:
        alphaf = None
        if name not in _LIPSCHITZ:
            raise ValueError(f"not rpl-approximable: {name!r}")
        lam = _LIPSCHITZ[name]

    c = _tail_cutoff(name, epsf, alphaf)
    pitch_exp = _grid_exp_at_most(epsf / (4 * lam))
    h = Fraction(1, 1 << pitch_exp)
    # endpoint rounding fine enough that slopes stay within (1+eps)*lambda
    value_exp = _grid_exp_at_most(epsf * lam * h / 8)

    if name == "elu":
        lo_end, hi_end = Fraction(-c), Fraction(0)
    else:
        lo_end, hi_end = Fraction(-c), Fraction(c)

    xs: list[Fraction] = []
    x = lo_end
    while x < hi_end:
        xs.append(x)
        x += h
    xs.append(hi_end)

    vals: list[DyadicRational] = []
    for x in xs:
        box = iv_activation(name, Interval(x), alphaf)
        q = round_fraction_to_dyadic((box.lo + box.hi) / 2, value_exp)
        if box.abs_error_to(q.to_fraction()) > epsf * lam * h / 4:
            raise RuntimeError("interval oracle too wide for requested precision")
        vals.append(q)

    thresholds: list[DyadicRational] = [DyadicRational.from_fraction(x) for x in xs]
    slopes: list[DyadicRational] = [DY_ZERO]
    consts: list[DyadicRational] = [vals[0]]
    for i in range(len(xs) - 1):
        a = DyadicRational.from_fraction(
            (vals[i + 1].to_fraction() - vals[i].to_fraction()) / h
        )
        b = vals[i] - a * thresholds[i]
        slopes.append(a)
        consts.append(b)

    # closing piece on the right
    if name in ("sigmoid", "tanh"):
        slopes.append(DY_ZERO)
        consts.append(vals[-1])
    elif name == "softplus":
        slopes.append(DY_ONE)
        consts.append(vals[-1] - thresholds[-1])
    else:  # elu: exact identity at and above 0
        slopes.append(DY_ONE)
        consts.append(DY_ZERO)
        if not vals[-1].is_zero():
            # f(0) = 0 exactly; the rounded value is 0 by construction
            raise RuntimeError("elu grid endpoint at 0 must round to 0")

    L = PiecewiseLinear(tuple(thresholds), tuple(slopes), tuple(consts)).normalize()
    cap = (1 + epsf) * lam
    if L.lipschitz().to_fraction() > cap:
        raise RuntimeError("constructed approximation exceeds the Lipschitz cap")
    return L

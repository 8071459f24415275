"""Exact-arithmetic substrate: dyadic rationals, r-tuples, PL functions,
and certified activation approximations."""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from foclogic.dyadic import (
    DY_ONE,
    DY_ZERO,
    DyadicRational,
    PiecewiseLinear,
    RTuple,
    bsize,
    canonical_rtuple,
    dy,
    dy_add,
    dy_cmp,
    dy_max,
    dy_min,
    dy_mul,
    dy_sub,
    pl_apply,
    pl_combine,
    round_fraction_to_dyadic,
    rpl_approximate,
    rtuple_value,
)
from foclogic.intervals import Interval, iv_activation

dyadics = st.builds(
    lambda n, e: DyadicRational.from_signed(n, e),
    st.integers(-2**20, 2**20),
    st.integers(0, 20),
)


class TestBsize:
    def test_frozen_values(self):
        assert bsize(0) == 1
        assert bsize(1) == 1
        assert bsize(2) == 2
        assert bsize(5) == 3
        assert bsize(8) == 4

    def test_matches_ceil_log(self):
        for n in range(1, 1000):
            assert bsize(n) == n.bit_length()


class TestDyadicRational:
    def test_canonical_form(self):
        q = DyadicRational.from_signed(6, 3)  # 6/8 = 3/4
        assert (q.sign, q.mantissa, q.denom_exp) == (1, 3, 2)
        z = DyadicRational.from_signed(0, 7)
        assert (z.sign, z.mantissa, z.denom_exp) == (1, 0, 0)
        with pytest.raises(ValueError):
            DyadicRational(1, 6, 3)  # even mantissa with denominator

    def test_frozen_arithmetic(self):
        # 3/4 + 1/8 = 7/8
        assert dy_add(dy("3/2^2"), dy("1/2^3")) == dy("7/2^3")
        assert dy_sub(dy(1), dy("1/2^1")) == dy("1/2^1")
        assert dy_mul(dy("3/2^1"), dy("5/2^2")) == dy("15/2^3")
        assert dy_cmp(dy("-3"), dy("1/2^4")) == -1
        assert dy_max(dy("-3"), dy("1/2^4")) == dy("1/2^4")
        assert dy_min(dy("-3"), dy("1/2^4")) == dy(-3)

    def test_parse_format_roundtrip(self):
        for text in ["0", "7", "-7", "3/2^2", "-11/2^5"]:
            assert str(DyadicRational.parse(text)) == text

    def test_bitsize(self):
        # bitsize = bsize(mantissa) + denom_exp + 1
        assert dy("3/2^2").bitsize == 2 + 2 + 1
        assert DY_ZERO.bitsize == 1 + 0 + 1

    @given(dyadics, dyadics)
    def test_arithmetic_matches_fractions(self, a, b):
        assert (a + b).to_fraction() == a.to_fraction() + b.to_fraction()
        assert (a - b).to_fraction() == a.to_fraction() - b.to_fraction()
        assert (a * b).to_fraction() == a.to_fraction() * b.to_fraction()
        assert dy_cmp(a, b) == (
            (a.to_fraction() > b.to_fraction()) - (a.to_fraction() < b.to_fraction())
        )

    @given(dyadics)
    def test_canonicality_invariant(self, a):
        if a.mantissa == 0:
            assert a.sign == 1 and a.denom_exp == 0
        elif a.denom_exp > 0:
            assert a.mantissa % 2 == 1

    def test_shift(self):
        assert dy("3/2^2").shift(2) == dy(3)
        assert dy(3).shift(-2) == dy("3/2^2")


class TestRTuple:
    def test_value_of_noncanonical(self):
        # bits above t are dropped by the value map
        rt = RTuple(0, (0, 1, 5), 1, 3)
        assert rtuple_value(rt) == dy("3/2^1")

    def test_canonical_examples(self):
        assert canonical_rtuple(dy("1/2^1")) == RTuple(0, (0,), 1, 1)
        assert canonical_rtuple(dy(-3)) == RTuple(1, (0, 1), 0, 2)
        assert canonical_rtuple(DY_ZERO) == RTuple(0, (), 0, 0)

    @given(dyadics)
    def test_roundtrip(self, q):
        rt = canonical_rtuple(q)
        assert rt.is_canonical()
        assert rtuple_value(rt) == q


class TestPiecewiseLinear:
    def test_relu_lsig_id(self):
        relu = PiecewiseLinear.relu()
        lsig = PiecewiseLinear.lsig()
        ident = PiecewiseLinear.identity()
        for x in [-3, -1, 0, "1/2^1", 1, 2]:
            q = dy(x)
            assert pl_apply(relu, q) == dy_max(DY_ZERO, q)
            assert pl_apply(lsig, q) == dy_min(DY_ONE, dy_max(DY_ZERO, q))
            assert pl_apply(ident, q) == q

    def test_identity_decomposition(self):
        # id(x) = relu(x) - relu(-x), lsig(x) = relu(x) - relu(x - 1)
        relu = PiecewiseLinear.relu()
        reflected = relu.compose_affine(-1, 0)
        assert pl_combine("-", relu, reflected) == PiecewiseLinear.identity()
        shifted = relu.compose_affine(1, -1)
        assert pl_combine("-", relu, shifted) == PiecewiseLinear.lsig()

    def test_piece_convention_left_closed(self):
        L = PiecewiseLinear.make((0,), (0, 1), (5, 0))
        assert L.apply(0) == DY_ZERO  # right piece applies at the threshold
        assert L.apply(dy("-1/2^3")) == dy(5)

    def test_minimality(self):
        L = PiecewiseLinear.make((0, 1), (1, 1, 0), (0, 0, 1))
        M = L.normalize()
        assert M.thresholds == (dy(1),)
        assert not L.is_minimal()
        assert M.is_minimal()

    def test_continuity(self):
        assert PiecewiseLinear.relu().is_continuous()
        step = PiecewiseLinear.make((0,), (0, 0), (0, 1))
        assert not step.is_continuous()

    def test_lipschitz_uses_absolute_slopes(self):
        L = PiecewiseLinear.make((0,), (-3, 1), (0, 0))
        assert L.lipschitz() == dy(3)

    def test_combine_add(self):
        relu = PiecewiseLinear.relu()
        lsig = PiecewiseLinear.lsig()
        s = pl_combine("+", relu, lsig)
        for x in [-2, 0, "1/2^1", 1, 3]:
            assert s.apply(x) == relu.apply(x) + lsig.apply(x)

    def test_scale(self):
        L = pl_combine("scale", PiecewiseLinear.relu(), dy(2))
        assert L.apply(3) == dy(6)
        assert L.apply(-3) == DY_ZERO

    def test_compose_affine_rejects_off_grid(self):
        with pytest.raises(ValueError):
            PiecewiseLinear.relu().compose_affine(3, 1)  # threshold -1/3

    @given(st.integers(-40, 40), st.integers(-8, 8))
    def test_compose_affine_pointwise(self, xi, beta):
        L = PiecewiseLinear.lsig().compose_affine(2, beta)
        x = dy(xi)
        assert L.apply(x) == PiecewiseLinear.lsig().apply(dy(2) * x + dy(beta))


REFERENCE_POINTS = [Fraction(n, 7) for n in range(-70, 71)] + [
    Fraction(n) for n in range(-60, 61, 7)
]


class TestRplApproximate:
    @pytest.mark.parametrize("name", ["sigmoid", "tanh", "softplus"])
    @pytest.mark.parametrize("eps_text", ["1/2^1", "1/2^3"])
    def test_certified_error(self, name, eps_text):
        eps = dy(eps_text)
        L = rpl_approximate(name, eps)
        assert L.is_continuous()
        epsf = eps.to_fraction()
        for x in REFERENCE_POINTS:
            got = L.apply_fraction(x)
            box = iv_activation(name, Interval(x))
            err = max(abs(got - box.lo), abs(got - box.hi))
            mag = min(abs(box.lo), abs(box.hi))
            assert err <= epsf * mag + epsf

    def test_elu(self):
        eps = dy("1/2^2")
        alpha = dy(1)
        L = rpl_approximate("elu", eps, alpha)
        assert L.is_continuous()
        assert L.apply(0) == DY_ZERO
        assert L.apply(5) == dy(5)
        for x in REFERENCE_POINTS:
            got = L.apply_fraction(x)
            box = iv_activation("elu", Interval(x), alpha.to_fraction())
            err = max(abs(got - box.lo), abs(got - box.hi))
            mag = min(abs(box.lo), abs(box.hi))
            assert err <= Fraction(1, 4) * mag + Fraction(1, 4)

    @pytest.mark.parametrize("name,lam", [("sigmoid", Fraction(1, 4)), ("tanh", Fraction(1))])
    def test_lipschitz_cap(self, name, lam):
        eps = dy("1/2^2")
        L = rpl_approximate(name, eps)
        assert L.lipschitz().to_fraction() <= (1 + eps.to_fraction()) * lam

    def test_rejects_unsupported(self):
        with pytest.raises(ValueError):
            rpl_approximate("step", dy("1/2^1"))

    def test_bitsize_grows_polynomially(self):
        sizes = [rpl_approximate("tanh", dy(f"1/2^{k}")).bitsize for k in (1, 2, 3)]
        assert sizes[0] < sizes[1] < sizes[2]
        # doubling precision should not square the size
        assert sizes[2] < sizes[1] * 8


class TestRounding:
    def test_round_to_grid(self):
        assert round_fraction_to_dyadic(Fraction(1, 3), 3) == dy("3/2^3")
        assert round_fraction_to_dyadic(Fraction(-1, 3), 3) == dy("-3/2^3")
        assert round_fraction_to_dyadic(Fraction(5, 16), 2) == dy("1/2^2")
        assert round_fraction_to_dyadic(Fraction(3, 8), 2) == dy("1/2^1")  # tie away from zero


class TestIntervalOracle:
    def test_sigmoid_brackets_half(self):
        box = iv_activation("sigmoid", Interval(Fraction(0)))
        assert box.contains(Fraction(1, 2))
        assert box.width < Fraction(1, 10**40)

    def test_tanh_is_odd(self):
        a = iv_activation("tanh", Interval(Fraction(3, 2)))
        b = iv_activation("tanh", Interval(Fraction(-3, 2)))
        assert a.lo <= -b.hi <= a.hi or abs(a.lo + b.hi) < Fraction(1, 10**38)

    def test_monotone_outward(self):
        lo = iv_activation("softplus", Interval(Fraction(1)))
        hi = iv_activation("softplus", Interval(Fraction(2)))
        assert lo.hi < hi.lo


@settings(max_examples=30)
@given(dyadics, st.integers(0, 10))
def test_rtuple_noncanonical_normalisation(q, extra):
    rt = canonical_rtuple(q)
    padded = RTuple(rt.r, rt.I, rt.s, rt.t + extra)
    assert rtuple_value(padded) == q


def test_random_cross_check_against_fractions():
    rng = random.Random(42)
    for _ in range(300):
        a = DyadicRational.from_signed(rng.randint(-999, 999), rng.randint(0, 9))
        b = DyadicRational.from_signed(rng.randint(-999, 999), rng.randint(0, 9))
        assert (a + b).to_fraction() == a.to_fraction() + b.to_fraction()
        assert (a * b).to_fraction() == a.to_fraction() * b.to_fraction()

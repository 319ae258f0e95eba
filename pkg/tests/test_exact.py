import random
from fractions import Fraction as F

import pytest

from mandelcert.exact import (
    ComplexBox,
    ComplexRational,
    Dyadic,
    DyadicInterval,
    box_abs_sq_bounds,
    box_step,
    constant_oracle,
    dyadic_round,
    format_rational,
    iv_add,
    iv_mul,
    iv_sqr,
    iv_sub,
    oracle_query,
    parse_rational,
    rat_normalize,
    sqrt_bounds,
    sqrt_oracle,
)


def test_rational_canonical_form():
    q = rat_normalize(6, -8)
    assert q == F(-3, 4)
    assert q.denominator == 4 and q.numerator == -3
    with pytest.raises(ZeroDivisionError):
        rat_normalize(1, 0)


def test_rational_text_round_trip():
    for text in ["3/4", "-3/4", "7", "0", "-22/7"]:
        assert format_rational(parse_rational(text)) == text
    assert parse_rational(" 1/2 ") == F(1, 2)
    assert format_rational(F(4, 2)) == "2"  # /1 omitted
    with pytest.raises(ValueError):
        parse_rational("not-a-number")


def test_dyadic_canonicalizes():
    assert Dyadic(4, 0) == Dyadic(1, 2)
    assert Dyadic(12, -2) == Dyadic(3, 0)
    assert Dyadic(0, 99) == Dyadic(0, 0)
    assert Dyadic(-8, 1).man == -1 and Dyadic(-8, 1).exp == 4


def test_dyadic_text_form():
    d = Dyadic(-5, -3)
    assert str(d) == "-5*2^-3"
    assert Dyadic.parse("-5*2^-3") == d
    assert Dyadic.parse(str(Dyadic(0, 0))) == Dyadic(0, 0)
    with pytest.raises(ValueError):
        Dyadic.parse("5")


def test_dyadic_ordering():
    assert Dyadic(1, -1) < Dyadic(3, -2)  # 1/2 < 3/4
    assert Dyadic(-1, 2) < Dyadic(0, 0) < Dyadic(1, -10)
    assert Dyadic(3, 1) <= Dyadic(3, 1)
    assert Dyadic(7, 0) > Dyadic(13, -1)


def test_dyadic_round_directions():
    r = F(1, 3)
    for p in (1, 8, 64):
        lo = dyadic_round(r, p, "down")
        hi = dyadic_round(r, p, "up")
        assert lo.as_fraction() <= r <= hi.as_fraction()
        assert r - lo.as_fraction() <= F(1, 2**p)
        assert hi.as_fraction() - r <= F(1, 2**p)
    # exact when representable
    assert dyadic_round(F(3, 8), 3, "down").as_fraction() == F(3, 8)
    assert dyadic_round(F(3, 8), 3, "up").as_fraction() == F(3, 8)
    assert dyadic_round(F(-1, 3), 4, "down").as_fraction() == F(-6, 16)
    with pytest.raises(ValueError):
        dyadic_round(r, 0, "down")
    with pytest.raises(ValueError):
        dyadic_round(r, 8, "sideways")


def test_interval_invariants():
    with pytest.raises(ValueError):
        DyadicInterval(Dyadic(1, 0), Dyadic(0, 0))
    iv = DyadicInterval.from_fractions(F(-1, 3), F(1, 3), 16)
    assert iv.lo <= iv.hi
    assert iv.contains(F(0)) and iv.contains(F(1, 3))
    assert not iv.contains(F(1, 2))
    assert DyadicInterval.point(F(1, 3), 16).width() <= F(2, 2**16)


def _rand_fraction(rng, scale=4):
    return F(rng.randint(-scale * 64, scale * 64), rng.randint(1, 64))


def test_interval_ops_contain_exact_results():
    rng = random.Random(20260815)
    for _ in range(300):
        a, b = _rand_fraction(rng), _rand_fraction(rng)
        p = rng.choice([8, 16, 64])
        A = DyadicInterval.from_fractions(min(a, a + 1), max(a, a + 1), p)
        B = DyadicInterval.from_fractions(b, b + F(1, 7), p)
        for qa in (a, a + F(1, 2), a + 1):
            for qb in (b, b + F(1, 14), b + F(1, 7)):
                assert iv_add(A, B, p).contains(qa + qb)
                assert iv_sub(A, B, p).contains(qa - qb)
                assert iv_mul(A, B, p).contains(qa * qb)
                assert iv_sqr(A, p).contains(qa * qa)


def test_interval_sqr_nonnegative():
    A = DyadicInterval.from_fractions(F(-2), F(3), 16)
    sq = iv_sqr(A, 16)
    assert sq.lo.as_fraction() == 0
    assert sq.hi.as_fraction() >= 9


def test_interval_precision_monotone():
    # the enclosure at precision 2p sits inside the one at p
    A = DyadicInterval.from_fractions(F(1, 3), F(2, 3), 128)
    B = DyadicInterval.from_fractions(F(-1, 7), F(1, 7), 128)
    for p in (8, 16, 32, 64):
        coarse = iv_mul(A, B, p)
        fine = iv_mul(A, B, 2 * p)
        assert coarse.lo <= fine.lo and fine.hi <= coarse.hi


def test_box_step_is_exact_up_to_one_rounding():
    # dyadic inputs representable at p: the step is exact, width stays 0
    z = ComplexBox.point(ComplexRational(F(1, 2), F(1, 4)), 64)
    c = ComplexBox.point(ComplexRational(F(-1), F(1, 2)), 64)
    out = box_step(z, c, 64)
    want_re = F(1, 2) ** 2 - F(1, 4) ** 2 + F(-1)
    want_im = 2 * F(1, 2) * F(1, 4) + F(1, 2)
    assert out.re.lo.as_fraction() == want_re == out.re.hi.as_fraction()
    assert out.im.lo.as_fraction() == want_im == out.im.hi.as_fraction()


def test_box_step_contains_true_orbit_points():
    rng = random.Random(99)
    p = 64
    for _ in range(50):
        cre, cim = F(rng.randint(-2 * 32, 32), 32), F(rng.randint(-2 * 32, 2 * 32), 32)
        cbox = ComplexBox.point(ComplexRational(cre, cim), p)
        zre = zim = F(0)
        zbox = ComplexBox.point(ComplexRational(F(0), F(0)), p)
        for _ in range(12):
            zre, zim = zre * zre - zim * zim + cre, 2 * zre * zim + cim
            zbox = box_step(zbox, cbox, p)
            assert zbox.contains(ComplexRational(zre, zim))
            msq = box_abs_sq_bounds(zbox, p)
            assert msq.contains(zre * zre + zim * zim)


def test_box_abs_sq_point():
    z = ComplexBox.point(ComplexRational(F(2), F(0)), 32)
    msq = box_abs_sq_bounds(z, 32)
    assert msq.lo.as_fraction() == 4 == msq.hi.as_fraction()


def test_point_box_width_bound():
    c = ComplexRational(F(1, 3), F(-2, 7))
    for p in (8, 64, 256):
        b = ComplexBox.point(c, p)
        assert b.contains(c)
        assert b.re.width() <= F(2, 2**p)
        assert b.im.width() <= F(2, 2**p)


def test_constant_oracle():
    o = constant_oracle(F(-3, 4))
    assert all(oracle_query(o, m) == F(-3, 4) for m in range(10))
    assert o.label == "-3/4"
    with pytest.raises(ValueError):
        oracle_query(o, -1)


def test_sqrt_oracle_accuracy():
    o = sqrt_oracle(F(2))
    for m in (0, 1, 5, 10, 30):
        q = oracle_query(o, m)
        eps = F(1, 2**m)
        # q is within 2**-m of sqrt(2): (q - eps, q + eps) brackets it
        assert q * q <= 2
        assert (q + eps) ** 2 > 2
    with pytest.raises(ValueError):
        sqrt_oracle(F(-1))


def test_sqrt_bounds():
    for s in (F(2), F(3, 7), F(0), F(441, 100)):
        for p in (4, 16, 64):
            lo, hi = sqrt_bounds(s, p)
            assert lo * lo <= s <= hi * hi
            assert hi - lo <= F(2, 2**p)
    assert sqrt_bounds(F(9, 4), 8)[0] <= F(3, 2) <= sqrt_bounds(F(9, 4), 8)[1]

import math
import random
from fractions import Fraction as F

import pytest

from mandelcert import certify as C
from mandelcert import rationals as R
from mandelcert.exact import ComplexRational as CR


def test_cantor_pairing_bijection():
    seen = set()
    for u in range(40):
        for v in range(40):
            m = R.cantor_pair(u, v)
            assert R.cantor_unpair(m) == (u, v)
            seen.add(m)
    assert len(seen) == 1600
    for m in range(500):
        u, v = R.cantor_unpair(m)
        assert R.cantor_pair(u, v) == m
    with pytest.raises(ValueError):
        R.cantor_pair(-1, 0)


def test_decode_goldens():
    assert [R.phi_decode(n) for n in range(6)] == [
        F(-1), F(1), F(0), F(0), F(-1, 2), F(1, 2)
    ]
    with pytest.raises(ValueError):
        R.phi_decode(-1)


def test_decode_total_and_surjective_on_small_rationals():
    values = set()
    for n in range(10**4):
        values.add(R.phi_decode(n))
    want = {F(a, b) for a in range(-3, 4) for b in (1, 2, 3)}
    assert want <= values


def test_encode_round_trip_and_minimality():
    # brute-force the true smallest preimage over a scan and compare
    smallest = {}
    for n in range(60_000):
        q = R.phi_decode(n)
        smallest.setdefault(q, n)
    rng = random.Random(11)
    for _ in range(500):
        q = F(rng.randint(-40, 40), rng.randint(1, 40))
        n = R.phi_encode(q)
        assert R.phi_decode(n) == q
        if q in smallest:
            assert n == smallest[q]
    assert R.phi_encode(F(0)) == 2
    assert R.phi_encode(F(-1)) == 0
    assert R.phi_encode(F(1)) == 1
    assert R.phi_encode(F(-1, 2)) == 4


def test_circle_decider():
    assert R.circle_decide(F(3, 5), F(4, 5))
    assert R.circle_decide(F(1), F(0))
    assert R.circle_decide(F(0), F(-1))
    assert not R.circle_decide(F(1, 2), F(1, 2))
    assert not R.circle_decide(F(3, 5), F(4, 5) + F(1, 10**12))
    rng = random.Random(5)
    for _ in range(100):
        m = rng.randint(2, 60)
        n = rng.randint(1, m - 1)
        x = F(m * m - n * n, m * m + n * n)
        y = F(2 * m * n, m * m + n * n)
        assert R.circle_decide(x, y)
        assert not R.circle_decide(x, y + F(1, 10**9))


def test_even_denominator():
    assert R.even_denominator(F(1, 2)) == 1
    assert R.even_denominator(F(1, 3)) == 0
    assert R.even_denominator(F(7)) == 0
    assert R.even_denominator(F(5, 6)) == 1
    assert R.even_denominator(F(2, 4)) == 1  # reduces to 1/2
    assert R.even_denominator(F(4, 2)) == 0  # reduces to 2


def test_exp_bounds_golden_order_4():
    b = R.exp_bounds(F(1), 4)
    assert b.lower == F(65, 24)
    assert b.upper == F(65, 24) + F(3, math.factorial(5))


def test_exp_bounds_basics():
    assert R.exp_bounds(F(0), 3) == R.ExpBound(F(1), F(1), 3)
    with pytest.raises(ValueError):
        R.exp_bounds(F(1), 0)
    neg = R.exp_bounds(F(-1), 6)
    pos = R.exp_bounds(F(1), 6)
    assert neg.lower == 1 / pos.upper and neg.upper == 1 / pos.lower
    # argument > 1 goes through halving and squaring
    big = R.exp_bounds(F(5), 8)
    assert big.lower < big.upper
    assert big.lower > 0


def test_exp_bounds_monotone_and_consistent():
    for q in (F(1), F(-2), F(7, 3), F(1, 10), F(4)):
        prev = None
        for m in range(1, 14):
            b = R.exp_bounds(q, m)
            assert b.lower <= b.upper
            if prev is not None:
                assert b.lower >= prev.lower
                assert b.upper <= prev.upper
            prev = b
        # sanity against floats once the bracket is tight
        assert float(prev.lower) <= math.exp(q) <= float(prev.upper) or (
            prev.upper - prev.lower < F(1, 10**6)
        )


def test_exp_epigraph_goldens():
    assert R.exp_epigraph_witness(F(1), F(2)) == (False, 2)
    assert R.exp_epigraph_witness(F(1), F(3)) == (True, 3)
    assert R.exp_epigraph_witness(F(0), F(1)) == (True, 0)
    assert R.exp_epigraph_decide(F(0), F(999, 1000)) is False
    assert R.exp_epigraph_decide(F(-1), F(1, 2)) is True  # 1/2 > 1/e
    assert R.exp_epigraph_decide(F(-1), F(1, 3)) is False
    assert R.exp_epigraph_decide(F(2), F(7)) is False  # e^2 = 7.389...
    assert R.exp_epigraph_decide(F(2), F(8)) is True
    assert R.exp_epigraph_decide(F(3), F(-5)) is False  # below the axis


def test_exp_epigraph_against_high_order_brackets():
    rng = random.Random(13)
    for _ in range(50):
        x = F(rng.randint(-16, 16), rng.randint(1, 8))
        b = R.exp_bounds(x, 40) if x != 0 else R.ExpBound(F(1), F(1), 40)
        y = rng.choice(
            [b.lower - F(1, rng.randint(1, 99)), b.upper + F(1, rng.randint(1, 99))]
        )
        want = y >= b.upper  # y is outside the tight bracket, so this is truth
        assert R.exp_epigraph_decide(x, y) is want


def test_membership_reexport_matches_certifier():
    for re, im in [(F(0), F(0)), (F(3), F(0)), (F(-3, 4), F(0))]:
        c = CR(re, im)
        assert R.mandelbrot_rational_semi(c) == C.decide(c)

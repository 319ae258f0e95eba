"""Rationals as machine inputs: an index encoding and total deciders.

A classical machine can take a rational argument as a natural number
through a surjective encoding. Index n splits into a sign bit and a
Cantor pair (u, v); the value is (-1)**sign * (u - 1) / (v + 1), which
hits every rational (many times over). On top of that encoding sit
deciders that are genuinely total on rationals: unit-circle membership,
an even-denominator indicator that no extension to the reals computes,
and the epigraph of exp decided through two-sided rational bounds. The
bounded-orbit set itself only gets the three-valued decision procedure
re-exported from the certifier.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial, isqrt

from . import certify
from .exact import ComplexRational

RationalCode = int  # natural-number index of a rational


def cantor_pair(u: int, v: int) -> int:
    """Bijection N x N -> N: (u+v)(u+v+1)/2 + v."""
    if u < 0 or v < 0:
        raise ValueError("pairing needs nonnegative integers")
    return (u + v) * (u + v + 1) // 2 + v


def cantor_unpair(m: int) -> tuple[int, int]:
    """Inverse of cantor_pair."""
    if m < 0:
        raise ValueError("pairing index must be >= 0")
    w = (isqrt(8 * m + 1) - 1) // 2
    v = m - w * (w + 1) // 2
    return w - v, v


def phi_decode(n: RationalCode) -> Fraction:
    """Total decoding of an index into a rational.

    n = 2*pi(u, v) + s maps to (-1)**s * (u - 1) / (v + 1). Every
    rational has infinitely many indices; zero comes from every u = 1.
    """
    if n < 0:
        raise ValueError("rational code must be >= 0")
    s = n & 1
    u, v = cantor_unpair(n >> 1)
    value = Fraction(u - 1, v + 1)
    return -value if s else value


def phi_encode(q: Fraction) -> RationalCode:
    """Smallest index decoding to q.

    For q = +-a/b in lowest terms the preimages with u >= 1 are
    (u, v) = (k*a + 1, k*b - 1) for k >= 1, minimized at k = 1; when
    a = 1 the u = 0 family ((u-1) = -1 flips the sign bit) adds the
    candidate (0, b - 1). Zero's smallest index is pi(1, 0) doubled.
    """
    q = Fraction(q)
    if q == 0:
        return 2 * cantor_pair(1, 0)
    a, b = abs(q.numerator), q.denominator
    s = 0 if q > 0 else 1
    best = 2 * cantor_pair(a + 1, b - 1) + s
    if a == 1:
        best = min(best, 2 * cantor_pair(0, b - 1) + (1 - s))
    return best


# --- total deciders on exact rational inputs ---------------------------


def circle_decide(x: Fraction, y: Fraction) -> bool:
    """Exact unit-circle membership: x**2 + y**2 == 1."""
    return x * x + y * y == 1


def even_denominator(q: Fraction) -> int:
    """1 when the reduced denominator of q is even, else 0.

    Total on rationals, yet it agrees with no function continuous on the
    reals: every irrational is a limit of rationals of both kinds.
    """
    return 1 if Fraction(q).denominator % 2 == 0 else 0


@dataclass(frozen=True)
class ExpBound:
    """Two-sided rational bracket for exp(q): lower <= exp(q) <= upper."""

    lower: Fraction
    upper: Fraction
    order: int

    def __post_init__(self) -> None:
        if self.lower > self.upper:
            raise ValueError("inverted exp bracket")


def exp_bounds(q: Fraction, m: int) -> ExpBound:
    """Order-m rational bracket for exp(q).

    The argument is halved j times into t in (0, 1]; there the degree-m
    Taylor partial sum S is a lower bound and S + 3*t**(m+1)/(m+1)! an
    upper bound (the tail is dominated by the geometric-free comparison
    (m+1)!/(m+1+i)! <= 1/i! and exp(t) < 3). Squaring j times undoes the
    halving; negative arguments go through the reciprocal, swapping the
    bracket. Lower bounds rise and upper bounds fall as m grows.
    """
    if m < 1:
        raise ValueError("order must be >= 1")
    q = Fraction(q)
    if q == 0:
        return ExpBound(Fraction(1), Fraction(1), m)
    if q < 0:
        pos = exp_bounds(-q, m)
        return ExpBound(1 / pos.upper, 1 / pos.lower, m)
    j = 0
    t = q
    while t > 1:
        t /= 2
        j += 1
    s = Fraction(0)
    term = Fraction(1)
    for k in range(1, m + 1):
        s += term
        term = term * t / k
    s += term  # k = m term
    lower = s
    upper = s + 3 * t ** (m + 1) / factorial(m + 1)
    for _ in range(j):
        lower, upper = lower * lower, upper * upper
    return ExpBound(lower, upper, m)


def exp_epigraph_witness(x: Fraction, y: Fraction) -> tuple[bool, int]:
    """Decide y >= exp(x) and report the bracket order that settled it.

    x = 0 is answered directly (exp(0) = 1, order 0). Otherwise the
    order climbs until y falls outside the bracket; this terminates
    because exp of a nonzero rational is irrational, so y != exp(x) and
    the shrinking bracket eventually excludes y.
    """
    x, y = Fraction(x), Fraction(y)
    if x == 0:
        return y >= 1, 0
    m = 1
    while True:
        b = exp_bounds(x, m)
        if y < b.lower:
            return False, m
        if y > b.upper:
            return True, m
        m += 1


def exp_epigraph_decide(x: Fraction, y: Fraction) -> bool:
    """Total epigraph decision: is the point (x, y) on or above exp?"""
    return exp_epigraph_witness(x, y)[0]


def mandelbrot_rational_semi(
    c: ComplexRational,
    budget: int = certify.DEFAULT_BUDGET,
    p0: int = certify.DEFAULT_P0,
    p_max: int = certify.DEFAULT_P_MAX,
    bit_cap: int = certify.DEFAULT_BIT_CAP,
) -> certify.Verdict:
    """Three-valued bounded-orbit decision on an exact rational point.

    The honest rational-input interface to the set: certified Out or In
    when a proof fits in the budget, explicit Unknown otherwise. Unlike
    the deciders above this is not total in the yes/no sense; only the
    complement is semi-decidable.
    """
    return certify.decide(c, budget=budget, p0=p0, p_max=p_max, bit_cap=bit_cap)

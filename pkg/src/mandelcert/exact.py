"""Exact arithmetic substrate: rationals, dyadics, outward-rounded intervals.

Every number here is exact. Rationals are stdlib ``fractions.Fraction``
(always in lowest terms with a positive denominator). Dyadics are pairs
``man * 2**exp`` with an odd-or-zero mantissa. Intervals carry dyadic
endpoints and every interval operation computes the exact image first,
then applies a single outward rounding to the working precision, so the
result always contains the true set and loses at most one ulp per side
per operation.

Approximation oracles for computable reals live here too: an oracle maps
an accuracy index m to a rational within 2**-m of the represented real.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Callable

Rational = Fraction

DEFAULT_PRECISION = 64


def rat_normalize(num: int, den: int) -> Fraction:
    """Exact rational num/den in canonical form; den must be nonzero."""
    return Fraction(num, den)


def parse_rational(text: str) -> Fraction:
    """Parse 'p/q', 'p', or decimal text into an exact rational."""
    try:
        return Fraction(text.strip())
    except ZeroDivisionError:
        raise ValueError(f"zero denominator in {text!r}") from None


def format_rational(q: Fraction) -> str:
    """Canonical text form: '-3/4', '7'; the '/1' is omitted."""
    return str(q)


def _shift_ceil(m: int, s: int) -> int:
    # Python's >> floors; negate twice to round toward +inf.
    return -((-m) >> s)


@dataclass(frozen=True)
class Dyadic:
    """Exact dyadic number man * 2**exp, canonical: man odd or zero.

    The zero dyadic is (0, 0). Construction normalizes, so two equal
    values are structurally equal.
    """

    man: int
    exp: int

    def __post_init__(self) -> None:
        man, exp = self.man, self.exp
        if man == 0:
            exp = 0
        else:
            shift = (man & -man).bit_length() - 1
            man >>= shift
            exp += shift
        object.__setattr__(self, "man", man)
        object.__setattr__(self, "exp", exp)

    def as_fraction(self) -> Fraction:
        if self.exp >= 0:
            return Fraction(self.man << self.exp)
        return Fraction(self.man, 1 << -self.exp)

    def _cmp(self, other: "Dyadic") -> int:
        e = min(self.exp, other.exp)
        a = self.man << (self.exp - e)
        b = other.man << (other.exp - e)
        return (a > b) - (a < b)

    def __lt__(self, other: "Dyadic") -> bool:
        return self._cmp(other) < 0

    def __le__(self, other: "Dyadic") -> bool:
        return self._cmp(other) <= 0

    def __gt__(self, other: "Dyadic") -> bool:
        return self._cmp(other) > 0

    def __ge__(self, other: "Dyadic") -> bool:
        return self._cmp(other) >= 0

    def __str__(self) -> str:
        return f"{self.man}*2^{self.exp}"

    @classmethod
    def parse(cls, text: str) -> "Dyadic":
        """Parse the canonical 'man*2^exp' text form."""
        man_part, sep, exp_part = text.strip().partition("*2^")
        if not sep:
            raise ValueError(f"not a dyadic literal: {text!r}")
        return cls(int(man_part), int(exp_part))


def dyadic_round(r: Fraction, p: int, direction: str) -> Dyadic:
    """Round an exact rational to a dyadic on the grid 2**-p.

    direction 'down' gives the greatest grid point <= r, 'up' the least
    grid point >= r; either way the error is < 2**-p and the result is
    exact whenever r is already representable at that precision.
    """
    if p < 1:
        raise ValueError("precision must be >= 1")
    num = r.numerator << p
    den = r.denominator
    if direction == "down":
        man = num // den
    elif direction == "up":
        man = -((-num) // den)
    else:
        raise ValueError(f"direction must be 'down' or 'up', not {direction!r}")
    return Dyadic(man, -p)


# ----------------------------------------------------------------------
# Interval kernel. An interval is a triple (lo_man, hi_man, exp): both
# endpoints share one exponent, so addition is integer addition after an
# alignment shift and multiplication never rounds. Only _tri_round drops
# bits, and it widens: floor on lo, ceil on hi.
# ----------------------------------------------------------------------

_Tri = tuple[int, int, int]

_TRI_ZERO: _Tri = (0, 0, 0)


def _tri_round(t: _Tri, p: int) -> _Tri:
    lo, hi, e = t
    if e >= -p:
        return t
    s = -p - e
    return (lo >> s, _shift_ceil(hi, s), -p)


def _tri_add(a: _Tri, b: _Tri) -> _Tri:
    alo, ahi, ae = a
    blo, bhi, be = b
    e = min(ae, be)
    sa, sb = ae - e, be - e
    return ((alo << sa) + (blo << sb), (ahi << sa) + (bhi << sb), e)


def _tri_sub(a: _Tri, b: _Tri) -> _Tri:
    blo, bhi, be = b
    return _tri_add(a, (-bhi, -blo, be))


def _tri_mul(a: _Tri, b: _Tri) -> _Tri:
    alo, ahi, ae = a
    blo, bhi, be = b
    p1, p2, p3, p4 = alo * blo, alo * bhi, ahi * blo, ahi * bhi
    return (min(p1, p2, p3, p4), max(p1, p2, p3, p4), ae + be)


def _tri_sqr(a: _Tri) -> _Tri:
    lo, hi, e = a
    if lo >= 0:
        return (lo * lo, hi * hi, 2 * e)
    if hi <= 0:
        return (hi * hi, lo * lo, 2 * e)
    return (0, max(lo * lo, hi * hi), 2 * e)


def _tri_dbl(a: _Tri) -> _Tri:
    lo, hi, e = a
    return (lo, hi, e + 1)


def _tri_cmp_int(man: int, e: int, v: int) -> int:
    if e >= 0:
        a, b = man << e, v
    else:
        a, b = man, v << -e
    return (a > b) - (a < b)


def _tri_width_gt_int(t: _Tri, v: int) -> bool:
    lo, hi, e = t
    return _tri_cmp_int(hi - lo, e, v) > 0


def _tri_to_fractions(t: _Tri) -> tuple[Fraction, Fraction]:
    lo, hi, e = t
    if e >= 0:
        return Fraction(lo << e), Fraction(hi << e)
    d = 1 << -e
    return Fraction(lo, d), Fraction(hi, d)


def _tri_from_fractions(lo: Fraction, hi: Fraction, p: int) -> _Tri:
    a = dyadic_round(lo, p, "down")
    b = dyadic_round(hi, p, "up")
    e = min(a.exp, b.exp)
    return (a.man << (a.exp - e), b.man << (b.exp - e), e)


def _tri_intersect(a: _Tri, b: _Tri) -> _Tri:
    alo, ahi, ae = a
    blo, bhi, be = b
    e = min(ae, be)
    alo, ahi = alo << (ae - e), ahi << (ae - e)
    blo, bhi = blo << (be - e), bhi << (be - e)
    lo, hi = max(alo, blo), min(ahi, bhi)
    if lo > hi:
        raise ValueError("empty intersection")
    return (lo, hi, e)


def _box_step_tri(zre: _Tri, zim: _Tri, cre: _Tri, cim: _Tri, p: int) -> tuple[_Tri, _Tri]:
    # z^2 + c componentwise, exact until the single final rounding.
    re = _tri_round(_tri_add(_tri_sub(_tri_sqr(zre), _tri_sqr(zim)), cre), p)
    im = _tri_round(_tri_add(_tri_dbl(_tri_mul(zre, zim)), cim), p)
    return re, im


def _abs_sq_tri(zre: _Tri, zim: _Tri, p: int) -> _Tri:
    return _tri_round(_tri_add(_tri_sqr(zre), _tri_sqr(zim)), p)


@dataclass(frozen=True)
class DyadicInterval:
    """Closed interval [lo, hi] with exact dyadic endpoints, lo <= hi."""

    lo: Dyadic
    hi: Dyadic

    def __post_init__(self) -> None:
        if self.lo > self.hi:
            raise ValueError(f"inverted interval: {self.lo} > {self.hi}")

    @classmethod
    def from_fractions(cls, lo: Fraction, hi: Fraction, p: int) -> "DyadicInterval":
        """Smallest precision-p interval containing [lo, hi] (outward)."""
        if lo > hi:
            raise ValueError("inverted interval bounds")
        return cls(dyadic_round(lo, p, "down"), dyadic_round(hi, p, "up"))

    @classmethod
    def point(cls, q: Fraction, p: int) -> "DyadicInterval":
        return cls.from_fractions(q, q, p)

    def _tri(self) -> _Tri:
        e = min(self.lo.exp, self.hi.exp)
        return (self.lo.man << (self.lo.exp - e), self.hi.man << (self.hi.exp - e), e)

    @classmethod
    def _from_tri(cls, t: _Tri) -> "DyadicInterval":
        lo, hi, e = t
        return cls(Dyadic(lo, e), Dyadic(hi, e))

    def contains(self, q: Fraction) -> bool:
        return self.lo.as_fraction() <= q <= self.hi.as_fraction()

    def width(self) -> Fraction:
        return self.hi.as_fraction() - self.lo.as_fraction()

    def as_fractions(self) -> tuple[Fraction, Fraction]:
        return self.lo.as_fraction(), self.hi.as_fraction()


def iv_add(a: DyadicInterval, b: DyadicInterval, p: int) -> DyadicInterval:
    """Interval sum, exact then one outward rounding at precision p."""
    return DyadicInterval._from_tri(_tri_round(_tri_add(a._tri(), b._tri()), p))


def iv_sub(a: DyadicInterval, b: DyadicInterval, p: int) -> DyadicInterval:
    return DyadicInterval._from_tri(_tri_round(_tri_sub(a._tri(), b._tri()), p))


def iv_mul(a: DyadicInterval, b: DyadicInterval, p: int) -> DyadicInterval:
    return DyadicInterval._from_tri(_tri_round(_tri_mul(a._tri(), b._tri()), p))


def iv_sqr(a: DyadicInterval, p: int) -> DyadicInterval:
    """Interval square; never dips below 0 when the input straddles it."""
    return DyadicInterval._from_tri(_tri_round(_tri_sqr(a._tri()), p))


@dataclass(frozen=True)
class ComplexRational:
    """Exact Gaussian rational re + im*i."""

    re: Fraction
    im: Fraction

    def abs_sq(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __str__(self) -> str:
        return f"{self.re}{'+' if self.im >= 0 else ''}{self.im}i"


@dataclass(frozen=True)
class ComplexBox:
    """Axis-aligned rectangle in the plane: a dyadic interval per axis."""

    re: DyadicInterval
    im: DyadicInterval

    @classmethod
    def point(cls, c: ComplexRational, p: int) -> "ComplexBox":
        """Tightest precision-p box around an exact point."""
        return cls(DyadicInterval.point(c.re, p), DyadicInterval.point(c.im, p))

    @classmethod
    def from_rect(
        cls,
        re_lo: Fraction,
        re_hi: Fraction,
        im_lo: Fraction,
        im_hi: Fraction,
        p: int,
    ) -> "ComplexBox":
        return cls(
            DyadicInterval.from_fractions(re_lo, re_hi, p),
            DyadicInterval.from_fractions(im_lo, im_hi, p),
        )

    def contains(self, c: ComplexRational) -> bool:
        return self.re.contains(c.re) and self.im.contains(c.im)


def box_step(z: ComplexBox, c: ComplexBox, p: int) -> ComplexBox:
    """One quadratic-map step z**2 + c on boxes.

    Each output component is computed exactly from the exact endpoint
    products and sums, then rounded outward once at precision p, so the
    result box contains z0**2 + c0 for every z0 in z and c0 in c.
    """
    re, im = _box_step_tri(z.re._tri(), z.im._tri(), c.re._tri(), c.im._tri(), p)
    return ComplexBox(DyadicInterval._from_tri(re), DyadicInterval._from_tri(im))


def box_abs_sq_bounds(z: ComplexBox, p: int) -> DyadicInterval:
    """Enclosure of |z|**2 = re**2 + im**2 with one outward rounding."""
    return DyadicInterval._from_tri(_abs_sq_tri(z.re._tri(), z.im._tri(), p))


# ----------------------------------------------------------------------
# Computable-real oracles.
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class RealOracle:
    """A computable real presented as rational approximations.

    approximant(m) must return a rational q with |x - q| < 2**-m for the
    represented real x, for every m >= 0.
    """

    approximant: Callable[[int], Fraction]
    label: str = ""


def oracle_query(oracle: RealOracle, m: int) -> Fraction:
    """The oracle's rational at accuracy index m (error < 2**-m)."""
    if m < 0:
        raise ValueError("accuracy index must be >= 0")
    return oracle.approximant(m)


def constant_oracle(q: Fraction) -> RealOracle:
    """Oracle for a rational itself: every query answers q exactly."""
    q = Fraction(q)
    return RealOracle(lambda m: q, label=format_rational(q))


def sqrt_oracle(q: Fraction) -> RealOracle:
    """Oracle for sqrt(q), q >= 0 rational.

    Query m answers isqrt(a*b*4**(m+2)) / (b*2**(m+2)) for q = a/b,
    an under-approximation within 2**-(m+2) < 2**-m of the true root.
    """
    q = Fraction(q)
    if q < 0:
        raise ValueError("square root oracle needs a nonnegative rational")
    a, b = q.numerator, q.denominator

    def approximant(m: int) -> Fraction:
        return Fraction(isqrt((a * b) << (2 * m + 4)), b << (m + 2))

    return RealOracle(approximant, label=f"sqrt({format_rational(q)})")


def sqrt_bounds(s: Fraction, p: int) -> tuple[Fraction, Fraction]:
    """Rational lo <= sqrt(s) <= hi with hi - lo <= 2**-p, for s >= 0."""
    if s < 0:
        raise ValueError("negative radicand")
    a, b = s.numerator, s.denominator
    root = isqrt((a * b) << (2 * p))
    den = b << p
    return Fraction(root, den), Fraction(root + 1, den)

"""Independent reference computations used only by the tests.

These deliberately avoid the package's interval kernel: the exact orbit
tracks raw integer numerators over a common power-of-d denominator (no
reduction, no rounding), and the escape-step oracle runs the orbit in
high-precision MPFR floats with an explicit error margin check. Both
need gmpy2 (a test-only dependency) to stay fast at multi-megabit sizes.
"""

from __future__ import annotations

from fractions import Fraction

import gmpy2
from gmpy2 import mpz


def exact_orbit_common_den(pa: int, pb: int, d: int, steps: int):
    """Exact orbit of z**2 + c for c = (pa + pb*i)/d.

    Yields (nre, nim, P) per step with z = (nre + nim*i)/P, P = d**(2**k - 1).
    Integer-only: no gcd, no rounding, so it is exact by construction.
    """
    pa, pb, d = mpz(pa), mpz(pb), mpz(d)
    nre, nim, P = mpz(0), mpz(0), mpz(1)
    out = []
    for _ in range(steps):
        P2 = P * P
        nre, nim = (nre * nre - nim * nim) * d + pa * P2, 2 * nre * nim * d + pb * P2
        P = P2 * d
        out.append((nre, nim, P))
    return out


def frac_le_dyadic(num: mpz, P: mpz, man: int, exp: int) -> bool:
    """num/P <= man * 2**exp, exact (P > 0)."""
    if exp >= 0:
        return num <= (man * P) << exp
    return num << (-exp) <= man * P


def dyadic_le_frac(man: int, exp: int, num: mpz, P: mpz) -> bool:
    if exp >= 0:
        return (man * P) << exp <= num
    return man * P <= num << (-exp)


def first_escape_step_mpfr(c_re: Fraction, c_im: Fraction, budget: int, prec: int = 4000):
    """First n with |z_n|**2 > 4, by MPFR at `prec` bits.

    The per-step relative error is ~2**-prec and gets amplified by at
    most a constant factor per step, so after n << prec steps the
    computed |z|**2 is correct to far better than the margin we demand:
    the comparison against 4 must clear 2**-(prec//2), or we refuse to
    answer rather than return a doubtful step.
    """
    with gmpy2.context(precision=prec):
        margin = gmpy2.mpfr(2) ** -(prec // 2)
        cre = gmpy2.mpfr(c_re.numerator) / c_re.denominator
        cim = gmpy2.mpfr(c_im.numerator) / c_im.denominator
        zre = gmpy2.mpfr(0)
        zim = gmpy2.mpfr(0)
        for n in range(1, budget + 1):
            zre, zim = zre * zre - zim * zim + cre, 2 * zre * zim + cim
            m = zre * zre + zim * zim
            if m > 4 + margin:
                return n
            if m > 4 - margin:
                raise ArithmeticError(f"escape test too close to call at step {n}")
        return None

"""Certified three-valued membership for the quadratic-map bounded set.

A parameter c belongs to the set when the orbit 0, c, c**2+c, ... of
z -> z**2 + c never leaves the disk |z| <= 2. Only the complement is
semi-decidable, so every answer ships with a certificate:

  Out      - an orbit step n and a proven dyadic lower bound > 4 for
             |z_n|**2 (escape is checked on the square, never a root);
  In       - an exact orbit cycle, or membership in one of the two
             closed-form interior regions (main cardioid, period-2 disk);
  Unknown  - an honest "not decided" carrying the budgets it exhausted.

Raising the budget or precision can only move Unknown toward Out or In,
never flip a certified answer.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .exact import (
    ComplexBox,
    ComplexRational,
    Dyadic,
    DyadicInterval,
    RealOracle,
    _abs_sq_tri,
    _box_step_tri,
    _tri_cmp_int,
    _tri_width_gt_int,
    _TRI_ZERO,
    dyadic_round,
    format_rational,
    oracle_query,
    parse_rational,
)

DEFAULT_BUDGET = 50
DEFAULT_P0 = 64
DEFAULT_P_MAX = 1024
DEFAULT_BIT_CAP = 4096

ESCAPE_SQ = 4  # |z|^2 > 4 proves escape
BLOWUP_WIDTH = 8  # restart threshold for |z|^2 enclosures straddling 4


# --- orbit outcomes (exact path) --------------------------------------


@dataclass(frozen=True)
class Escaped:
    n: int
    z: ComplexRational


@dataclass(frozen=True)
class Cycle:
    preperiod: int
    period: int
    witness: ComplexRational


@dataclass(frozen=True)
class Exhausted:
    n: int
    z: ComplexRational


@dataclass(frozen=True)
class BitCapHit:
    n: int


OrbitOutcome = Union[Escaped, Cycle, Exhausted, BitCapHit]


# --- certificates and verdicts ----------------------------------------


@dataclass(frozen=True)
class CycleCert:
    """z_(preperiod) == z_(preperiod+period) exactly; orbit is eventually
    periodic and stays in the disk forever."""

    preperiod: int
    period: int
    witness: ComplexRational


@dataclass(frozen=True)
class CardioidCert:
    """c satisfies q*(q + (re - 1/4)) < im**2 / 4 with
    q = (re - 1/4)**2 + im**2: interior of the main cardioid."""


@dataclass(frozen=True)
class BulbCert:
    """c satisfies (re + 1)**2 + im**2 < 1/16: interior of the period-2
    disk of radius 1/4 around -1."""


InCertificate = Union[CycleCert, CardioidCert, BulbCert]


@dataclass(frozen=True)
class OutVerdict:
    n: int
    abs_sq_lower: Dyadic  # proven lower bound for |z_n|^2, > 4


@dataclass(frozen=True)
class InVerdict:
    certificate: InCertificate


@dataclass(frozen=True)
class UnknownVerdict:
    budget: int
    precision: int


Verdict = Union[OutVerdict, InVerdict, UnknownVerdict]


def verdict_kind(v: Verdict) -> str:
    if isinstance(v, OutVerdict):
        return "out"
    if isinstance(v, InVerdict):
        return "in"
    return "unknown"


# --- exact orbit -------------------------------------------------------


def iterate_exact(
    c: ComplexRational, budget: int = DEFAULT_BUDGET, bit_cap: int = DEFAULT_BIT_CAP
) -> OrbitOutcome:
    """Run the orbit with exact rational arithmetic.

    Stops at the first of: |z_n|**2 > 4 (Escaped), an exact revisit of an
    earlier orbit value (Cycle), a numerator or denominator exceeding
    bit_cap bits (BitCapHit), or the step budget (Exhausted). The escape
    test runs before the cycle and cap tests at each step.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    if bit_cap < 64:
        raise ValueError("bit cap must be >= 64")
    zre = Fraction(0)
    zim = Fraction(0)
    seen: dict[tuple[Fraction, Fraction], int] = {(zre, zim): 0}
    for n in range(1, budget + 1):
        zre, zim = zre * zre - zim * zim + c.re, 2 * zre * zim + c.im
        if zre * zre + zim * zim > ESCAPE_SQ:
            return Escaped(n, ComplexRational(zre, zim))
        key = (zre, zim)
        if key in seen:
            first = seen[key]
            return Cycle(first, n - first, ComplexRational(zre, zim))
        if (
            max(
                zre.numerator.bit_length(),
                zre.denominator.bit_length(),
                zim.numerator.bit_length(),
                zim.denominator.bit_length(),
            )
            > bit_cap
        ):
            return BitCapHit(n)
        seen[key] = n
    return Exhausted(budget, ComplexRational(zre, zim))


def _dyadic_lower_gt4(v: Fraction) -> Dyadic:
    # tightest-enough dyadic round-down of v that still exceeds 4
    p = 8
    while True:
        d = dyadic_round(v, p, "down")
        if _tri_cmp_int(d.man, d.exp, ESCAPE_SQ) > 0:
            return d
        p *= 2


# --- certifiers --------------------------------------------------------


def certify_in_cycle(
    c: ComplexRational, budget: int = DEFAULT_BUDGET, bit_cap: int = DEFAULT_BIT_CAP
) -> Verdict:
    """In if the exact orbit revisits a value within budget, else Unknown."""
    outcome = iterate_exact(c, budget, bit_cap)
    if isinstance(outcome, Cycle):
        return InVerdict(CycleCert(outcome.preperiod, outcome.period, outcome.witness))
    return UnknownVerdict(budget, 0)


_QUARTER = Fraction(1, 4)
_SIXTEENTH = Fraction(1, 16)

_FInterval = tuple[Fraction, Fraction]


def _fi_add(a: _FInterval, b: _FInterval) -> _FInterval:
    return (a[0] + b[0], a[1] + b[1])


def _fi_sqr(a: _FInterval) -> _FInterval:
    lo, hi = a
    if lo >= 0:
        return (lo * lo, hi * hi)
    if hi <= 0:
        return (hi * hi, lo * lo)
    return (Fraction(0), max(lo * lo, hi * hi))


def _fi_mul(a: _FInterval, b: _FInterval) -> _FInterval:
    ps = (a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1])
    return (min(ps), max(ps))


def certify_in_region(c: ComplexRational | ComplexBox) -> Verdict:
    """Closed-form interior test: main cardioid, then period-2 disk.

    Points are tested with exact rational evaluation; boxes with exact
    rational interval evaluation (membership must hold strictly for the
    whole box). Boundary parameters always come back Unknown: both
    inequalities are strict.
    """
    if isinstance(c, ComplexRational):
        x, y = c.re, c.im
        q = (x - _QUARTER) ** 2 + y * y
        if q * (q + (x - _QUARTER)) < y * y / 4:
            return InVerdict(CardioidCert())
        if (x + 1) ** 2 + y * y < _SIXTEENTH:
            return InVerdict(BulbCert())
        return UnknownVerdict(0, 0)

    x: _FInterval = c.re.as_fractions()
    y: _FInterval = c.im.as_fractions()
    xm = (x[0] - _QUARTER, x[1] - _QUARTER)
    q = _fi_add(_fi_sqr(xm), _fi_sqr(y))
    lhs = _fi_mul(q, _fi_add(q, xm))
    rhs = _fi_sqr(y)
    if lhs[1] < rhs[0] / 4:
        return InVerdict(CardioidCert())
    xp = (x[0] + 1, x[1] + 1)
    disk = _fi_add(_fi_sqr(xp), _fi_sqr(y))
    if disk[1] < _SIXTEENTH:
        return InVerdict(BulbCert())
    return UnknownVerdict(0, 0)


def certify_out_interval(
    c: ComplexBox,
    budget: int = DEFAULT_BUDGET,
    p0: int = DEFAULT_P0,
    p_max: int = DEFAULT_P_MAX,
) -> Verdict:
    """Escape proof by outward-rounded interval orbit over the whole box.

    Runs the box orbit at precision p0; Out at the first step whose
    |z|**2 enclosure lies strictly above 4 (the dyadic lower bound is
    the certificate). If the enclosure both straddles 4 and grows wider
    than 8 the run has blown up: the precision doubles (capped at p_max)
    and the orbit restarts from scratch. Unknown when the budget runs
    out or the blow-up recurs at p_max.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    if p0 < 1 or p0 > p_max:
        raise ValueError("need 1 <= p0 <= p_max")
    cre = c.re._tri()
    cim = c.im._tri()
    p = p0
    while True:
        zre, zim = _TRI_ZERO, _TRI_ZERO
        blown = False
        for n in range(1, budget + 1):
            zre, zim = _box_step_tri(zre, zim, cre, cim, p)
            lo, hi, e = _abs_sq_tri(zre, zim, p)
            if _tri_cmp_int(lo, e, ESCAPE_SQ) > 0:
                return OutVerdict(n, Dyadic(lo, e))
            if (
                _tri_cmp_int(hi, e, ESCAPE_SQ) >= 0
                and _tri_width_gt_int((lo, hi, e), BLOWUP_WIDTH)
            ):
                blown = True
                break
        if not blown or p >= p_max:
            return UnknownVerdict(budget, p)
        p = min(2 * p, p_max)


def decide(
    c: ComplexRational | ComplexBox,
    budget: int = DEFAULT_BUDGET,
    p0: int = DEFAULT_P0,
    p_max: int = DEFAULT_P_MAX,
    bit_cap: int = DEFAULT_BIT_CAP,
    use_region: bool = True,
) -> Verdict:
    """Full three-valued decision for a point or a box.

    Order: region certificates, then (for exact points) the exact orbit
    for cycles or exact escapes, then the interval escape proof. An
    exact escape is converted to an Out certificate by rounding the
    exact |z_n|**2 down until the dyadic bound still clears 4.
    """
    if use_region:
        r = certify_in_region(c)
        if isinstance(r, InVerdict):
            return r
    if isinstance(c, ComplexRational):
        outcome = iterate_exact(c, budget, bit_cap)
        if isinstance(outcome, Cycle):
            return InVerdict(
                CycleCert(outcome.preperiod, outcome.period, outcome.witness)
            )
        if isinstance(outcome, Escaped):
            return OutVerdict(outcome.n, _dyadic_lower_gt4(outcome.z.abs_sq()))
        box = ComplexBox.point(c, p_max)
    else:
        box = c
    return certify_out_interval(box, budget, p0, p_max)


# --- oracle-driven decision over shrinking boxes -----------------------


@dataclass(frozen=True)
class OracleRun:
    """decide_oracle result: the verdict, the stage that certified it
    (None when every stage stayed Unknown), and the last box examined."""

    verdict: Verdict
    stage: int | None
    box: ComplexBox | None


def decide_oracle(
    ox: RealOracle,
    oy: RealOracle,
    stages: int,
    p0: int = DEFAULT_P0,
    p_max: int = DEFAULT_P_MAX,
) -> OracleRun:
    """Decide membership of a real parameter given only approximations.

    Stage i queries both oracles at accuracy i, so the true parameter
    lies in the box [q - 2**-i, q + 2**-i] per axis; the stage tries the
    region certificates and an i-step interval escape on that whole box.
    Any certificate for the box is a certificate for the point.
    """
    if stages < 1:
        raise ValueError("stages must be >= 1")
    box: ComplexBox | None = None
    for i in range(1, stages + 1):
        qx = oracle_query(ox, i)
        qy = oracle_query(oy, i)
        rad = Fraction(1, 1 << i)
        box = ComplexBox.from_rect(qx - rad, qx + rad, qy - rad, qy + rad, p_max)
        r = certify_in_region(box)
        if isinstance(r, InVerdict):
            return OracleRun(r, i, box)
        o = certify_out_interval(box, budget=i, p0=p0, p_max=p_max)
        if isinstance(o, OutVerdict):
            return OracleRun(o, i, box)
    return OracleRun(UnknownVerdict(stages, p_max), None, box)


# --- certificate re-checking -------------------------------------------

_RECHECK_BIT_LIMIT = 1 << 20


def verify_certificate(c: ComplexRational, v: Verdict) -> bool:
    """Re-check a verdict against c with independent exact arithmetic.

    Out: recompute z_n exactly and confirm abs_sq_lower <= |z_n|**2 and
    abs_sq_lower > 4. Cycle: replay preperiod+period steps, confirm the
    revisit, the witness, and that no prefix step escapes. Region: the
    defining inequality. Unknown asserts nothing and verifies trivially.
    Raises ValueError when an exact replay would exceed the size limit.
    """
    if isinstance(v, UnknownVerdict):
        return True
    if isinstance(v, OutVerdict):
        zre = Fraction(0)
        zim = Fraction(0)
        for _ in range(v.n):
            zre, zim = zre * zre - zim * zim + c.re, 2 * zre * zim + c.im
            if (
                max(zre.denominator.bit_length(), zim.denominator.bit_length())
                > _RECHECK_BIT_LIMIT
            ):
                raise ValueError("certificate too deep for exact replay")
        bound = v.abs_sq_lower.as_fraction()
        return bound > ESCAPE_SQ and bound <= zre * zre + zim * zim
    cert = v.certificate
    if isinstance(cert, CycleCert):
        if cert.preperiod < 0 or cert.period < 1:
            return False
        zre = Fraction(0)
        zim = Fraction(0)
        at_pre: tuple[Fraction, Fraction] | None = (
            (zre, zim) if cert.preperiod == 0 else None
        )
        for n in range(1, cert.preperiod + cert.period + 1):
            zre, zim = zre * zre - zim * zim + c.re, 2 * zre * zim + c.im
            if zre * zre + zim * zim > ESCAPE_SQ:
                return False
            if n == cert.preperiod:
                at_pre = (zre, zim)
        if at_pre is None or (zre, zim) != at_pre:
            return False
        return ComplexRational(zre, zim) == cert.witness
    if isinstance(cert, CardioidCert):
        x, y = c.re, c.im
        q = (x - _QUARTER) ** 2 + y * y
        return q * (q + (x - _QUARTER)) < y * y / 4
    if isinstance(cert, BulbCert):
        return (c.re + 1) ** 2 + c.im * c.im < _SIXTEENTH
    return False


# --- JSON interchange ---------------------------------------------------


def _complex_obj(c: ComplexRational) -> dict:
    return {"re": format_rational(c.re), "im": format_rational(c.im)}


def certificate_obj(v: Verdict) -> dict | None:
    if isinstance(v, OutVerdict):
        return {"type": "escape", "n": v.n, "abs_sq_lower": str(v.abs_sq_lower)}
    if isinstance(v, InVerdict):
        cert = v.certificate
        if isinstance(cert, CycleCert):
            return {
                "type": "cycle",
                "preperiod": cert.preperiod,
                "period": cert.period,
                "witness": _complex_obj(cert.witness),
            }
        if isinstance(cert, CardioidCert):
            return {"type": "cardioid"}
        return {"type": "bulb"}
    return None


def verdict_to_obj(
    c: ComplexRational | None, v: Verdict, budget: int, precision: int
) -> dict:
    """JSON-ready dict: parameter, verdict tag, certificate, budgets."""
    obj: dict = {
        "c": _complex_obj(c) if c is not None else None,
        "verdict": verdict_kind(v),
        "certificate": certificate_obj(v),
        "budget": budget,
        "precision": precision,
    }
    return obj


def verdict_from_obj(obj: dict) -> Verdict:
    """Inverse of verdict_to_obj for the verdict/certificate fields."""
    kind = obj["verdict"]
    cert = obj.get("certificate")
    if kind == "unknown":
        return UnknownVerdict(obj["budget"], obj["precision"])
    if kind == "out":
        if not cert or cert.get("type") != "escape":
            raise ValueError("out verdict needs an escape certificate")
        return OutVerdict(cert["n"], Dyadic.parse(cert["abs_sq_lower"]))
    if kind != "in" or not cert:
        raise ValueError(f"malformed verdict object: {obj!r}")
    ctype = cert.get("type")
    if ctype == "cycle":
        w = cert["witness"]
        return InVerdict(
            CycleCert(
                cert["preperiod"],
                cert["period"],
                ComplexRational(parse_rational(w["re"]), parse_rational(w["im"])),
            )
        )
    if ctype == "cardioid":
        return InVerdict(CardioidCert())
    if ctype == "bulb":
        return InVerdict(BulbCert())
    raise ValueError(f"unknown certificate type: {ctype!r}")

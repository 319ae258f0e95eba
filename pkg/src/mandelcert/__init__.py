"""Certified three-valued membership for the quadratic bounded-orbit set,
with exact arithmetic, rational-input deciders, a halving-clock machine
simulator, and a sound renderer."""

from .certify import (
    BulbCert,
    CardioidCert,
    CycleCert,
    InVerdict,
    OutVerdict,
    UnknownVerdict,
    Verdict,
    decide,
    decide_oracle,
    verify_certificate,
)
from .exact import (
    ComplexBox,
    ComplexRational,
    Dyadic,
    DyadicInterval,
    Rational,
    RealOracle,
    constant_oracle,
    sqrt_oracle,
)

__version__ = "0.1.0"

__all__ = [
    "BulbCert",
    "CardioidCert",
    "ComplexBox",
    "ComplexRational",
    "CycleCert",
    "Dyadic",
    "DyadicInterval",
    "InVerdict",
    "OutVerdict",
    "Rational",
    "RealOracle",
    "UnknownVerdict",
    "Verdict",
    "constant_oracle",
    "decide",
    "decide_oracle",
    "sqrt_oracle",
    "verify_certificate",
    "__version__",
]

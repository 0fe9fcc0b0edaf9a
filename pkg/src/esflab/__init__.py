"""Exact-arithmetic laboratory for the elementary symmetric functions of
reciprocal arithmetic progressions 1/b, 1/(a+b), ..., 1/(a(n-1)+b):
streaming exact computation, integrality decisions with independently
checkable evidence, and exhaustive parameter sweeps.
"""

__version__ = "0.1.0"

from .decider import Decision, decide, decide_k1
from .esf import EsfState, esf, esf_direct
from .padic import (
    ValuationCertificate,
    make_certificate,
    verify_certificate,
    vp_int,
    vp_rat,
)
from .primes import build_schedule_table, find_interval_prime, is_prime, sieve
from .rational import Rational, is_integer, parse, render

__all__ = [
    "Decision",
    "EsfState",
    "Rational",
    "ValuationCertificate",
    "build_schedule_table",
    "decide",
    "decide_k1",
    "esf",
    "esf_direct",
    "find_interval_prime",
    "is_integer",
    "is_prime",
    "make_certificate",
    "parse",
    "render",
    "sieve",
    "verify_certificate",
    "vp_int",
    "vp_rat",
    "__version__",
]

"""p-adic valuations and non-integrality witness certificates.

A witness certificate pins down why S(n,k) has valuation exactly -k at a
prime p: with n/(k+1) < p <= n/k and p large enough (p > ak + 2a + 2b/p),
the terms of the progression divisible by p are exactly

    p*a0, p*(a0 + a), ..., p*(a0 + a*(k+t)),   t in {-1, 0},

where r is the unique residue mod p with p | a*r + b and a0 = (a*r+b)/p.
The sub-sum over k-subsets drawn entirely from those terms has valuation
-k (for t = 0 this needs the k-subset sum identity
sum_{i=0..k}(a0+ai) = (k+1)(ak+2a0)/2 to be a p-unit), and every other
k-subset contributes valuation >= 1-k, so the total is exactly -k.

Certificates carry the redundant bookkeeping (r, a0, t) so a third-party
verifier needs no search: fast mode re-derives every invariant in O(k)
integer arithmetic; exhaustive mode additionally recomputes S exactly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from itertools import combinations

import gmpy2
from gmpy2 import mpq, mpz

from . import primes
from .esf import esf
from .rational import Rational

GENERATOR_VERSION = "esflab-cert/1"

# Exact recomputation of S is only offered at desk scale.
EXHAUSTIVE_N_LIMIT = 5000


class CertificateError(ValueError):
    """Certificate construction rejected; the message names the failed check."""


def vp_int(p: int, m: int) -> int | float:
    """Largest e with p**e | m; math.inf for m == 0."""
    if m == 0:
        return math.inf
    return int(gmpy2.remove(mpz(m), mpz(p))[1])


def vp_rat(p: int, x: Rational) -> int | float:
    """Valuation of a rational: vp(numerator) - vp(denominator); inf at 0."""
    x = mpq(x)
    if x == 0:
        return math.inf
    num, den = x.numerator, x.denominator
    vd = int(gmpy2.remove(den, mpz(p))[1])
    if vd:
        return -vd  # reduced form: p cannot divide both parts
    return int(gmpy2.remove(num, mpz(p))[1])


@dataclass(frozen=True)
class ValuationCertificate:
    """Witness that S(n,k) for progression (a,b) has p-adic valuation -k."""

    a: int
    b: int
    n: int
    k: int
    p: int
    r: int
    a0: int
    t: int
    claimed_valuation: int

    def to_json_dict(self) -> dict:
        # integers as decimal strings: no 64-bit ambiguity for consumers
        out = {f: str(getattr(self, f)) for f in
               ("a", "b", "n", "k", "p", "r", "a0", "t", "claimed_valuation")}
        out["generator_version"] = GENERATOR_VERSION
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json_dict(cls, data: dict) -> "ValuationCertificate":
        try:
            fields = {f: int(data[f]) for f in
                      ("a", "b", "n", "k", "p", "r", "a0", "t", "claimed_valuation")}
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed certificate record: {exc}") from exc
        return cls(**fields)

    @classmethod
    def from_json(cls, text: str) -> "ValuationCertificate":
        data = json.loads(text)
        if not isinstance(data, dict):
            raise ValueError("certificate JSON must be an object")
        return cls.from_json_dict(data)


def _interval_ok(n: int, k: int, p: int) -> bool:
    # n/(k+1) < p <= n/k by cross-multiplication
    return p * (k + 1) > n and p * k <= n


def _size_ok(a: int, b: int, k: int, p: int) -> bool:
    # p > ak + 2a + 2b/p, cleared of the division
    return p * p > p * (a * k + 2 * a) + 2 * b


def make_certificate(a: int, b: int, n: int, k: int, p: int) -> ValuationCertificate:
    """Build the witness record for (a, b, n, k) at prime p.

    Rejects any p failing the hypotheses, naming the failed inequality.
    """
    if a < 1 or b < 1 or not 1 <= k <= n:
        raise CertificateError("parameters must satisfy a,b >= 1 and 1 <= k <= n")
    if not primes.is_prime(p):
        raise CertificateError(f"p = {p} is not prime")
    if not _interval_ok(n, k, p):
        raise CertificateError(
            f"p = {p} fails the interval condition n/(k+1) < p <= n/k "
            f"for n = {n}, k = {k}"
        )
    if not _size_ok(a, b, k, p):
        raise CertificateError(
            f"p = {p} fails the size condition p > a*k + 2*a + 2*b/p "
            f"(checked as p^2 > p*(a*k + 2*a) + 2*b)"
        )
    # p > ak + 2a >= 3a, so p is coprime to a and r is well defined.
    r = (-b * pow(a, -1, p)) % p
    a0 = (a * r + b) // p
    t = -1 if p * (a * k + a0) > a * (n - 1) + b else 0
    return ValuationCertificate(
        a=a, b=b, n=n, k=k, p=p, r=r, a0=a0, t=t, claimed_valuation=-k
    )


@dataclass(frozen=True)
class VerificationResult:
    ok: bool
    failed_clause: str | None = None
    recomputed_valuation: int | None = None

    def __bool__(self) -> bool:
        return self.ok


def _fail(clause: str) -> VerificationResult:
    return VerificationResult(ok=False, failed_clause=clause)


def multiples_of_p(cert: ValuationCertificate) -> list[int]:
    """The progression terms divisible by p, per the certificate's schedule."""
    return [cert.p * (cert.a0 + cert.a * j) for j in range(cert.k + cert.t + 1)]


def s1_partial_sum(cert: ValuationCertificate) -> Rational:
    """Exact sub-sum of S over k-subsets drawn only from the multiples of p.

    There are at most k+1 such subsets (the multiples number k+t+1), so
    this is O(k^2) arithmetic on small integers.
    """
    total = mpq(0)
    for combo in combinations(multiples_of_p(cert), cert.k):
        prod = 1
        for d in combo:
            prod *= d
        total += mpq(1, prod)
    return total


def verify_certificate(cert: ValuationCertificate, mode: str = "fast") -> VerificationResult:
    """Re-check a certificate; returns a falsy result naming any failed clause.

    fast: all structural invariants plus the divisible-terms analysis, in
    O(k) integer arithmetic. exhaustive: additionally recomputes S(n,k)
    exactly and compares valuations (allowed only for n <= 5000).
    """
    if mode not in ("fast", "exhaustive"):
        raise ValueError(f"unknown verification mode: {mode!r}")
    a, b, n, k, p = cert.a, cert.b, cert.n, cert.k, cert.p
    r, a0, t = cert.r, cert.a0, cert.t

    if not (a >= 1 and b >= 1 and 1 <= k <= n):
        return _fail("parameter-ranges")
    if not primes.is_prime(p):
        return _fail("p-prime")
    if not _interval_ok(n, k, p):
        return _fail("interval")
    if not _size_ok(a, b, k, p):
        return _fail("size-hypothesis")
    # Every term b+ai with i < n is below p^2, so none carries p twice.
    if not p * p > a * (n - 1) + b:
        return _fail("term-valuation-cap")
    if math.gcd(a, p) != 1:
        return _fail("coprimality")
    if not 0 <= r <= p - 1:
        return _fail("residue-range")
    if (a * r + b) % p != 0:
        return _fail("residue-divisibility")
    if a0 < 1 or a0 * p != a * r + b:
        return _fail("cofactor-value")
    if not a0 * p < a * p + b:
        return _fail("cofactor-bound")
    if t != (-1 if p * (a * k + a0) > a * (n - 1) + b else 0):
        return _fail("count-flag")
    if cert.claimed_valuation != -k:
        return _fail("claimed-valuation")

    # Divisible-terms schedule: indices r, r+p, ..., r+p*(k+t) and no more.
    count = k + t + 1
    if count not in (k, k + 1):
        return _fail("multiple-count")
    if r + p * (k + t) > n - 1 or r + p * (k + t + 1) <= n - 1:
        return _fail("multiple-count")
    for j in range(count):
        if b + a * (r + p * j) != p * (a0 + a * j):
            return _fail("multiple-schedule")
        # each shrunk-progression factor is a p-unit (p > ak + 2*a0)
        if (a0 + a * j) % p == 0:
            return _fail("subproduct-unit")
    if t == 0:
        # sum over the shrunk progression: (k+1)(ak + 2*a0)/2 must be a p-unit
        total = (k + 1) * (a * k + 2 * a0) // 2
        if vp_int(p, total) != 0:
            return _fail("unit-sum")

    if mode == "exhaustive":
        if n > EXHAUSTIVE_N_LIMIT:
            raise ValueError(
                f"exhaustive verification is limited to n <= {EXHAUSTIVE_N_LIMIT}"
            )
        v = vp_rat(p, esf(a, b, n, k))
        if v != cert.claimed_valuation:
            return _fail("exact-valuation")
        return VerificationResult(ok=True, recomputed_valuation=int(v))

    return VerificationResult(ok=True)

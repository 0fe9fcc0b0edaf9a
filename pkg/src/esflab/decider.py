"""End-to-end integrality decision for a single query (a, b, n, k).

The classification being verified: S(n,k) is an integer only for
b = n = k = 1 (any a, value 1) and (a, b, n, k) = (1, 1, 3, 2) (value 1).
`decide` answers either instantly from that exception set ("theorem" mode)
or with independently checkable evidence ("certify" mode), trying cheap
certificates before exact computation:

  exceptional case -> k = 1 partial sum -> (0,1) threshold certificate ->
  witness prime valuation certificate -> exact value (n <= 5000).

A verdict whose evidence contradicts the classification is still reported
faithfully, with theorem_consistent = False raising the alarm.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import bounds, padic, primes
from .esf import esf, partial_sum
from .rational import is_integer, render

# Largest n for which the exact-computation fallback is attempted.
EXACT_FALLBACK_LIMIT = padic.EXHAUSTIVE_N_LIMIT

# Largest n for which the k = 1 decision attaches the exact partial sum.
K1_SUM_ATTACH_LIMIT = 100_000


@dataclass(frozen=True)
class Evidence:
    kind: str  # exceptional-case | valuation-certificate | bound-certificate
    #          | exact-value | k1-partial-sum
    which: str | None = None
    value: str | None = None
    certificate: padic.ValuationCertificate | None = None
    report: bounds.ThresholdReport | None = None

    def to_payload(self) -> dict:
        out: dict = {"kind": self.kind}
        if self.which is not None:
            out["which"] = self.which
        if self.value is not None:
            out["value"] = self.value
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_json_dict()
        if self.report is not None:
            out["report"] = self.report.to_payload()
        return out


@dataclass(frozen=True)
class Decision:
    verdict: str  # "integer" | "non-integer"
    evidence: Evidence | None
    theorem_consistent: bool
    certified: bool
    note: str | None = None

    def to_payload(self) -> dict:
        return {
            "verdict": self.verdict,
            "evidence": self.evidence.to_payload() if self.evidence else None,
            "theorem_consistent": self.theorem_consistent,
            "certified": self.certified,
            "note": self.note,
        }


def exceptional_case(a: int, b: int, n: int, k: int) -> str | None:
    """Name of the integer-valued exception covering (a,b,n,k), if any."""
    if b == 1 and n == 1 and k == 1:
        return "b1n1k1"
    if (a, b, n, k) == (1, 1, 3, 2):
        return "a1b1n3k2"
    return None


def classification_verdict(a: int, b: int, n: int, k: int) -> str:
    return "integer" if exceptional_case(a, b, n, k) else "non-integer"


def find_witness_certificate(a: int, b: int, n: int, k: int) -> padic.ValuationCertificate | None:
    """Scan (n/(k+1), n/k] ascending for a prime meeting the size condition."""
    p = primes.find_interval_prime(n, k)
    hi = n // k
    while p is not None and p <= hi:
        if p * p > p * (a * k + 2 * a) + 2 * b:
            return padic.make_certificate(a, b, n, k, p)
        p = primes.next_prime(p)
    return None


def _validated(a: int, b: int, n: int, k: int) -> None:
    if a < 1 or b < 1:
        raise ValueError("progression parameters must satisfy a >= 1, b >= 1")
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")


def decide_k1(a: int, b: int, n: int) -> Decision:
    """k = 1: n = 1 reduces to 1/b; n >= 2 partial sums are never integers."""
    _validated(a, b, n, 1)
    if n == 1:
        if b == 1:
            ev = Evidence(kind="exceptional-case", which="b1n1k1", value="1")
            return Decision("integer", ev, theorem_consistent=True, certified=True)
        ev = Evidence(kind="k1-partial-sum", value=render(partial_sum(a, b, 1)))
        return Decision("non-integer", ev, theorem_consistent=True, certified=True)
    if n <= K1_SUM_ATTACH_LIMIT:
        value = partial_sum(a, b, n)
        ev = Evidence(kind="k1-partial-sum", value=render(value))
        consistent = not is_integer(value)
        return Decision("non-integer" if consistent else "integer",
                        ev, theorem_consistent=consistent, certified=True)
    ev = Evidence(kind="k1-partial-sum")
    return Decision("non-integer", ev, theorem_consistent=True, certified=True,
                    note=f"partial sum omitted for n > {K1_SUM_ATTACH_LIMIT}")


def decide(a: int, b: int, n: int, k: int, mode: str = "certify") -> Decision:
    """Integer / non-integer verdict, with evidence in certify mode."""
    _validated(a, b, n, k)
    if mode not in ("theorem", "certify"):
        raise ValueError(f"unknown decision mode: {mode!r}")

    which = exceptional_case(a, b, n, k)
    if mode == "theorem":
        if which:
            ev = Evidence(kind="exceptional-case", which=which, value="1")
            return Decision("integer", ev, theorem_consistent=True, certified=True)
        return Decision("non-integer", None, theorem_consistent=True, certified=True)

    if which:
        ev = Evidence(kind="exceptional-case", which=which,
                      value=render(esf(a, b, n, k)))
        return Decision("integer", ev, theorem_consistent=True, certified=True)

    if k == 1:
        return decide_k1(a, b, n)

    report = bounds.below_one_report(a, b, n, k)
    if report.certifies:
        return Decision("non-integer", Evidence(kind="bound-certificate", report=report),
                        theorem_consistent=True, certified=True)

    cert = find_witness_certificate(a, b, n, k)
    if cert is not None:
        return Decision("non-integer",
                        Evidence(kind="valuation-certificate", certificate=cert),
                        theorem_consistent=True, certified=True)

    if n <= EXACT_FALLBACK_LIMIT:
        value = esf(a, b, n, k)
        integral = is_integer(value)
        verdict = "integer" if integral else "non-integer"
        consistent = verdict == classification_verdict(a, b, n, k)
        return Decision(verdict, Evidence(kind="exact-value", value=render(value)),
                        theorem_consistent=consistent, certified=True)

    return Decision(classification_verdict(a, b, n, k), None,
                    theorem_consistent=True, certified=False,
                    note="no desk-scale certificate: n exceeds the exact-computation "
                         "ceiling and no qualifying witness prime was found")

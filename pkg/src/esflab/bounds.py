"""Certified analytic threshold predicates, evaluated with outward rounding.

Two closed-form thresholds control where S(n,k) is forced into (0, 1):

* small-n: n <= (b/a) * (exp(a*(sqrt(2b^2+1)-1)/b) - 1)
* large-k: k >= (e/a) * ln((a*n+b)/b) + e/b

and a third cutoff decides which regime guarantees a witness prime for the
non-threshold cases: n > 120000 when a <= 18 and b is below a small-b
ceiling, n above the small-n threshold otherwise.

All transcendental evaluation happens in mpmath interval arithmetic on a
widening precision ladder, and a predicate only reports True when the
inequality holds against the unfavorable interval endpoint, so True is
always certified; False near a boundary may mean "inconclusive", and
callers fall through to exact computation. Endpoint pairs are memoized:
sweep-scale callers hit the same (a, b) and (a, b, n) combinations
millions of times.
"""

from __future__ import annotations

from contextlib import contextmanager
from dataclasses import dataclass
from functools import lru_cache

import mpmath
from mpmath import iv, mpf

from . import primes

_PREC_LADDER = (80, 160, 320, 640, 1280)

# n-cutoff for the small-(a,b) regime of the witness-prime guarantee.
SMALL_REGIME_N_CUTOFF = 120000
SMALL_REGIME_A_MAX = 18

# Uniform cap on b in the a >= 2 exhaustive sweeps.
SWEEP_B_CAP = 27

# Per-a sweep thresholds as published alongside the k/i_k schedule; the
# recomputation from the definition differs for some a (see
# sweep_n_threshold), so sweeps run to the max of the two.
PUBLISHED_SWEEP_N = {
    2: 4437, 3: 2086, 4: 1397, 5: 1143, 6: 550, 7: 640,
    8: 588, 9: 515, 10: 571, 11: 627, 12: 516,
}


@contextmanager
def _iv_precision(bits: int):
    old = iv.prec
    iv.prec = bits
    try:
        yield
    finally:
        iv.prec = old


@lru_cache(maxsize=65536)
def small_n_endpoints(a: int, b: int, prec: int) -> tuple:
    """Outward enclosure of (b/a) * (exp(a*(sqrt(2b^2+1)-1)/b) - 1)."""
    with _iv_precision(prec):
        ai, bi = iv.mpf(a), iv.mpf(b)
        x = bi / ai * (iv.exp(ai * (iv.sqrt(2 * bi * bi + 1) - 1) / bi) - 1)
        return mpf(x.a), mpf(x.b)


@lru_cache(maxsize=65536)
def large_k_endpoints(a: int, b: int, n: int, prec: int) -> tuple:
    """Outward enclosure of (e/a) * ln((a*n+b)/b) + e/b."""
    with _iv_precision(prec):
        ai, bi = iv.mpf(a), iv.mpf(b)
        x = iv.e / ai * iv.log((ai * iv.mpf(n) + bi) / bi) + iv.e / bi
        return mpf(x.a), mpf(x.b)


@lru_cache(maxsize=1024)
def small_b_ceiling_endpoints(a: int, prec: int) -> tuple:
    """Outward enclosure of 3275*a*(sqrt(2)*e + 1)/(e^a - 1) + 1."""
    with _iv_precision(prec):
        ai = iv.mpf(a)
        x = 3275 * ai * (iv.sqrt(iv.mpf(2)) * iv.e + 1) / (iv.exp(ai) - 1) + 1
        return mpf(x.a), mpf(x.b)


def _cmp_le(value: int, lo, hi) -> bool | None:
    """Certified value <= enclosed quantity; None if the enclosure straddles."""
    if value <= lo:
        return True
    if value > hi:
        return False
    return None


def _cmp_ge(value: int, lo, hi) -> bool | None:
    if value >= hi:
        return True
    if value < lo:
        return False
    return None


def _cmp_gt(value: int, lo, hi) -> bool | None:
    if value > hi:
        return True
    if value <= lo:
        return False
    return None


def _cmp_lt(value: int, lo, hi) -> bool | None:
    if value < lo:
        return True
    if value >= hi:
        return False
    return None


@dataclass(frozen=True)
class ThresholdReport:
    """Outcome of the (0,1)-confinement thresholds for one (a,b,n,k)."""

    small_n_bound: float
    large_k_bound: float
    small_regime: bool
    large_k_regime: bool
    rounding_mode: str  # "outward-certified" | "inconclusive"

    @property
    def certifies(self) -> bool:
        """True when either flag certifies 0 < S(n,k) < 1."""
        return self.small_regime or self.large_k_regime

    def to_payload(self) -> dict:
        return {
            "small_n_bound": self.small_n_bound,
            "large_k_bound": self.large_k_bound,
            "small_regime": self.small_regime,
            "large_k_regime": self.large_k_regime,
            "rounding_mode": self.rounding_mode,
        }


def below_one_report(a: int, b: int, n: int, k: int,
                     min_prec: int = _PREC_LADDER[0]) -> ThresholdReport:
    """Evaluate both (0,1)-confinement thresholds for 2 <= k <= n.

    A True flag is a certified sufficient condition for 0 < S(n,k) < 1
    (hence non-integrality). Boundary-straddling cases report both flags
    False with rounding_mode "inconclusive" and are expected to fall
    through to an exact decision.
    """
    if a < 1 or b < 1:
        raise ValueError("progression parameters must satisfy a >= 1, b >= 1")
    if not 2 <= k <= n:
        raise ValueError(f"thresholds apply for 2 <= k <= n, got k={k}, n={n}")
    if min_prec > _PREC_LADDER[-1]:
        raise ValueError(f"min_prec above the ladder maximum {_PREC_LADDER[-1]}")
    small = large = None
    b1 = b2 = None
    for prec in _PREC_LADDER:
        if prec < min_prec:
            continue
        b1 = small_n_endpoints(a, b, prec)
        b2 = large_k_endpoints(a, b, n, prec)
        if small is None:
            small = _cmp_le(n, *b1)
        if large is None:
            large = _cmp_ge(k, *b2)
        if small is not None and large is not None:
            return ThresholdReport(
                small_n_bound=float((b1[0] + b1[1]) / 2),
                large_k_bound=float((b2[0] + b2[1]) / 2),
                small_regime=small,
                large_k_regime=large,
                rounding_mode="outward-certified",
            )
    return ThresholdReport(
        small_n_bound=float((b1[0] + b1[1]) / 2),
        large_k_bound=float((b2[0] + b2[1]) / 2),
        small_regime=bool(small),
        large_k_regime=bool(large),
        rounding_mode="inconclusive",
    )


def small_parameter_regime(a: int, b: int) -> bool:
    """Certified test for a <= 18 and b below the small-b ceiling."""
    if a > SMALL_REGIME_A_MAX:
        return False
    for prec in _PREC_LADDER:
        verdict = _cmp_le(b, *small_b_ceiling_endpoints(a, prec))
        if verdict is not None:
            return verdict
    raise ArithmeticError(
        f"small-b ceiling for a={a} undecidable against b={b} at 1280 bits"
    )


def witness_regime(a: int, b: int, n: int, k: int) -> bool:
    """Certified hypotheses under which a witness prime is guaranteed.

    True iff k is strictly below the large-k threshold and n strictly
    exceeds the regime cutoff (120000 in the small-(a,b) regime, the
    small-n threshold otherwise). Evaluation is outward-rounded, so True
    is certified; a straddling comparison yields False.
    """
    if a < 1 or b < 1 or n < 1 or k < 1:
        raise ValueError("witness_regime expects positive integers")
    k_ok = None
    for prec in _PREC_LADDER:
        k_ok = _cmp_lt(k, *large_k_endpoints(a, b, n, prec))
        if k_ok is not None:
            break
    if not k_ok:
        return False
    if small_parameter_regime(a, b):
        return n > SMALL_REGIME_N_CUTOFF
    n_ok = None
    for prec in _PREC_LADDER:
        n_ok = _cmp_gt(n, *small_n_endpoints(a, b, prec))
        if n_ok is not None:
            break
    return bool(n_ok)


def _certified_floor(endpoints_fn) -> int:
    """floor of a transcendental expression, widening until unambiguous."""
    for prec in _PREC_LADDER:
        lo, hi = endpoints_fn(prec)
        flo, fhi = mpmath.floor(lo), mpmath.floor(hi)
        if flo == fhi:
            return int(flo)
    raise ArithmeticError("floor undecidable at 1280 bits of precision")


def sweep_k_limit(a: int) -> int:
    """Largest k the a >= 2 sweeps must cover:
    floor((e/a) * ln(120000*a + 1) + e)."""
    if not 2 <= a <= 12:
        raise ValueError("sweep k-limit is defined for a in [2, 12]")

    def endpoints(prec):
        with _iv_precision(prec):
            ai = iv.mpf(a)
            x = iv.e / ai * iv.log(iv.mpf(SMALL_REGIME_N_CUTOFF) * ai + 1) + iv.e
            return mpf(x.a), mpf(x.b)

    return _certified_floor(endpoints)


def admissible_b_max(a: int) -> int:
    """Largest b the a >= 2 sweeps must cover:
    min(27, floor(small-b ceiling))."""
    if not 2 <= a <= 12:
        raise ValueError("admissible b range is defined for a in [2, 12]")
    return min(SWEEP_B_CAP,
               _certified_floor(lambda prec: small_b_ceiling_endpoints(a, prec)))


def sweep_n_threshold(a: int, b_max: int, table: primes.PrimeScheduleTable) -> int:
    """Recompute the per-a sweep threshold from its definition:

    max(k_a * p_{i_{k_a}},  a*(k_a+1)*(k_a+2) + ceil(2*b_max*(k_a+1)/p_{i_{k_a}}))

    evaluated at the worst admissible b.
    """
    ka = sweep_k_limit(a)
    _, pik = table.row(ka)
    ceil_term = -(-2 * b_max * (ka + 1) // pik)
    return max(ka * pik, a * (ka + 1) * (ka + 2) + ceil_term)


@dataclass(frozen=True)
class SweepThreshold:
    """Published vs recomputed per-a sweep threshold; sweeps use the max."""

    a: int
    published: int
    recomputed: int

    @property
    def used(self) -> int:
        return max(self.published, self.recomputed)

    @property
    def discrepant(self) -> bool:
        return self.published != self.recomputed


def operational_sweep_threshold(a: int, table: primes.PrimeScheduleTable) -> SweepThreshold:
    recomputed = sweep_n_threshold(a, admissible_b_max(a), table)
    return SweepThreshold(a=a, published=PUBLISHED_SWEEP_N[a], recomputed=recomputed)

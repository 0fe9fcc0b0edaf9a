"""Prime infrastructure: sieve, deterministic primality, gap-bound search,
interval prime finders, and the consecutive-prime-ratio schedule table.

The schedule table is the backbone of the large-n argument: for each k in
[2, 34] it records the first prime index i_k from which every pair of
consecutive primes up to the sieve limit satisfies p_{i+1}/p_i < (k+1)/k.
From that index on, every interval (n/(k+1), n/k] with k*p_{i_k} <= n <=
sieve_limit is guaranteed to contain a prime, which `schedule_prime`
constructs explicitly.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field

from mpmath import iv, mpf

# Deterministic Miller-Rabin witness set, valid for all n < 3.3e24 > 2^64.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_IS_PRIME_LIMIT = 2**64

# Gap-bound threshold: for real x >= 3275 the interval
# (x, x*(1 + 1/(2*ln^2 x))] always contains a prime (Dusart).
DUSART_MIN_X = 3275

SCHEDULE_K_MIN = 2
SCHEDULE_K_MAX = 34
DEFAULT_SIEVE_LIMIT = 120000


class ClaimFailure(RuntimeError):
    """A prime the schedule table guarantees was not found; fatal."""


class DusartBoundViolation(RuntimeError):
    """The next prime exceeded the certified gap bound; fatal inconsistency."""


def sieve(limit: int) -> list[int]:
    """All primes <= limit, ascending (Eratosthenes, bytearray flags)."""
    if limit < 2:
        raise ValueError("sieve limit must be >= 2")
    flags = bytearray([1]) * (limit + 1)
    flags[0] = flags[1] = 0
    for i in range(2, math.isqrt(limit) + 1):
        if flags[i]:
            flags[i * i :: i] = bytes(len(range(i * i, limit + 1, i)))
    return [i for i, f in enumerate(flags) if f]


def is_prime(m: int) -> bool:
    """Deterministic primality for 1 <= m <= 2**64 (fixed witness set)."""
    if m < 1:
        raise ValueError("is_prime expects a positive integer")
    if m > _IS_PRIME_LIMIT:
        raise ValueError("is_prime is only certified up to 2**64")
    if m < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if m % p == 0:
            return m == p
    d = m - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, m)
        if x == 1 or x == m - 1:
            continue
        for _ in range(s - 1):
            x = x * x % m
            if x == m - 1:
                break
        else:
            return False
    return True


def next_prime(m: int) -> int:
    """Smallest prime strictly greater than m."""
    c = m + 1
    if c <= 2:
        return 2
    if c % 2 == 0:
        c += 1
    while not is_prime(c):
        c += 2
    return c


def dusart_next(x) -> int:
    """Smallest prime p > x, for real x >= 3275; asserts the gap bound.

    The bound p <= x*(1 + 1/(2*ln^2 x)) is checked with outward-rounded
    interval arithmetic, widening precision until the comparison is
    unambiguous. A genuine violation would falsify the underlying result,
    so it raises DusartBoundViolation instead of returning.
    """
    if x < DUSART_MIN_X:
        raise ValueError(f"dusart_next requires x >= {DUSART_MIN_X}")
    # next_prime(floor(x)) > floor(x), and any integer > floor(x) is > x
    p = next_prime(math.floor(x))
    for prec in (80, 160, 320, 640, 1280):
        old = iv.prec
        iv.prec = prec
        try:
            xi = iv.mpf(x)
            rhs = xi * (1 + 1 / (2 * iv.log(xi) ** 2))
            lo, hi = mpf(rhs.a), mpf(rhs.b)
        finally:
            iv.prec = old
        if p <= lo:
            return p
        if p > hi:
            raise DusartBoundViolation(
                f"next prime {p} above {x} exceeds the certified gap bound"
            )
    raise DusartBoundViolation(
        f"gap bound for x={x} could not be certified at 1280 bits"
    )


def find_interval_prime(n: int, k: int) -> int | None:
    """Smallest prime p with n/(k+1) < p <= n/k, or None.

    Membership is decided by integer cross-multiplication (p*(k+1) > n and
    p*k <= n) so the boundary case p = n/k is included exactly.
    """
    if n < 1 or k < 1:
        raise ValueError("n and k must be positive")
    lo = n // (k + 1) + 1  # least integer > n/(k+1)
    hi = n // k  # greatest integer <= n/k
    if lo > hi:
        return None
    p = lo if (lo >= 2 and is_prime(lo)) else next_prime(lo)
    return p if p <= hi else None


@dataclass(frozen=True)
class PrimeScheduleTable:
    """Rows (k, i_k, p_{i_k}) for k in [2, 34] plus sieve metadata.

    For each k, i_k is the minimal 1-based prime index such that
    k*p_{i+1} < (k+1)*p_i for every i from i_k through max_index, where
    p_{max_index} is the largest prime <= sieve_limit. Equivalently: from
    p_{i_k} on, consecutive prime ratios stay below (k+1)/k throughout the
    sieved range.
    """

    rows: tuple[tuple[int, int, int], ...]
    sieve_limit: int
    max_index: int
    max_prime: int
    primes: tuple[int, ...] = field(repr=False)

    def row(self, k: int) -> tuple[int, int]:
        """(i_k, p_{i_k}) for the given k."""
        if not SCHEDULE_K_MIN <= k <= SCHEDULE_K_MAX:
            raise KeyError(f"schedule table covers k in [2, 34], got {k}")
        _, ik, pik = self.rows[k - SCHEDULE_K_MIN]
        return ik, pik

    def to_csv(self) -> str:
        lines = ["k,i_k,p_ik"]
        lines += [f"{k},{ik},{pik}" for k, ik, pik in self.rows]
        return "\n".join(lines) + "\n"

    def render_text(self) -> str:
        """Three 11-column bands (k / i_k / p_ik), eyeball-diffable."""
        out = []
        for start in range(0, len(self.rows), 11):
            band = self.rows[start : start + 11]
            for label, idx in (("k", 0), ("i_k", 1), ("p_ik", 2)):
                cells = "".join(f"{row[idx]:>6}" for row in band)
                out.append(f"{label:>5} |{cells}")
            out.append("")
        return "\n".join(out)


def build_schedule_table(sieve_limit: int = DEFAULT_SIEVE_LIMIT) -> PrimeScheduleTable:
    """Compute the (k, i_k, p_{i_k}) schedule against all primes <= limit.

    The gap condition at the very last index compares the final sieved
    prime with its successor, so one extra prime beyond the limit is
    located by direct primality testing.
    """
    if sieve_limit < 1000:
        raise ValueError("schedule table needs sieve_limit >= 1000")
    primes = sieve(sieve_limit)
    max_index = len(primes)
    extended = primes + [next_prime(primes[-1])]
    # For the pair (p_i, p_{i+1}): k*p_{i+1} < (k+1)*p_i holds iff
    # k*(p_{i+1}-p_i) < p_i, i.e. k <= (p_i - 1) // gap.
    pair_k_cap = [
        (extended[i] - 1) // (extended[i + 1] - extended[i])
        for i in range(max_index)
    ]
    suffix_cap = [0] * (max_index + 1)
    suffix_cap[max_index] = 10**9
    running = 10**9
    for i in range(max_index - 1, -1, -1):
        running = min(running, pair_k_cap[i])
        suffix_cap[i] = running
    rows = []
    for k in range(SCHEDULE_K_MIN, SCHEDULE_K_MAX + 1):
        lo, hi = 0, max_index
        while lo < hi:
            mid = (lo + hi) // 2
            if suffix_cap[mid] >= k:
                hi = mid
            else:
                lo = mid + 1
        ik = lo + 1  # 1-based prime index
        if ik > max_index:
            raise ClaimFailure(f"no admissible schedule index for k={k}")
        pik = primes[ik - 1]
        # Minimality: the pair just before i_k must violate the ratio bound.
        if ik >= 2 and k * pik < (k + 1) * primes[ik - 2]:
            raise ClaimFailure(f"schedule index for k={k} is not minimal")
        rows.append((k, ik, pik))
    return PrimeScheduleTable(
        rows=tuple(rows),
        sieve_limit=sieve_limit,
        max_index=max_index,
        max_prime=primes[-1],
        primes=tuple(primes),
    )


def schedule_prime(k: int, n: int, table: PrimeScheduleTable) -> int:
    """A prime p >= p_{i_k} with n/(k+1) < p <= n/k, for k*p_{i_k} <= n <= limit.

    Construction: p_{i_k} itself when it already exceeds n/(k+1); otherwise
    the successor of the largest prime <= n/(k+1), which the ratio property
    forces into the interval. Failure would falsify the schedule claim, so
    it raises ClaimFailure rather than returning None.
    """
    ik, pik = table.row(k)
    if not k * pik <= n <= table.sieve_limit:
        raise ValueError(f"schedule_prime needs {k*pik} <= n <= {table.sieve_limit}")
    if pik * (k + 1) > n:
        p = pik
    else:
        # largest prime <= n/(k+1): p_i*(k+1) <= n < p_{i+1}*(k+1)
        idx = bisect_right(table.primes, n // (k + 1))
        if idx >= table.max_index:
            raise ClaimFailure(f"interval search ran off the sieve at k={k}, n={n}")
        p = table.primes[idx]
    if not (p * (k + 1) > n and p * k <= n and p >= pik):
        raise ClaimFailure(f"no scheduled prime in (n/(k+1), n/k] for k={k}, n={n}")
    return p


def scan_schedule_claim(table: PrimeScheduleTable) -> int:
    """Exhaustively verify schedule_prime for every k in [2,34] and every
    n in [k*p_{i_k}, sieve_limit]; returns the number of cells checked.

    Inlines the per-n construction with a monotone index pointer so the
    ~3.9M checks stay fast; any failure raises ClaimFailure.
    """
    checked = 0
    primes = table.primes
    for k in range(SCHEDULE_K_MIN, SCHEDULE_K_MAX + 1):
        ik, pik = table.row(k)
        idx = 0  # 1-based index i of the largest prime with p_i*(k+1) <= n
        for n in range(k * pik, table.sieve_limit + 1):
            if pik * (k + 1) > n:
                p = pik
            else:
                while idx < table.max_index and primes[idx] * (k + 1) <= n:
                    idx += 1
                # primes[idx-1] is the largest prime <= n/(k+1)
                if idx >= table.max_index:
                    raise ClaimFailure(f"sieve exhausted at k={k}, n={n}")
                p = primes[idx]
            if not (p * (k + 1) > n and p * k <= n and p >= pik):
                raise ClaimFailure(f"schedule claim fails at k={k}, n={n}")
            checked += 1
    return checked

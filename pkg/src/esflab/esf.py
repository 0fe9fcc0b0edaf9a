"""Exact elementary symmetric functions of 1/b, 1/(a+b), ..., 1/(a(n-1)+b).

Two routes to the same values:

* `esf` / `EsfState.advance`, the streaming recurrence used everywhere in
  production: consuming the term 1/(b+a*n) maps the length-kmax vector
  (S(n,1), ..., S(n,kmax)) to (S(n+1,1), ..., S(n+1,kmax)) in O(kmax)
  rational operations.
* `esf_direct`, literal summation over k-element subsets, kept small by an
  enumeration guard; it exists purely as an independent oracle for the
  recurrence.
"""

from __future__ import annotations

from itertools import combinations

from gmpy2 import mpq

from .rational import Rational, parse, render

# Ceiling for subset enumeration: C(25,12) ~ 5.2e6 subsets is the most the
# oracle is ever asked to grind through.
MAX_ENUM_N = 25

CHECKPOINT_TAG = "esfstate/1"


def _check_params(a: int, b: int) -> None:
    if a < 1 or b < 1:
        raise ValueError("progression parameters must satisfy a >= 1, b >= 1")


def esf_direct(a: int, b: int, n: int, k: int) -> Rational:
    """k-th elementary symmetric function by brute subset enumeration.

    Exact but exponential; refuses n > MAX_ENUM_N.
    """
    _check_params(a, b)
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    if n > MAX_ENUM_N:
        raise ValueError(f"esf_direct enumeration guard: n <= {MAX_ENUM_N}")
    dens = [b + a * i for i in range(n)]
    total = mpq(0)
    for combo in combinations(dens, k):
        prod = 1
        for d in combo:
            prod *= d
        total += mpq(1, prod)
    return total


class EsfState:
    """Streaming vector of S(n, 1..kmax) for fixed (a, b).

    Mutable and single-owner while a chain is being advanced; use `copy()`
    for immutable snapshots. Entries with k > n are exactly zero.
    """

    __slots__ = ("a", "b", "n", "kmax", "values")

    def __init__(self, a: int, b: int, kmax: int):
        _check_params(a, b)
        if kmax < 1:
            raise ValueError("kmax must be >= 1")
        self.a = a
        self.b = b
        self.kmax = kmax
        self.n = 0
        self.values: list[Rational] = [mpq(0)] * kmax

    def advance(self) -> None:
        """Consume the term 1/(b + a*n), stepping the vector to n+1.

        Updates run k-descending so every read sees the pre-update entry.
        """
        term = mpq(1, self.b + self.a * self.n)
        values = self.values
        hi = min(self.kmax, self.n + 1)
        for k in range(hi, 1, -1):
            values[k - 1] = values[k - 1] + values[k - 2] * term
        values[0] = values[0] + term
        self.n += 1

    def value(self, k: int) -> Rational:
        """S(n, k) for 1 <= k <= kmax (zero when k > n)."""
        if not 1 <= k <= self.kmax:
            raise ValueError(f"k must be in [1, {self.kmax}]")
        return self.values[k - 1]

    def copy(self) -> "EsfState":
        dup = EsfState(self.a, self.b, self.kmax)
        dup.n = self.n
        dup.values = list(self.values)
        return dup

    def checkpoint_text(self) -> str:
        """Newline-delimited record: tag, a, b, n, kmax, then kmax rationals."""
        lines = [CHECKPOINT_TAG, str(self.a), str(self.b), str(self.n), str(self.kmax)]
        lines += [render(v) for v in self.values]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_checkpoint_text(cls, text: str) -> "EsfState":
        lines = text.splitlines()
        if len(lines) < 5 or lines[0] != CHECKPOINT_TAG:
            raise ValueError("not an EsfState checkpoint record")
        a, b, n, kmax = (int(s) for s in lines[1:5])
        if len(lines) != 5 + kmax:
            raise ValueError("checkpoint record has wrong rational count")
        state = cls(a, b, kmax)
        state.n = n
        state.values = [parse(s) for s in lines[5 : 5 + kmax]]
        return state


def esf(a: int, b: int, n: int, k: int) -> Rational:
    """S(n, k) via the streaming recurrence (n advances, vector capped at k)."""
    _check_params(a, b)
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    state = EsfState(a, b, kmax=k)
    for _ in range(n):
        state.advance()
    return state.value(k)


def esf_row(a: int, b: int, n: int, kmax: int) -> list[Rational]:
    """The full vector [S(n,1), ..., S(n,kmax)] after n terms."""
    _check_params(a, b)
    if n < 0 or kmax < 1:
        raise ValueError("need n >= 0 and kmax >= 1")
    state = EsfState(a, b, kmax)
    for _ in range(n):
        state.advance()
    return list(state.values)


def partial_sum(a: int, b: int, n: int) -> Rational:
    """S(n, 1) = sum of the first n reciprocals, computed directly."""
    _check_params(a, b)
    total = mpq(0)
    for i in range(n):
        total += mpq(1, b + a * i)
    return total

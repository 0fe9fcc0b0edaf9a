"""Exhaustive integrality sweeps over (a, b, n, k) boxes.

A sweep runs one streaming chain per (a, b) pair and tests every cell
S(n, k) for integrality. Chains are independent and can run in parallel;
each can checkpoint its live vector periodically and resume bit-exactly.

The hot loop uses shared-denominator accumulation: the whole vector is
kept as integer numerators over one running denominator (the product of
consumed terms, gcd-reduced every few hundred steps), so stepping costs
only big-by-small integer multiplies and the integrality test is a single
divisibility check. Hits and checkpoints are always surfaced as reduced
fractions; equivalence with the public reduced-form recurrence is enforced
by in-run sampling against the enumeration oracle and by the test suite.
"""

from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import gmpy2
from gmpy2 import mpq, mpz

from . import bounds, padic, primes
from .decider import find_witness_certificate
from .esf import MAX_ENUM_N, EsfState, esf_direct

PROGRAM2_B_MAX = 44
PROGRAM2_N_MAX = 7612
PROGRAM2_K_MAX = 23

SMOKE_N_MAX = 500
DEFAULT_CHECKPOINT_EVERY = 500

# Periodic gcd reduction cadence for the shared-denominator accumulator.
_REDUCE_EVERY = 256

# In-run validation cadences: enumeration cross-checks fire on every 100th
# visited cell within the oracle's n <= 25 domain (skipping cells whose
# subset count would make a single check dominate the sweep); certificate
# sampling on every 1000th non-integer cell.
_CROSSCHECK_STRIDE = 100
_CROSSCHECK_MAX_SUBSETS = 100_000
_CERT_SAMPLE_STRIDE = 1000


class SweepConsistencyError(RuntimeError):
    """An in-run cross-check failed; the sweep's arithmetic is suspect."""


@dataclass(frozen=True)
class SweepSpec:
    """A rectangular sweep box. k_min = 1 includes the first-column cells."""

    a_range: tuple[int, int]
    b_range: tuple[int, int]
    n_max: int
    k_max: int
    k_min: int = 1
    checkpoint_dir: str | None = None
    checkpoint_every: int = DEFAULT_CHECKPOINT_EVERY

    def validate(self) -> None:
        a_lo, a_hi = self.a_range
        b_lo, b_hi = self.b_range
        if a_lo < 1 or a_hi < a_lo:
            raise ValueError(f"empty or invalid a range {self.a_range}")
        if b_lo < 1 or b_hi < b_lo:
            raise ValueError(f"empty or invalid b range {self.b_range}")
        if self.n_max < 1:
            raise ValueError("n_max must be >= 1")
        if not 1 <= self.k_min <= self.k_max:
            raise ValueError("need 1 <= k_min <= k_max")
        if self.checkpoint_every < 1:
            raise ValueError("checkpoint_every must be >= 1")


@dataclass(frozen=True)
class IntegerHit:
    a: int
    b: int
    n: int
    k: int
    value: str

    def key(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.n, self.k)


@dataclass
class SweepReport:
    program: str
    box: dict
    integer_hits: list[IntegerHit]
    expected_hits: list[tuple[int, int, int, int]]
    cells_checked: int
    chains: int
    crosschecks: int
    certificate_samples: int
    resumed_chains: int
    wall_time_s: float
    thresholds: list[dict] = field(default_factory=list)
    resumed_from: str | None = None

    @property
    def matches_expected(self) -> bool:
        return sorted(h.key() for h in self.integer_hits) == sorted(self.expected_hits)

    @property
    def theorem_consistent(self) -> bool:
        expected = set(self.expected_hits)
        return all(h.key() in expected for h in self.integer_hits)

    def to_payload(self) -> dict:
        return {
            "program": self.program,
            "box": self.box,
            "integer_hits": [
                {"a": h.a, "b": h.b, "n": h.n, "k": h.k, "value": h.value}
                for h in self.integer_hits
            ],
            "expected_hits": [list(key) for key in self.expected_hits],
            "matches_expected": self.matches_expected,
            "theorem_consistent": self.theorem_consistent,
            "cells_checked": self.cells_checked,
            "chains": self.chains,
            "crosschecks": self.crosschecks,
            "certificate_samples": self.certificate_samples,
            "resumed_chains": self.resumed_chains,
            "resumed_from": self.resumed_from,
            "thresholds": self.thresholds,
            "wall_time_s": self.wall_time_s,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_payload(), indent=2, sort_keys=True) + "\n"

    def hits_csv(self) -> str:
        lines = ["a,b,n,k,value"]
        lines += [f"{h.a},{h.b},{h.n},{h.k},{h.value}" for h in self.integer_hits]
        return "\n".join(lines) + "\n"


class _ChainAccumulator:
    """S(n, j) == nums[j] / den exactly for 1 <= j <= k_max (not reduced)."""

    __slots__ = ("a", "b", "k_max", "n", "nums", "den", "_steps_since_reduce")

    def __init__(self, a: int, b: int, k_max: int):
        self.a = a
        self.b = b
        self.k_max = k_max
        self.n = 0
        self.nums = [mpz(0)] * (k_max + 1)  # 1-based; slot 0 unused
        self.den = mpz(1)
        self._steps_since_reduce = 0

    @classmethod
    def from_state(cls, state: EsfState) -> "_ChainAccumulator":
        acc = cls(state.a, state.b, state.kmax)
        acc.n = state.n
        den = mpz(1)
        for v in state.values:
            den = gmpy2.lcm(den, mpq(v).denominator)
        acc.den = den
        for k in range(1, state.kmax + 1):
            v = mpq(state.values[k - 1])
            acc.nums[k] = v.numerator * (den // v.denominator)
        return acc

    def to_state(self) -> EsfState:
        state = EsfState(self.a, self.b, self.k_max)
        state.n = self.n
        state.values = [mpq(self.nums[k], self.den) for k in range(1, self.k_max + 1)]
        return state

    def advance(self) -> None:
        m = self.b + self.a * self.n
        nums = self.nums
        hi = min(self.k_max, self.n + 1)
        for k in range(hi, 1, -1):
            nums[k] = nums[k] * m + nums[k - 1]
        nums[1] = nums[1] * m + self.den
        # entries above hi are identically zero and stay so
        self.den = self.den * m
        self.n += 1
        self._steps_since_reduce += 1
        if self._steps_since_reduce >= _REDUCE_EVERY:
            self._reduce()

    def _reduce(self) -> None:
        g = self.den
        for k in range(1, min(self.k_max, self.n) + 1):
            g = gmpy2.gcd(g, self.nums[k])
            if g == 1:
                break
        if g > 1:
            self.den //= g
            for k in range(1, self.k_max + 1):
                self.nums[k] //= g
        self._steps_since_reduce = 0

    def integer_value(self, k: int) -> int | None:
        """The exact integer S(n,k) when integral, else None."""
        nk = self.nums[k]
        if nk >= self.den and nk % self.den == 0:
            return int(nk // self.den)
        return None

    def value(self, k: int):
        return mpq(self.nums[k], self.den)


def _chain_paths(checkpoint_dir: str, a: int, b: int) -> tuple[Path, Path]:
    root = Path(checkpoint_dir)
    return root / f"chain_a{a}_b{b}.state", root / f"chain_a{a}_b{b}.hits.jsonl"


def _load_journal_hits(path: Path, up_to_n: int) -> list[IntegerHit]:
    hits = []
    if path.exists():
        for line in path.read_text().splitlines():
            if not line.strip():
                continue
            rec = json.loads(line)
            if rec["n"] <= up_to_n:
                hits.append(IntegerHit(rec["a"], rec["b"], rec["n"], rec["k"],
                                       rec["value"]))
    return hits


def _run_chain(task: dict) -> dict:
    """Worker: sweep one (a, b) chain; returns hits and counters."""
    a, b = task["a"], task["b"]
    n_max, k_min, k_max = task["n_max"], task["k_min"], task["k_max"]
    checkpoint_dir = task.get("checkpoint_dir")
    checkpoint_every = task.get("checkpoint_every", DEFAULT_CHECKPOINT_EVERY)
    stop_at_n = task.get("stop_at_n")  # test hook: simulate a killed worker

    acc = _ChainAccumulator(a, b, k_max)
    hits: list[IntegerHit] = []
    resumed = False
    state_path = journal_path = None
    journal = None
    if checkpoint_dir is not None:
        state_path, journal_path = _chain_paths(checkpoint_dir, a, b)
        if state_path.exists():
            state = EsfState.from_checkpoint_text(state_path.read_text())
            if (state.a, state.b, state.kmax) != (a, b, k_max):
                raise ValueError(f"checkpoint {state_path} does not match chain "
                                 f"(a={a}, b={b}, kmax={k_max})")
            if state.n <= n_max:
                acc = _ChainAccumulator.from_state(state)
                hits = _load_journal_hits(journal_path, state.n)
                resumed = True
        # rewrite the journal to exactly the hits at or before the resume
        # point; anything later (or stale) is re-found by the chain itself
        with journal_path.open("w") as fh:
            for h in hits:
                fh.write(json.dumps({"a": h.a, "b": h.b, "n": h.n,
                                     "k": h.k, "value": h.value}) + "\n")
        journal = journal_path.open("a")

    cells = 0
    crosschecks = 0
    cert_attempts = 0
    cert_samples = 0
    cross_counter = 0
    noninteger_counter = 0
    killed = False
    try:
        while acc.n < n_max:
            if stop_at_n is not None and acc.n >= stop_at_n:
                killed = True  # simulate an abrupt worker death
                break
            acc.advance()
            n = acc.n
            for k in range(k_min, min(k_max, n) + 1):
                cells += 1
                whole = acc.integer_value(k)
                if whole is not None:
                    hit = IntegerHit(a, b, n, k, str(whole))
                    hits.append(hit)
                    if journal is not None:
                        journal.write(json.dumps({"a": a, "b": b, "n": n, "k": k,
                                                  "value": hit.value}) + "\n")
                        journal.flush()
                else:
                    noninteger_counter += 1
                    if noninteger_counter % _CERT_SAMPLE_STRIDE == 0:
                        cert_attempts += 1
                        cert = find_witness_certificate(a, b, n, k)
                        if cert is not None:
                            cert_samples += 1
                            v = padic.vp_rat(cert.p, acc.value(k))
                            if v != cert.claimed_valuation:
                                raise SweepConsistencyError(
                                    f"certificate valuation mismatch at "
                                    f"(a={a}, b={b}, n={n}, k={k}, p={cert.p}): "
                                    f"streaming value has v={v}, claimed {-k}"
                                )
                if n <= MAX_ENUM_N and math.comb(n, k) <= _CROSSCHECK_MAX_SUBSETS:
                    cross_counter += 1
                    if cross_counter % _CROSSCHECK_STRIDE == 0:
                        crosschecks += 1
                        if acc.value(k) != esf_direct(a, b, n, k):
                            raise SweepConsistencyError(
                                f"streaming value disagrees with enumeration "
                                f"at (a={a}, b={b}, n={n}, k={k})"
                            )
            if state_path is not None and n % checkpoint_every == 0:
                _atomic_write(state_path, acc.to_state().checkpoint_text())
        if state_path is not None and not killed:
            _atomic_write(state_path, acc.to_state().checkpoint_text())
    finally:
        if journal is not None:
            journal.close()

    # deduplicate (resume may have re-found journaled hits) and order
    unique = {h.key(): h for h in hits}
    ordered = [unique[key] for key in sorted(unique)]
    return {
        "a": a, "b": b, "cells": cells, "hits": ordered,
        "crosschecks": crosschecks, "cert_samples": cert_samples,
        "cert_attempts": cert_attempts, "resumed": resumed,
    }


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def _execute(tasks: list[dict], jobs: int) -> list[dict]:
    if jobs <= 1 or len(tasks) <= 1:
        return [_run_chain(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run_chain, tasks))


def expected_hits(a_range: tuple[int, int], b_range: tuple[int, int],
                  n_max: int, k_min: int, k_max: int) -> list[tuple[int, int, int, int]]:
    """The classification's prediction of every integer cell in the box."""
    out = []
    a_lo, a_hi = a_range
    b_lo, b_hi = b_range
    if b_lo <= 1 <= b_hi and n_max >= 1 and k_min <= 1 <= k_max:
        out += [(a, 1, 1, 1) for a in range(a_lo, a_hi + 1)]
    if a_lo <= 1 <= a_hi and b_lo <= 1 <= b_hi and n_max >= 3 and k_min <= 2 <= k_max:
        out.append((1, 1, 3, 2))
    return sorted(out)


def _aggregate(program: str, box: dict, results: list[dict],
               expected: list[tuple[int, int, int, int]],
               thresholds: list[dict], checkpoint_dir: str | None,
               t0: float) -> SweepReport:
    results = sorted(results, key=lambda r: (r["a"], r["b"]))
    hits: list[IntegerHit] = []
    for r in results:
        hits.extend(r["hits"])
    hits.sort(key=lambda h: h.key())
    resumed_chains = sum(1 for r in results if r["resumed"])
    return SweepReport(
        program=program,
        box=box,
        integer_hits=hits,
        expected_hits=expected,
        cells_checked=sum(r["cells"] for r in results),
        chains=len(results),
        crosschecks=sum(r["crosschecks"] for r in results),
        certificate_samples=sum(r["cert_samples"] for r in results),
        resumed_chains=resumed_chains,
        wall_time_s=round(time.time() - t0, 3),
        thresholds=thresholds,
        resumed_from=checkpoint_dir if resumed_chains else None,
    )


def run_program1(table: primes.PrimeScheduleTable | None = None, *, jobs: int = 1,
                 smoke: bool = False, checkpoint_dir: str | None = None,
                 checkpoint_every: int = DEFAULT_CHECKPOINT_EVERY) -> SweepReport:
    """The a in [2,12] sweep: every admissible b, n below the per-a
    threshold, 2 <= k <= per-a k limit. Expected integer hits: none."""
    t0 = time.time()
    if table is None:
        table = primes.build_schedule_table()
    tasks = []
    thresholds = []
    for a in range(2, 13):
        ka = bounds.sweep_k_limit(a)
        b_max = bounds.admissible_b_max(a)
        thr = bounds.operational_sweep_threshold(a, table)
        n_max = thr.used - 1
        if smoke:
            n_max = min(n_max, SMOKE_N_MAX)
        thresholds.append({
            "a": a, "k_limit": ka, "b_max": b_max,
            "n_published": thr.published, "n_recomputed": thr.recomputed,
            "n_used": thr.used, "discrepant": thr.discrepant,
        })
        for b in range(1, b_max + 1):
            tasks.append({"a": a, "b": b, "n_max": n_max, "k_min": 2, "k_max": ka,
                          "checkpoint_dir": checkpoint_dir,
                          "checkpoint_every": checkpoint_every})
    _prepare_checkpoint_dir(checkpoint_dir)
    results = _execute(tasks, jobs)
    box = {"a": [2, 12], "b": "per-a admissible", "n": "per-a threshold - 1",
           "k": "2..per-a limit", "smoke": smoke}
    return _aggregate("1", box, results, expected=[], thresholds=thresholds,
                      checkpoint_dir=checkpoint_dir, t0=t0)


def run_program2(*, jobs: int = 1, smoke: bool = False,
                 checkpoint_dir: str | None = None,
                 checkpoint_every: int = DEFAULT_CHECKPOINT_EVERY) -> SweepReport:
    """The a = 1 sweep: b in [1,44], n <= 7612, k in [2,23].
    Expected integer hits: exactly (1,1,3,2) with value 1."""
    t0 = time.time()
    n_max = SMOKE_N_MAX if smoke else PROGRAM2_N_MAX
    tasks = [{"a": 1, "b": b, "n_max": n_max, "k_min": 2, "k_max": PROGRAM2_K_MAX,
              "checkpoint_dir": checkpoint_dir, "checkpoint_every": checkpoint_every}
             for b in range(1, PROGRAM2_B_MAX + 1)]
    _prepare_checkpoint_dir(checkpoint_dir)
    results = _execute(tasks, jobs)
    box = {"a": [1, 1], "b": [1, PROGRAM2_B_MAX], "n": n_max,
           "k": [2, PROGRAM2_K_MAX], "smoke": smoke}
    expected = expected_hits((1, 1), (1, PROGRAM2_B_MAX), n_max, 2, PROGRAM2_K_MAX)
    return _aggregate("2", box, results, expected=expected, thresholds=[],
                      checkpoint_dir=checkpoint_dir, t0=t0)


def run_custom(spec: SweepSpec, *, jobs: int = 1) -> SweepReport:
    """Sweep an arbitrary box; k = 1 cells are tested like any other."""
    t0 = time.time()
    spec.validate()
    a_lo, a_hi = spec.a_range
    b_lo, b_hi = spec.b_range
    tasks = [{"a": a, "b": b, "n_max": spec.n_max, "k_min": spec.k_min,
              "k_max": spec.k_max, "checkpoint_dir": spec.checkpoint_dir,
              "checkpoint_every": spec.checkpoint_every}
             for a in range(a_lo, a_hi + 1) for b in range(b_lo, b_hi + 1)]
    _prepare_checkpoint_dir(spec.checkpoint_dir)
    results = _execute(tasks, jobs)
    box = {"a": list(spec.a_range), "b": list(spec.b_range), "n": spec.n_max,
           "k": [spec.k_min, spec.k_max]}
    expected = expected_hits(spec.a_range, spec.b_range, spec.n_max,
                             spec.k_min, spec.k_max)
    return _aggregate("custom", box, results, expected=expected,
                      thresholds=[], checkpoint_dir=spec.checkpoint_dir, t0=t0)


def _prepare_checkpoint_dir(checkpoint_dir: str | None) -> None:
    if checkpoint_dir is not None:
        Path(checkpoint_dir).mkdir(parents=True, exist_ok=True)

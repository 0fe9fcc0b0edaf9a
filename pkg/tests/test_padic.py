import json
import math
import random
from dataclasses import replace

import pytest
from gmpy2 import mpq
from hypothesis import given, strategies as st

from esflab.decider import find_witness_certificate
from esflab.esf import esf
from esflab.padic import (
    CertificateError,
    EXHAUSTIVE_N_LIMIT,
    ValuationCertificate,
    make_certificate,
    multiples_of_p,
    s1_partial_sum,
    verify_certificate,
    vp_int,
    vp_rat,
)


def vp_trial(p, m):
    """Independent trial-division valuation."""
    if m == 0:
        return math.inf
    m = abs(m)
    v = 0
    while m % p == 0:
        m //= p
        v += 1
    return v


def test_vp_int_examples():
    assert vp_int(5, 50) == 2
    assert vp_int(3, 7) == 0
    assert vp_int(2, -8) == 3
    assert vp_int(7, 0) == math.inf


def test_vp_int_random_against_trial_division():
    rng = random.Random(7)
    for _ in range(300):
        p = rng.choice([2, 3, 5, 7, 11, 13, 97])
        m = rng.randint(-10**9, 10**9)
        assert vp_int(p, m) == vp_trial(p, m)


def test_vp_rat_examples():
    assert vp_rat(5, mpq(1, 50)) == -2
    assert vp_rat(7, mpq(1, 2)) == 0
    assert vp_rat(5, esf(1, 1, 12, 2)) == -2
    assert vp_rat(3, mpq(0)) == math.inf


small_rationals = st.builds(mpq, st.integers(-10**6, 10**6), st.integers(1, 10**6))
nonzero_rationals = small_rationals.filter(lambda q: q != 0)


@given(small_rationals, small_rationals, st.sampled_from([2, 3, 5, 7, 11, 13]))
def test_ultrametric(qx, qy, p):
    vx, vy, vsum = vp_rat(p, qx), vp_rat(p, qy), vp_rat(p, qx + qy)
    if vx != vy:
        assert vsum == min(vx, vy)
    else:
        assert vsum >= min(vx, vy)


@given(nonzero_rationals, nonzero_rationals, st.sampled_from([2, 3, 5, 7, 11]))
def test_valuation_is_multiplicative(qx, qy, p):
    assert vp_rat(p, qx * qy) == vp_rat(p, qx) + vp_rat(p, qy)


def test_make_certificate_worked_case():
    cert = make_certificate(1, 1, 12, 2, 5)
    assert (cert.r, cert.a0, cert.claimed_valuation) == (4, 1, -2)
    assert cert.t in (-1, 0)
    assert cert.t == (-1 if 5 * (2 + cert.a0) > 11 + 1 else 0)


def test_make_certificate_rejects_small_prime():
    with pytest.raises(CertificateError, match="size condition"):
        make_certificate(1, 1, 7, 2, 3)


def test_make_certificate_rejects_off_interval():
    with pytest.raises(CertificateError, match="interval"):
        make_certificate(1, 1, 12, 2, 7)
    with pytest.raises(CertificateError, match="not prime"):
        make_certificate(1, 1, 12, 2, 6)


def test_make_certificate_wider_progression():
    cert = make_certificate(2, 1, 50, 2, 17)
    assert 50 // 3 < 17 <= 50 // 2
    assert verify_certificate(cert, "exhaustive").ok
    assert vp_rat(17, esf(2, 1, 50, 2)) == -2


def test_verify_modes_on_valid_certificate():
    cert = make_certificate(1, 1, 12, 2, 5)
    fast = verify_certificate(cert, "fast")
    assert fast.ok and fast.failed_clause is None
    full = verify_certificate(cert, "exhaustive")
    assert full.ok and full.recomputed_valuation == -2
    with pytest.raises(ValueError):
        verify_certificate(cert, "thorough")


def test_verify_names_failing_clauses():
    cert = make_certificate(2, 1, 50, 2, 17)
    cases = {
        replace(cert, p=16): "p-prime",
        replace(cert, p=11): "interval",
        replace(cert, t=cert.t + 1): "count-flag",
        replace(cert, r=cert.r + 1): "residue-divisibility",
        replace(cert, a0=cert.a0 + 1): "cofactor-value",
        replace(cert, claimed_valuation=-3): "claimed-valuation",
        replace(cert, n=5): "interval",
    }
    for tampered, clause in cases.items():
        result = verify_certificate(tampered)
        assert not result
        assert result.failed_clause == clause, (tampered, result)


def test_exhaustive_mode_ceiling():
    cert = make_certificate(1, 1, EXHAUSTIVE_N_LIMIT + 10, 2, 1871)
    assert verify_certificate(cert, "fast").ok
    with pytest.raises(ValueError, match="exhaustive"):
        verify_certificate(cert, "exhaustive")


def test_multiples_match_brute_force_scan():
    rng = random.Random(11)
    found = 0
    while found < 25:
        a, b = rng.randint(1, 12), rng.randint(1, 25)
        n = rng.randint(40, 400)
        k = rng.randint(2, 5)
        cert = find_witness_certificate(a, b, n, k)
        if cert is None:
            continue
        found += 1
        scan = [b + a * i for i in range(n) if (b + a * i) % cert.p == 0]
        assert scan == multiples_of_p(cert)
        assert len(scan) == cert.k + cert.t + 1


def test_soundness_randomized():
    # certificates over a randomized box; exact valuation equals the claim
    rng = random.Random(20260809)
    found = 0
    while found < 40:
        a, b = rng.randint(1, 18), rng.randint(1, 30)
        k = rng.randint(2, 6)
        n = rng.randint(30, 2000)
        cert = find_witness_certificate(a, b, n, k)
        if cert is None:
            continue
        found += 1
        result = verify_certificate(cert, "exhaustive")
        assert result.ok, (cert, result.failed_clause)


def test_s2_tail_valuation_bound():
    # v_p(S - S1) >= 1 - k for certified instances, exactly
    rng = random.Random(5)
    found = 0
    while found < 25:
        a, b = rng.randint(1, 10), rng.randint(1, 20)
        k = rng.randint(2, 5)
        n = rng.randint(30, 800)
        cert = find_witness_certificate(a, b, n, k)
        if cert is None:
            continue
        found += 1
        s = esf(a, b, n, k)
        s1 = s1_partial_sum(cert)
        assert vp_rat(cert.p, s1) == -k
        assert vp_rat(cert.p, s - s1) >= 1 - k


def test_certificate_json_round_trip():
    cert = make_certificate(1, 1, 12, 2, 5)
    blob = cert.to_json()
    data = json.loads(blob)
    assert data["generator_version"]
    assert all(isinstance(data[f], str) for f in
               ("a", "b", "n", "k", "p", "r", "a0", "t", "claimed_valuation"))
    assert ValuationCertificate.from_json(blob) == cert


def test_certificate_json_rejects_malformed():
    with pytest.raises(ValueError):
        ValuationCertificate.from_json("[1, 2, 3]")
    with pytest.raises(ValueError):
        ValuationCertificate.from_json(json.dumps({"a": "1", "b": "zz"}))

import math
import random

import pytest

from exunits.arith import is_prime
from exunits.errors import EllIsThree, FactorTimeout, PTooLarge, UnsupportedDegree
from exunits.sieve import (
    CandidateReport,
    candidate_conductors,
    common_root_check,
    compute_Rl,
    compute_Sl,
    compute_Sl_detailed,
    evertse_bound,
    residue_test,
)

ODD_PRIME_ELLS = (5, 7, 11, 13, 17, 19, 23, 29, 31)


def test_r5_value():
    assert compute_Rl(5) == -210736858987743


def test_r3_rejected():
    with pytest.raises(EllIsThree, match="R_3 = 0"):
        compute_Rl(3)


@pytest.mark.parametrize("ell", ODD_PRIME_ELLS)
def test_ell_does_not_divide_rl(ell):
    rl = compute_Rl(ell)
    assert rl != 0
    assert rl % ell != 0


def test_non_prime_ell():
    with pytest.raises(UnsupportedDegree):
        compute_Rl(9)
    with pytest.raises(UnsupportedDegree, match="Nagell"):
        compute_Sl(2)


def test_s5():
    assert compute_Sl(5) == [11, 31]
    assert 3 not in compute_Sl(5)


def test_s7_filter():
    res = compute_Sl_detailed(7)
    assert res.complete
    assert res.factorization.value() == res.Rl
    oracle = [p for p in res.factorization.primes() if p % 7 == 1]
    assert res.primes == oracle
    for p in res.primes:
        assert res.Rl % p == 0


def test_sl_incomplete_on_budget():
    res = compute_Sl_detailed(23, budget=1)
    assert not res.complete and res.cofactors
    assert all(res.Rl % p == 0 for p in res.primes)
    with pytest.raises(FactorTimeout):
        compute_Sl(23, budget=1)
    assert compute_Sl_detailed(23).complete


def test_candidates_ell5():
    rep = candidate_conductors(5)
    assert [c.conductor for c in rep.candidates] == [11, 31, 341]
    assert [c.discriminant for c in rep.candidates] == [11**4, 31**4, 341**4]
    assert [c.primes for c in rep.candidates] == [(11,), (31,), (11, 31)]
    assert CandidateReport.from_json(rep.to_json()) == rep


@pytest.mark.parametrize("ell", [5, 7, 11])
def test_candidate_invariants(ell):
    rep = candidate_conductors(ell)
    assert len(rep.candidates) == 2 ** len(rep.Sl) - 1
    for p in rep.Sl:
        assert p % ell == 1 and rep.Rl % p == 0
    for c in rep.candidates:
        assert c.discriminant == c.conductor ** (ell - 1)
        assert math.prod(c.primes) == c.conductor
        assert len(set(c.primes)) == len(c.primes)
        assert all(p % ell == 1 for p in c.primes)


@pytest.mark.parametrize("b,p,ell,expected", [(1, 31, 5, True), (1, 11, 5, True), (2, 31, 5, True), (3, 31, 5, False)])
def test_residue_test(b, p, ell, expected):
    assert residue_test(b, p, ell) is expected


def test_residue_test_counts():
    # in F_p with ell | p - 1 exactly 2 ell residues satisfy b^ell = +-1
    for p, ell in [(11, 5), (31, 5), (61, 5), (43, 7)]:
        hits = sum(residue_test(b, p, ell) for b in range(1, p))
        assert hits == 2 * ell


@pytest.mark.parametrize("p,ell,expected", [(11, 5, True), (7, 5, False), (31, 5, True)])
def test_common_root_examples(p, ell, expected):
    assert common_root_check(p, ell) is expected


@pytest.mark.parametrize("ell", [5, 7])
def test_common_root_matches_rl(ell):
    rl = compute_Rl(ell)
    for p in compute_Sl(ell):
        if p <= 10**6:
            assert common_root_check(p, ell)
    rng = random.Random(ell)
    others = [q for q in range(3, 10**4) if is_prime(q) and rl % q]
    for q in rng.sample(others, 20):
        assert not common_root_check(q, ell)


def test_common_root_limit():
    with pytest.raises(PTooLarge):
        common_root_check(10**8 + 7, 5)


def test_evertse():
    assert evertse_bound(5, 0) == 3 * 7**15
    assert evertse_bound(1, 0) == 1029
    assert evertse_bound(0, 1) == 7203
    with pytest.raises(ValueError):
        evertse_bound(0, 0)

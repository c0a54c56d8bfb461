import math
import random
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from exunits.arith import (
    SubgroupZn,
    crt_lift,
    factorize,
    index_ell_subgroups,
    is_prime,
    is_prime_certain,
    multiplicative_order,
    unit_group_structure,
)
from exunits.errors import FactorTimeout, NotSquarefree


def sieve_spf(limit):
    """Smallest prime factor table, the oracle for primality and factorization."""
    spf = list(range(limit + 1))
    for i in range(2, math.isqrt(limit) + 1):
        if spf[i] == i:
            for j in range(i * i, limit + 1, i):
                if spf[j] == j:
                    spf[j] = i
    return spf


SPF = sieve_spf(10**6)


def oracle_factor(n):
    out = {}
    while n > 1:
        p = SPF[n]
        out[p] = out.get(p, 0) + 1
        n //= p
    return sorted(out.items())


@pytest.mark.parametrize("n,expected", [(11, True), (341, False), (1, False), (0, False), (2, True)])
def test_is_prime_examples(n, expected):
    assert is_prime(n) is expected


def test_is_prime_against_sieve():
    for n in range(2, 200_000):
        assert is_prime(n) == (SPF[n] == n), n


def test_is_prime_large_known_values():
    assert is_prime(2**61 - 1)
    assert not is_prime(2**61 + 1)
    # strong pseudoprime to bases 2..37 but composite
    assert not is_prime(3825123056546413051)
    assert is_prime_certain(2**64)
    assert not is_prime_certain(10**30)


def test_factorize_examples():
    f = factorize(-210736858987743)
    assert f.sign == -1 and f.factors == ((3, 1), (11, 9), (31, 3))
    assert str(f) == "-3 * 11^9 * 31^3"
    assert factorize(341).factors == ((11, 1), (31, 1))
    f = factorize(-1)
    assert f.sign == -1 and f.factors == ()


def test_factorize_matches_sieve():
    rng = random.Random(7)
    sample = list(range(2, 3000)) + [rng.randrange(2, 10**6 + 1) for _ in range(3000)]
    for n in sample:
        f = factorize(n)
        assert f.value() == n
        assert list(f.factors) == oracle_factor(n)


def test_factorize_beyond_trial_division():
    p, q = 1000003, 1000033
    assert factorize(p * q).factors == ((p, 1), (q, 1))
    p, q = 2**31 - 1, 2**61 - 1
    assert factorize(p * q * q).factors == ((p, 1), (q, 2))


def test_factorize_budget():
    n = (2**61 - 1) * (2**89 - 1)
    with pytest.raises(FactorTimeout) as info:
        factorize(n * 4, budget=10)
    assert info.value.partial.factors == ((2, 2),)


def test_factorize_seed_determinism():
    n = 1000003 * 1000033 * 998244353
    assert factorize(n, seed=1) == factorize(n, seed=2)


def test_unit_group_structure_examples():
    assert unit_group_structure(11).orders == [10]
    assert unit_group_structure(341).orders == [10, 30]
    assert sorted(unit_group_structure(15).orders) == [2, 4]
    with pytest.raises(NotSquarefree):
        unit_group_structure(45)


def test_unit_group_15_brute_force():
    g = unit_group_structure(15)
    brute = sorted(a for a in range(15) if math.gcd(a, 15) == 1)
    assert g.elements() == brute
    orders = sorted(multiplicative_order(a, 15) for a in brute)
    # Z/2 x Z/4 has element orders 1, 2, 2, 2, 4, 4, 4, 4
    assert orders == [1, 2, 2, 2, 4, 4, 4, 4]


@pytest.mark.parametrize("n", [11, 31, 341, 15, 1001, 385])
def test_generator_orders(n):
    g = unit_group_structure(n)
    assert math.prod(p for p, _, _ in g.components) == n
    for p, gp, order in g.components:
        assert order == p - 1
        assert pow(gp, p - 1, p) == 1
        for q, _ in factorize(p - 1).factors:
            assert pow(gp, (p - 1) // q, p) != 1


@pytest.mark.parametrize("n,ell,count", [(341, 5, 6), (11, 5, 1), (15, 5, 0), (31, 5, 1), (31, 3, 1)])
def test_index_ell_subgroup_counts(n, ell, count):
    subs = index_ell_subgroups(unit_group_structure(n), ell)
    assert len(subs) == count
    for s in subs:
        assert s.index == ell


def _brute_index_subgroups(group, ell):
    """Kernels of all homomorphisms to Z/ell, found by enumerating images of generators."""
    n = group.modulus
    elems = group.elements()
    found = set()
    for imgs in product(range(ell), repeat=len(group.orders)):
        if not any(imgs):
            continue
        if any(o % ell and v for o, v in zip(group.orders, imgs)):
            continue
        kernel = frozenset(a for a in elems if sum(v * d for v, d in zip(imgs, group.dlog(a))) % ell == 0)
        found.add(kernel)
    return found


@pytest.mark.parametrize("n,ell", [(341, 5), (11 * 61, 5), (7 * 13, 3), (7 * 13 * 19, 3), (11 * 23, 11)])
def test_index_ell_subgroups_brute_force(n, ell):
    group = unit_group_structure(n)
    ours = {frozenset(s.elements()) for s in index_ell_subgroups(group, ell)}
    assert ours == _brute_index_subgroups(group, ell)
    t = sum(1 for o in group.orders if o % ell == 0)
    assert len(ours) == (ell**t - 1) // (ell - 1)


def test_subgroup_generated_by():
    g = unit_group_structure(11)
    h = SubgroupZn.generated_by(g, [10])
    assert h.elements() == [1, 10] and h.index == 5
    assert 21 in h and 2 not in h


@pytest.mark.parametrize("residues,expected", [
    ([(1, 11), (1, 31)], 1),
    ([(2, 11), (1, 31)], 156),
    ([(0, 11)], 0),
])
def test_crt_examples(residues, expected):
    assert crt_lift(residues) == expected


def test_crt_brute_force():
    for a in range(11):
        for b in range(31):
            x = crt_lift([(a, 11), (b, 31)])
            assert x == next(y for y in range(341) if y % 11 == a and y % 31 == b)


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=-10**30, max_value=10**30).filter(lambda n: n != 0))
def test_factorize_reconstructs(n):
    f = factorize(n)
    assert f.value() == n
    assert all(is_prime(p) for p in f.primes())

"""Integer arithmetic: primality, factorization, and the group (Z/NZ)^x.

All values are plain Python ints; nothing here touches floating point.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product

from .errors import FactorTimeout, NotSquarefree

# Deterministic Miller-Rabin witnesses for n < 3.3 * 10^24 (covers 2^64).
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_DETERMINISTIC_LIMIT = 3317044064679887385961981
_TRIAL_LIMIT = 10**6
DEFAULT_BUDGET = 10**9


def _small_primes(limit: int) -> list[int]:
    sieve = bytearray([1]) * (limit + 1)
    sieve[0:2] = b"\x00\x00"
    for i in range(2, math.isqrt(limit) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(range(i * i, limit + 1, i)))
    return [i for i in range(limit + 1) if sieve[i]]


@lru_cache(maxsize=1)
def _trial_primes() -> tuple[int, ...]:
    return tuple(_small_primes(_TRIAL_LIMIT))


def _strong_probable_prime(n: int, a: int) -> bool:
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    x = pow(a, d, n)
    if x in (1, n - 1):
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def is_prime(n: int) -> bool:
    """Miller-Rabin; deterministic below 2^64 (and well beyond).

    Above the deterministic range the answer is "probable prime"; use
    :func:`is_prime_certain` to find out which regime applied.
    """
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    return all(_strong_probable_prime(n, a) for a in _MR_BASES)


def is_prime_certain(n: int) -> bool:
    """True when :func:`is_prime` is a proof rather than a probable-prime test."""
    return n < _DETERMINISTIC_LIMIT


@dataclass(frozen=True)
class Factorization:
    sign: int
    factors: tuple[tuple[int, int], ...]
    probable: bool = False

    def value(self) -> int:
        out = self.sign
        for p, e in self.factors:
            out *= p**e
        return out

    def primes(self) -> list[int]:
        return [p for p, _ in self.factors]

    def __str__(self) -> str:
        if not self.factors:
            return str(self.sign)
        body = " * ".join(f"{p}^{e}" if e > 1 else str(p) for p, e in self.factors)
        return ("-" if self.sign < 0 else "") + body


def _brent(n: int, rng: random.Random, budget: list[int]) -> int:
    """One Pollard rho run with Brent's cycle finding; may return n on failure."""
    y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
    g = r = q = 1
    x = ys = y
    while g == 1:
        x = y
        for _ in range(r):
            y = (y * y + c) % n
        k = 0
        while k < r and g == 1:
            ys = y
            for _ in range(min(m, r - k)):
                y = (y * y + c) % n
                q = q * abs(x - y) % n
            budget[0] -= min(m, r - k)
            if budget[0] < 0:
                raise FactorTimeout(f"Pollard rho budget exhausted on {n}")
            g = math.gcd(q, n)
            k += m
        r *= 2
    if g == n:
        while True:
            ys = (ys * ys + c) % n
            g = math.gcd(abs(x - ys), n)
            if g > 1:
                break
    return g


def factorize(n: int, budget: int = DEFAULT_BUDGET, seed: int = 0) -> Factorization:
    """Complete factorization: trial division to 10^6, then Pollard-Brent.

    Raises FactorTimeout (carrying the partial factorization in ``.partial``)
    when more than ``budget`` rho iterations are needed.
    """
    if n == 0:
        raise ValueError("cannot factor 0")
    sign = -1 if n < 0 else 1
    n = abs(n)
    found: dict[int, int] = {}
    for p in _trial_primes():
        if p * p > n:
            break
        while n % p == 0:
            found[p] = found.get(p, 0) + 1
            n //= p
    if 1 < n <= _TRIAL_LIMIT**2:
        found[n] = found.get(n, 0) + 1
        n = 1

    rng = random.Random(seed)
    remaining = [budget]
    stack = [n] if n > 1 else []
    unfinished: list[int] = []
    probable = False
    while stack:
        m = stack.pop()
        if is_prime(m):
            probable |= not is_prime_certain(m)
            found[m] = found.get(m, 0) + 1
            continue
        root = math.isqrt(m)
        if root * root == m:
            stack.extend((root, root))
            continue
        try:
            d = m
            while d in (1, m):
                d = _brent(m, rng, remaining)
        except FactorTimeout:
            unfinished.append(m)
            unfinished.extend(stack)
            partial = Factorization(sign, tuple(sorted(found.items())), probable)
            err = FactorTimeout(f"factorization incomplete, cofactors {unfinished}", partial)
            err.cofactors = unfinished
            raise err from None
        stack.extend((d, m // d))
    return Factorization(sign, tuple(sorted(found.items())), probable)


def crt_lift(residues) -> int:
    """Combine ``[(r_i, m_i), ...]`` with pairwise coprime moduli."""
    x, mod = 0, 1
    for r, m in residues:
        r %= m
        t = (r - x) * pow(mod, -1, m) % m
        x += mod * t
        mod *= m
    return x % mod


def multiplicative_order(a: int, n: int) -> int:
    if math.gcd(a, n) != 1:
        raise ValueError(f"{a} is not a unit mod {n}")
    order = 1
    x = a % n
    while x != 1 % n:
        x = x * a % n
        order += 1
    return order


def primitive_root(p: int) -> int:
    """Smallest generator of (Z/pZ)^x, checked via g^((p-1)/q) != 1."""
    if p == 2:
        return 1
    qs = factorize(p - 1).primes()
    for g in range(2, p):
        if all(pow(g, (p - 1) // q, p) != 1 for q in qs):
            return g
    raise ValueError(f"{p} is not prime")


@dataclass(frozen=True)
class UnitGroupZn:
    """(Z/NZ)^x for squarefree N, as a product of cyclic groups (Z/pZ)^x.

    ``components`` holds ``(p, g_p, p - 1)`` and ``lifts`` the CRT lift of
    g_p that is 1 modulo every other prime.
    """

    modulus: int
    components: tuple[tuple[int, int, int], ...]
    lifts: tuple[int, ...]

    @property
    def orders(self) -> list[int]:
        return [n for _, _, n in self.components]

    @property
    def order(self) -> int:
        return math.prod(self.orders)

    def element(self, exps) -> int:
        out = 1
        for lift, e in zip(self.lifts, exps):
            out = out * pow(lift, e, self.modulus) % self.modulus
        return out

    def dlog(self, a: int) -> tuple[int, ...]:
        """Exponent vector of ``a`` w.r.t. the component generators."""
        return tuple(_dlog_table(p, g)[a % p] for p, g, _ in self.components)

    def elements(self) -> list[int]:
        return sorted(self.element(e) for e in product(*(range(n) for n in self.orders)))


@lru_cache(maxsize=None)
def _dlog_table(p: int, g: int) -> dict[int, int]:
    table, x = {}, 1
    for k in range(p - 1):
        table[x] = k
        x = x * g % p
    return table


def unit_group_structure(n: int) -> UnitGroupZn:
    if n < 3:
        raise ValueError("modulus must be at least 3")
    fac = factorize(n)
    if any(e > 1 for _, e in fac.factors):
        raise NotSquarefree(f"{n} is not squarefree")
    comps, lifts = [], []
    for p, _ in fac.factors:
        g = primitive_root(p)
        comps.append((p, g, p - 1))
        lifts.append(crt_lift([(g, p), (1, n // p)]) if n != p else g)
    return UnitGroupZn(n, tuple(comps), tuple(lifts))


@dataclass(frozen=True)
class SubgroupZn:
    parent: UnitGroupZn
    generators: tuple[int, ...]
    index: int
    _elements: frozenset = field(default=frozenset(), repr=False, compare=False)

    @classmethod
    def generated_by(cls, parent: UnitGroupZn, generators) -> "SubgroupZn":
        n = parent.modulus
        gens = tuple(sorted({g % n for g in generators if g % n != 1})) or (1,)
        elems = {1}
        frontier = [1]
        while frontier:
            x = frontier.pop()
            for g in gens:
                y = x * g % n
                if y not in elems:
                    elems.add(y)
                    frontier.append(y)
        index, rem = divmod(parent.order, len(elems))
        assert rem == 0
        return cls(parent, gens, index, frozenset(elems))

    @property
    def modulus(self) -> int:
        return self.parent.modulus

    def elements(self) -> list[int]:
        return sorted(self._elements)

    def __contains__(self, a: int) -> bool:
        return a % self.modulus in self._elements

    def __len__(self) -> int:
        return len(self._elements)


def index_ell_subgroups(group: UnitGroupZn, ell: int) -> list[SubgroupZn]:
    """All subgroups of index ``ell``, one per surjection G -> Z/ell up to scaling.

    A subgroup of prime index is the kernel of a character
    ``x -> sum_p v_p * dlog_p(x) mod ell`` with v supported on the
    components whose order is divisible by ``ell``.
    """
    active = [i for i, n in enumerate(group.orders) if n % ell == 0]
    t = len(active)
    out = []
    for v in product(range(ell), repeat=t):
        nz = [k for k in range(t) if v[k]]
        if not nz or v[nz[0]] != 1:
            continue  # one representative per line
        pivot = active[nz[0]]
        r = len(group.orders)
        gens = []
        for i in range(r):
            unit = [0] * r
            unit[i] = 1
            k = active.index(i) if i in active else None
            if k is None or v[k] == 0:
                gens.append(group.element(unit))
            elif i == pivot:
                unit[i] = ell
                gens.append(group.element(unit))
            else:
                unit[i] = ell
                gens.append(group.element(unit))
                shifted = [0] * r
                shifted[i] = 1
                shifted[pivot] = (-v[k]) % group.orders[pivot]
                gens.append(group.element(shifted))
        sub = SubgroupZn.generated_by(group, gens)
        assert sub.index == ell
        out.append(sub)
    return out

"""Candidate conductors for exceptional cyclic fields of prime degree ell >= 5.

If a cyclic field of prime degree ell >= 5 has a solution of
lambda + mu = 1 in units, every ramified prime p divides
R_ell = Res(X^(2 ell) - 1, (X - 1)^(2 ell) - 1) and is 1 mod ell, the
conductor is squarefree and the discriminant is N^(ell - 1).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import prod

from .arith import DEFAULT_BUDGET, Factorization, factorize, is_prime
from .errors import EllIsThree, FactorTimeout, PTooLarge, TooManyPrimes, UnsupportedDegree
from .polyring import IntPoly, resultant

MAX_S_SIZE = 20
COMMON_ROOT_SCAN_LIMIT = 10**8


def _check_ell(ell: int, allow_small: bool = False) -> None:
    if not is_prime(ell):
        raise UnsupportedDegree(f"ell = {ell} is not prime")
    if ell == 3:
        raise EllIsThree(
            "R_3 = 0: (1 + sqrt(-3))/2 is a common root of X^6 - 1 and (X - 1)^6 - 1, "
            "and cyclic cubic fields g_k(X) = X^3 + kX^2 - (k+3)X + 1 give infinitely "
            "many exceptional fields"
        )
    if ell == 2 and not allow_small:
        raise UnsupportedDegree(
            "ell = 2 is settled by Nagell: the only exceptional quadratic fields are "
            "Q(sqrt(5)) and Q(sqrt(-3)); the candidate machinery needs odd ell >= 5"
        )


def compute_Rl(ell: int) -> int:
    """R_ell = Res(X^(2 ell) - 1, (X - 1)^(2 ell) - 1), exactly."""
    _check_ell(ell, allow_small=True)
    x = IntPoly.x()
    return resultant(x ** (2 * ell) - 1, (x - 1) ** (2 * ell) - 1)


@dataclass
class SlResult:
    ell: int
    Rl: int
    factorization: Factorization
    primes: list[int]
    complete: bool = True
    cofactors: list[int] = field(default_factory=list)


def compute_Sl_detailed(ell: int, budget: int = DEFAULT_BUDGET, seed: int = 0) -> SlResult:
    _check_ell(ell)
    rl = compute_Rl(ell)
    try:
        fac = factorize(rl, budget=budget, seed=seed)
    except FactorTimeout as exc:
        fac = exc.partial
        primes = [p for p in fac.primes() if p % ell == 1]
        return SlResult(ell, rl, fac, primes, complete=False, cofactors=getattr(exc, "cofactors", []))
    return SlResult(ell, rl, fac, [p for p in fac.primes() if p % ell == 1])


def compute_Sl(ell: int, budget: int = DEFAULT_BUDGET, seed: int = 0) -> list[int]:
    res = compute_Sl_detailed(ell, budget, seed)
    if not res.complete:
        raise FactorTimeout(f"R_{ell} only partially factored; S_{ell} incomplete", res.factorization)
    return res.primes


@dataclass
class Candidate:
    primes: tuple[int, ...]
    conductor: int
    discriminant: int

    def to_json(self) -> dict:
        return {
            "T": list(self.primes),
            "conductor": self.conductor,
            "discriminant": str(self.discriminant),
        }


@dataclass
class CandidateReport:
    ell: int
    Rl: int
    factorization: Factorization
    Sl: list[int]
    candidates: list[Candidate]
    complete: bool = True

    def to_json(self) -> dict:
        return {
            "ell": self.ell,
            "R_ell": str(self.Rl),
            "factorization": {
                "sign": self.factorization.sign,
                "factors": [[p, e] for p, e in self.factorization.factors],
                "probable": self.factorization.probable,
            },
            "S_ell": self.Sl,
            "S_ell_complete": self.complete,
            "candidates": [c.to_json() for c in self.candidates],
        }

    @classmethod
    def from_json(cls, data: dict) -> "CandidateReport":
        fac = data["factorization"]
        return cls(
            ell=data["ell"],
            Rl=int(data["R_ell"]),
            factorization=Factorization(
                fac["sign"], tuple((p, e) for p, e in fac["factors"]), fac.get("probable", False)
            ),
            Sl=list(data["S_ell"]),
            candidates=[
                Candidate(tuple(c["T"]), c["conductor"], int(c["discriminant"]))
                for c in data["candidates"]
            ],
            complete=data.get("S_ell_complete", True),
        )


def candidate_conductors(ell: int, budget: int = DEFAULT_BUDGET, seed: int = 0) -> CandidateReport:
    sl = compute_Sl_detailed(ell, budget, seed)
    if len(sl.primes) > MAX_S_SIZE:
        raise TooManyPrimes(f"|S_{ell}| = {len(sl.primes)} exceeds {MAX_S_SIZE}")
    cands = []
    for size in range(1, len(sl.primes) + 1):
        for subset in combinations(sl.primes, size):
            n = prod(subset)
            cands.append(Candidate(subset, n, n ** (ell - 1)))
    cands.sort(key=lambda c: (c.conductor, c.primes))
    return CandidateReport(ell, sl.Rl, sl.factorization, sl.primes, cands, sl.complete)


def residue_test(b: int, p: int, ell: int) -> bool:
    """b^ell = +-1 (mod p): the residue of a unit at a totally ramified prime."""
    v = pow(b, ell, p)
    return v == 1 % p or v == p - 1


def common_root_check(p: int, ell: int) -> bool:
    """Brute force: does some b in F_p satisfy b^(2 ell) = 1 = (b - 1)^(2 ell)?"""
    if p > COMMON_ROOT_SCAN_LIMIT:
        raise PTooLarge(f"p = {p} exceeds scan limit {COMMON_ROOT_SCAN_LIMIT}")
    e = 2 * ell
    return any(pow(b, e, p) == 1 % p and pow(b - 1, e, p) == 1 % p for b in range(p))


def evertse_bound(r: int, s: int) -> int:
    """Evertse's cap 3 * 7^(3r + 4s) on the number of solutions."""
    if r < 0 or s < 0 or (r, s) == (0, 0):
        raise ValueError("signature must be nonnegative and nonzero")
    return 3 * 7 ** (3 * r + 4 * s)

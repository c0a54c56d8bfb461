"""Cyclotomic units, logarithmic embeddings, regulators and p-saturation.

Units are produced numerically (as values in every real embedding),
rounded to integer coordinates over the normal integral basis and then
certified exactly: integral coordinates plus norm +-1 makes an element a
unit regardless of how its approximation was obtained.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

import mpmath
from mpmath import iv, mp

from ._ivprec import bounds, ivprec

from .arith import factorize, is_prime
from .cyclofield import CyclicField, FieldElement
from .errors import PrecisionExhausted, RankDeficient
from .lattice import lll_reduce
from .polyring import fp_roots

DEFAULT_PRECISION = 512
MAX_PRECISION = 8192
DEFAULT_SATURATION_PRIMES = (2, 3, 5, 7, 11, 13)


@dataclass
class LogEmbedding:
    values: list  # mpf midpoints
    radius: mpmath.mpf


@dataclass
class UnitSystem:
    field: CyclicField
    generators: list[FieldElement]
    log_matrix: list[list]  # rows: generators, cols: embeddings (mpf)
    log_radius: mpmath.mpf
    regulator: mpmath.mpf
    regulator_radius: mpmath.mpf
    saturation_log: list[tuple[int, str]] = field(default_factory=list)
    asserted_mode: str = "cyclotomic"
    precision: int = DEFAULT_PRECISION

    @property
    def rank(self) -> int:
        return len(self.generators)

    def float_log_matrix(self):
        return [[float(x) for x in row] for row in self.log_matrix]

    def to_json(self) -> dict:
        return {
            "field": self.field.digest(),
            "asserted_mode": self.asserted_mode,
            "generators": [g.to_json() for g in self.generators],
            "saturation_log": [[p, outcome] for p, outcome in self.saturation_log],
            "regulator": mpmath.nstr(self.regulator, 30),
        }

    @classmethod
    def from_json(cls, fld: CyclicField, data: dict, precision: int = DEFAULT_PRECISION) -> "UnitSystem":
        if data.get("field") not in (None, fld.digest()):
            raise ValueError("unit file belongs to a different field")
        gens = [FieldElement.from_json(fld, g) for g in data["generators"]]
        mode = data.get("asserted_mode", "cyclotomic")
        us = build_unit_system(fld, gens, precision=precision, mode=mode)
        us.saturation_log = [tuple(x) for x in data.get("saturation_log", [])]
        return us

    def digest(self) -> str:
        blob = json.dumps([g.to_json() for g in self.generators], sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


# ---------------------------------------------------------------- embeddings


def log_embedding(u: FieldElement, precision: int = DEFAULT_PRECISION) -> LogEmbedding:
    """(log|sigma_1 u|, ..., log|sigma_m u|) with a certified error radius."""
    if u.is_zero:
        raise ValueError("log embedding of zero")
    prec = precision
    while prec <= MAX_PRECISION:
        enclosures = u.interval_embeddings(prec)
        with ivprec(prec):
            if any(0 in e for e in enclosures):
                prec *= 2
                continue
            logs = [bounds(iv.log(abs(e))) for e in enclosures]
        with mp.workprec(prec + 10):
            mids = [(lo + hi) / 2 for lo, hi in logs]
            radius = max((hi - lo) / 2 for lo, hi in logs)
        return LogEmbedding(mids, radius)
    raise PrecisionExhausted("embedding enclosure contains 0 at maximal precision")


def subgroup_regulator(log_matrix, radius, precision: int = DEFAULT_PRECISION):
    """|det| of the log matrix with the last embedding dropped, plus error radius."""
    r = len(log_matrix)
    if r == 0:
        return mpmath.mpf(1), mpmath.mpf(0)
    with ivprec(precision):
        err = iv.mpf([-radius, radius])
        rows = [[iv.mpf(x) + err for x in row[:r]] for row in log_matrix]
        det = iv.det(iv.matrix(rows))
        if not isinstance(det, type(err)) or 0 in det:
            raise PrecisionExhausted("regulator interval contains 0 (units dependent?)")
        lo, hi = bounds(det)
    with mp.workprec(precision + 10):
        lo, hi = sorted((abs(lo), abs(hi)))
        return (lo + hi) / 2, (hi - lo) / 2


def build_unit_system(
    fld: CyclicField,
    gens: list[FieldElement],
    precision: int = DEFAULT_PRECISION,
    mode: str = "cyclotomic",
    saturation_log=None,
) -> UnitSystem:
    for g in gens:
        if not g.is_unit():
            raise ValueError(f"{g} is not a unit")
    embs = [log_embedding(g, precision) for g in gens]
    rows = [e.values for e in embs]
    radius = max((e.radius for e in embs), default=mpmath.mpf(0))
    while True:
        try:
            reg, reg_rad = subgroup_regulator(rows, radius, precision)
            break
        except PrecisionExhausted:
            if precision >= MAX_PRECISION:
                raise
            precision *= 2
            embs = [log_embedding(g, precision) for g in gens]
            rows = [e.values for e in embs]
            radius = max(e.radius for e in embs)
    return UnitSystem(fld, list(gens), rows, radius, reg, reg_rad, list(saturation_log or []), mode, precision)


# ---------------------------------------------------------------- numeric -> exact


def element_from_embeddings(fld: CyclicField, values, prec: int = DEFAULT_PRECISION):
    """Round values at the embeddings to an integral element, or None.

    Uses the normal basis: sigma_j(sum x_i eta_{c_i}) = sum_i x_i eta_{c_(i+j)}.
    """
    m = fld.degree
    periods = fld.numeric_periods(prec)
    with mp.workprec(prec):
        mat = mpmath.matrix([[periods[(i + j) % m] for i in range(m)] for j in range(m)])
        sol = mpmath.lu_solve(mat, mpmath.matrix(list(values)))
        coords = [mpmath.nint(x) for x in sol]
        scale = max([abs(v) for v in values] + [mpmath.mpf(1)])
        tol = scale * mpmath.mpf(2) ** (-prec // 2)
        if any(abs(x - c) > max(tol, mpmath.mpf(2) ** -40) for x, c in zip(sol, coords)):
            return None
    return from_normal_coords(fld, [int(c) for c in coords])


def from_normal_coords(fld: CyclicField, coords) -> FieldElement:
    m = fld.degree
    acc = [Fraction(0)] * m
    for x, row in zip(coords, fld.normal_matrix):
        if x:
            for k in range(m):
                acc[k] += x * row[k]
    den = math.lcm(*(a.denominator for a in acc))
    return FieldElement(fld, [int(a * den) for a in acc], den)


# ---------------------------------------------------------------- cyclotomic units


def _transversal(n: int, image) -> list[int]:
    seen, reps = set(), []
    for a in range(1, n):
        if math.gcd(a, n) != 1 or a in seen:
            continue
        reps.append(a)
        for h in image:
            seen.add(a * h % n)
            seen.add(-a * h % n)
    return reps


def _pool_values(fld: CyclicField, prec: int):
    """Embedding values of the cyclotomic-unit pool, all totally positive."""
    n = fld.conductor
    h_elems = fld.subgroup.elements()
    out = []
    divisors = [d for d in range(2, n + 1) if n % d == 0]
    with mp.workprec(prec):
        for d in divisors:
            d_prime = is_prime(d)
            image = {h % d for h in h_elems}
            for a in _transversal(d, image):
                if d_prime and a == 1:
                    continue
                vals = []
                for c in fld.coset_reps:
                    acc = mpmath.mpf(0)
                    for h in h_elems:
                        acc += mpmath.log(abs(2 * mpmath.sinpi(mpmath.mpf(c * a * h % d) / d)))
                        if d_prime:
                            acc -= mpmath.log(abs(2 * mpmath.sinpi(mpmath.mpf(c * h % d) / d)))
                    vals.append(acc)
                if max(abs(v) for v in vals) > mpmath.mpf(2) ** (-prec // 2):
                    out.append(((d, a), vals))
    return out


def _independent_basis(log_rows, rank: int, prec: int):
    """Exponent vectors (over the pool) of a basis of the group the pool generates.

    LLL on [I | C * logs]: rows whose log part vanishes are relations; the
    remaining ``rank`` rows generate the same group modulo relations.
    """
    k = len(log_rows)
    with mp.workprec(prec):
        scale = mpmath.mpf(2) ** (prec // 3)
        rows = []
        for i, logs in enumerate(log_rows):
            rows.append([int(i == j) for j in range(k)] + [int(mpmath.nint(scale * x)) for x in logs])
    reduced, _ = lll_reduce(rows)
    bound = 2 ** (prec // 6)
    relations = [r for r in reduced if max(abs(x) for x in r[k:]) < bound]
    if k - len(relations) < rank:
        raise RankDeficient(f"cyclotomic pool has rank {k - len(relations)} < {rank}")
    if k - len(relations) > rank:
        raise RankDeficient("relation detection failed; raise precision")
    basis = [r[:k] for r in reduced if r not in relations]
    return basis


def cyclotomic_units(fld: CyclicField, precision: int = DEFAULT_PRECISION) -> UnitSystem:
    """Relative norms of (1 - zeta_d^a)/(1 - zeta_d) (d prime) or 1 - zeta_d^a (d composite)."""
    m = fld.degree
    rank = m - 1
    pool = _pool_values(fld, precision)
    if len(pool) < rank:
        raise RankDeficient(f"only {len(pool)} nontrivial cyclotomic units for {fld!r}")
    logs = [vals for _, vals in pool]
    basis = _independent_basis(logs, rank, precision)
    gens = []
    with mp.workprec(precision):
        for exps in basis:
            values = [mpmath.exp(mpmath.fsum(e * logs[i][j] for i, e in enumerate(exps))) for j in range(m)]
            u = element_from_embeddings(fld, values, precision)
            if u is None:
                raise PrecisionExhausted("could not round cyclotomic unit to integral coordinates")
            gens.append(u)
    gens = reduce_unit_basis(fld, gens, precision)
    return build_unit_system(fld, gens, precision, mode="cyclotomic")


def reduce_unit_basis(fld: CyclicField, gens: list[FieldElement], precision: int = DEFAULT_PRECISION):
    """LLL-reduce the log lattice of ``gens`` and return the matching units."""
    if len(gens) <= 1:
        return list(gens)
    logs = [log_embedding(g, precision).values for g in gens]
    with mp.workprec(precision):
        scale = mpmath.mpf(2) ** 60
        rows = [[int(mpmath.nint(scale * x)) for x in row] for row in logs]
    _, transform = lll_reduce(rows)
    return [product_of_powers(fld, gens, t) for t in transform]


def product_of_powers(fld: CyclicField, gens, exps) -> FieldElement:
    out = fld.one
    for g, e in zip(gens, exps):
        if e:
            out = out * g**e
    return out


# ---------------------------------------------------------------- saturation


def _split_primes(fld: CyclicField, p: int, count: int = 12, start: int = 3):
    """Primes q = 1 mod p, q not dividing N or the power index, with f split mod q."""
    out = []
    q = start
    while len(out) < count:
        q += 1
        if q % p != 1 or not is_prime(q) or fld.conductor % q == 0 or fld.power_index % q == 0:
            continue
        roots = fp_roots(fld.minpoly, q)
        if len(roots) == fld.degree:
            out.append((q, roots))
    return out


def _residue(u: FieldElement, q: int, root: int) -> int:
    acc = 0
    for c in reversed(u.num):
        acc = (acc * root + c) % q
    return acc * pow(u.den, -1, q) % q


def _pth_root(fld: CyclicField, v: FieldElement, p: int, prec: int):
    """An exact p-th root of v in the field, or None."""
    m = fld.degree
    with mp.workprec(prec):
        vals = v.embeddings(prec)
        if p == 2:
            if any(x <= 0 for x in vals):
                return None
            roots = [mpmath.sqrt(x) for x in vals]
            candidates = []
            for signs in product((1, -1), repeat=m - 1):
                candidates.append([roots[0]] + [s * r for s, r in zip(signs, roots[1:])])
        else:
            candidates = [[mpmath.sign(x) * abs(x) ** (mpmath.mpf(1) / p) for x in vals]]
        for cand in candidates:
            w = element_from_embeddings(fld, cand, prec)
            if w is not None and w**p == v:
                return w
    return None


def saturate(us: UnitSystem, primes=DEFAULT_SATURATION_PRIMES) -> UnitSystem:
    """Enlarge the unit group by p-th roots that exist in the field.

    For each p: look for a nontrivial e in {0..p-1}^r and a sign with
    +-prod g_i^e_i a p-th power.  Candidates are first filtered by p-th
    power residue tests at split primes q = 1 mod p, then the root is
    proposed from the embeddings and verified exactly.  Each success
    divides the index by p, so we repeat until no descent is found.
    """
    fld = us.field
    gens = list(us.generators)
    log = list(us.saturation_log)
    changed = False
    r = len(gens)
    prec = us.precision
    for p in primes:
        descents = 0
        tests = _split_primes(fld, p)
        while True:
            found = None
            # residues of generators and -1 at each split place
            tables = []
            for q, roots in tests:
                for root in roots:
                    e = (q - 1) // p
                    tables.append((q, e, [_residue(g, q, root) for g in gens], (q - 1) % q))
            signs = (1, -1) if p == 2 else (1,)
            for exps in product(range(p), repeat=r):
                if not any(exps):
                    continue
                lead = next(x for x in exps if x)
                if lead != 1:
                    continue  # one representative per line
                for s in signs:
                    ok = True
                    for q, e, res, minus in tables:
                        val = 1 if s == 1 else minus
                        for rr, x in zip(res, exps):
                            if x:
                                val = val * pow(rr, x, q) % q
                        if pow(val, e, q) != 1:
                            ok = False
                            break
                    if not ok:
                        continue
                    v = product_of_powers(fld, gens, exps)
                    if s == -1:
                        v = -v
                    w = _pth_root(fld, v, p, prec)
                    if w is not None:
                        found = (exps, w)
                        break
                if found:
                    break
            if not found:
                break
            exps, w = found
            # replace a generator with nonzero exponent coprime to p by w
            i = next(k for k, x in enumerate(exps) if x % p)
            gens[i] = w
            descents += 1
            changed = True
        log.append((p, f"saturated at {p} (index divided by {p}^{descents})" if descents else f"no descent at {p}"))
    if changed:
        gens = reduce_unit_basis(fld, gens, prec)
    out = build_unit_system(fld, gens, prec, us.asserted_mode, log)
    return out


def express_in_basis(us: UnitSystem, u: FieldElement):
    """(sign, exponents) with u = sign * prod g_i^e_i, verified exactly, or None."""
    m = us.field.degree
    r = us.rank
    emb = log_embedding(u, us.precision)
    with mp.workprec(us.precision):
        a = mpmath.matrix([[us.log_matrix[i][j] for i in range(r)] for j in range(r)])
        b = mpmath.matrix(emb.values[:r])
        sol = mpmath.lu_solve(a, b)
        exps = [int(mpmath.nint(x)) for x in sol]
        if any(abs(x - e) > mpmath.mpf(10) ** -10 for x, e in zip(sol, exps)):
            return None
    v = product_of_powers(us.field, us.generators, exps)
    for sign in (1, -1):
        if (v * sign) == u:
            return sign, exps
    return None

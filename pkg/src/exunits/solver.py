"""Complete solution of lambda + mu = 1 in units of a totally real cyclic field.

Pipeline: a unit system (cyclotomic units, saturated) -> an explicit
Baker-type bound from Matveev's theorem -> de Weger style LLL reduction
of that bound -> exhaustive search below the reduced bound -> exact
verification of every survivor.

Notation.  U has generators g_1..g_r with log matrix M (r x m).  For a
solution write H = max(||log lambda||_inf, ||log mu||_inf).  If H >=
(m-1) log 2 there is an embedding j and X in {lambda, mu} with
log|sigma_j X| <= -H/(m-1); the partner Y = 1 - X then satisfies

    |Lambda_j(b)| = |log|sigma_j Y|| <= 2 exp(-H/(m-1)),

where b is the exponent vector of Y.  Everything below works with the
exponents b of that partner Y, and ||b||_inf <= kappa * H.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

import mpmath
import numpy as np
from mpmath import mp

from .cyclofield import CyclicField, FieldElement, galois_apply, residue_mod_ramified
from .errors import BudgetExceeded, NoProgress, NotClosed, PrecisionExhausted, RankDeficient
from .lattice import fincke_pohst_float, lll_reduce, shortest_vector_lower_bound_sq
from .polyring import IntPoly, discriminant, resultant
from .sieve import evertse_bound, residue_test
from .units import (
    UnitSystem,
    cyclotomic_units,
    element_from_embeddings,
    saturate,
)

MODES = ("rigorous", "saturated", "heuristic")
DEFAULT_BUDGET = 10**9
HEURISTIC_BOUND = 12
CAVEATS = {
    "rigorous": "",
    "saturated": (
        "complete relative to the p-saturated cyclotomic unit subgroup; "
        "the full unit group was not certified"
    ),
    "heuristic": "non-exhaustive: direct scan of a user-chosen exponent box",
}


@dataclass
class SolveConfig:
    mode: str = "saturated"
    initial_bound_override: int | None = None
    precision_schedule: tuple[int, ...] = (512, 1024, 2048)
    budget: int = DEFAULT_BUDGET
    heuristic_bound: int = HEURISTIC_BOUND
    threads: int | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}; expected one of {MODES}")


@dataclass
class SolutionReport:
    field: CyclicField
    mode: str
    solutions: list[FieldElement]
    orbits: list[list[FieldElement]]
    bounds: dict
    timings: dict = field(default_factory=dict)
    caveat: str = ""
    unit_digest: str = ""

    @property
    def count(self) -> int:
        return len(self.solutions)

    @property
    def exhaustive(self) -> bool:
        return self.mode != "heuristic"

    def to_json(self, timings: bool = False) -> dict:
        out = {
            "field": {
                "label": self.field.label,
                "conductor": self.field.conductor,
                "degree": self.field.degree,
                "minpoly": self.field.minpoly.to_json(),
                "digest": self.field.digest(),
            },
            "units": self.unit_digest,
            "mode": self.mode,
            "caveat": self.caveat,
            "exhaustive": self.exhaustive,
            "count": self.count,
            "orbit_count": len(self.orbits),
            "solutions": [list(map(str, _int_coords(s))) for s in self.solutions],
            "orbits": [[self.solutions.index(x) for x in orb] for orb in self.orbits],
            "bounds": self.bounds,
        }
        # timings vary run to run; left out by default so reports are reproducible
        if timings:
            out["timings"] = self.timings
        return out

    @classmethod
    def from_json(cls, fld: CyclicField, data: dict) -> "SolutionReport":
        sols = [_from_int_coords(fld, [int(c) for c in row]) for row in data["solutions"]]
        orbits = [[sols[i] for i in orb] for orb in data["orbits"]]
        return cls(
            fld, data["mode"], sols, orbits, data["bounds"], data.get("timings", {}),
            data.get("caveat", ""), data.get("units", ""),
        )

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["label", "conductor", "mode", "count", "orbits", "B_initial", "B_final", "H_final"])
        w.writerow([
            self.field.label, self.field.conductor, self.mode, self.count, len(self.orbits),
            self.bounds.get("B_initial"), self.bounds.get("B_final"), self.bounds.get("H_final"),
        ])
        return buf.getvalue()


def _int_coords(a: FieldElement) -> list[int]:
    """Integral coordinates over the normal basis eta_{c_0}, ..., eta_{c_(m-1)}."""
    out = []
    for c in a.normal_coords():
        if c.denominator != 1:
            raise ValueError("element is not integral")
        out.append(int(c))
    return out


def _from_int_coords(fld: CyclicField, coords) -> FieldElement:
    from .units import from_normal_coords

    return from_normal_coords(fld, coords)


# ---------------------------------------------------------------- checks


def verify_solution(fld: CyclicField, lam: FieldElement) -> bool:
    """lambda and 1 - lambda are both units (exact)."""
    lam = fld(lam)
    return lam.is_unit() and (fld.one - lam).is_unit()


def _symmetries(lam: FieldElement) -> list[FieldElement]:
    one = lam.parent.one
    inv = lam.inverse()
    return [lam, one - lam, inv, one - inv, (one - lam).inverse(), lam / (lam - one)]


def symmetry_orbits(solutions) -> list[list[FieldElement]]:
    """Orbits under lambda -> 1 - lambda, lambda -> 1/lambda (a group of order 6)."""
    pool = {s.key(): s for s in solutions}
    seen: set = set()
    orbits = []
    for s in sorted(pool.values(), key=_canon):
        if s.key() in seen:
            continue
        orb = {}
        for t in _symmetries(s):
            if t.key() not in pool:
                raise NotClosed(f"{t} is an image of {s} but not in the solution set")
            orb[t.key()] = pool[t.key()]
        seen.update(orb)
        orbits.append(sorted(orb.values(), key=_canon))
    return orbits


def ramified_residue_check(fld: CyclicField, solutions) -> bool:
    """Every solution reduces to an ell-th root of +-1 at every ramified prime."""
    from .arith import factorize

    primes = factorize(fld.conductor).primes()
    return all(
        residue_test(residue_mod_ramified(s, p), p, fld.degree) for s in solutions for p in primes
    )


def sophie_germain_check(p: int) -> bool:
    """2 + zeta_p + zeta_p^-1 is an exceptional unit of Q(zeta_p)^+."""
    from .arith import is_prime

    if not is_prime(p) or p < 5:
        raise ValueError(f"p = {p} must be a prime >= 5")
    fld = CyclicField.real_cyclotomic(p)
    return verify_solution(fld, fld.eta + 2)


@dataclass
class NagellRecord:
    k: int
    exceptional: bool
    disc: int
    norm_lambda: int
    norm_one_minus_lambda: int

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "exceptional": self.exceptional,
            "disc": str(self.disc),
            "norm_lambda": self.norm_lambda,
            "norm_one_minus_lambda": self.norm_one_minus_lambda,
        }


def nagell_cubic_check(k: int) -> NagellRecord:
    """Root lambda of g_k = X^3 + kX^2 - (k+3)X + 1: are lambda and 1 - lambda units?"""
    if k < -1:
        raise ValueError("k must be >= -1")
    g = IntPoly([1, -(k + 3), k, 1])
    x = IntPoly.x()
    # N(lambda) = -Res(g, X) up to sign convention; N(1 - lambda) = Res(g, 1 - X)
    n_lam = resultant(g, x)
    n_one = resultant(g, 1 - x)
    ok = abs(n_lam) == 1 and abs(n_one) == 1
    return NagellRecord(k, ok, discriminant(g), n_lam, n_one)


# ---------------------------------------------------------------- unit data


class _UnitData:
    """Precomputed numerics for one unit system."""

    def __init__(self, us: UnitSystem, precision: int):
        if us.rank == 0:
            raise RankDeficient("rank-0 unit system")
        self.us = us
        self.fld = us.field
        self.m = us.field.degree
        self.r = us.rank
        if self.r != self.m - 1:
            raise RankDeficient(f"unit system has rank {self.r}, expected {self.m - 1}")
        self.prec = precision
        with mp.workprec(precision):
            self.M = [[mpmath.mpf(x) for x in row] for row in us.log_matrix]
            self.radius = mpmath.mpf(us.log_radius)
            self.signs = []
            for g in us.generators:
                vals = g.embeddings(128)
                self.signs.append([1 if v > 0 else -1 for v in vals])
        self.Mf = np.array([[float(x) for x in row] for row in self.M])
        self.neg = np.array([[s < 0 for s in row] for row in self.signs], dtype=np.int64)

    # kappa: ||b||_inf <= kappa * ||log Y||_inf, dropping the best column
    def kappa(self) -> mpmath.mpf:
        m, r = self.m, self.r
        best = None
        with mp.workprec(self.prec):
            for k in range(m):
                cols = [j for j in range(m) if j != k]
                inv = mpmath.matrix([[self.M[i][j] for j in cols] for i in range(r)]) ** -1
                kap = max(sum(abs(inv[i, c]) for i in range(r)) for c in range(r))
                best = kap if best is None else min(best, kap)
        return best * (1 + mpmath.mpf(2) ** -40)


# ---------------------------------------------------------------- bounds


MATVEEV_REAL = 1.4


def _weil_height(row) -> mpmath.mpf:
    return mpmath.fsum(max(x, 0) for x in row) / len(row)


def initial_bound(fld: CyclicField, us: UnitSystem, precision: int = 512) -> int:
    """Exponent bound B0 from Matveev's lower bound for linear forms in logs.

    For n = r real logarithms over a field of degree D = m,
    log|Lambda| > -1.4 * 30^(n+3) * n^4.5 * D^2 (1 + log D)(1 + log B) * prod A_i
    with A_i >= max(D h(alpha_i), |log alpha_i|, 0.16).  Combined with
    |Lambda| <= 2 exp(-H/(m-1)) and B <= kappa H this bounds B.
    """
    data = _UnitData(us, precision)
    m, n = data.m, data.r
    D = m
    with mp.workprec(precision):
        a_vals = []
        for row in data.M:
            a_vals.append(max(D * _weil_height(row), max(abs(x) for x in row), mpmath.mpf("0.16")))
        K = (
            MATVEEV_REAL * mpmath.mpf(30) ** (n + 3) * mpmath.mpf(n) ** 4.5 * D * D
            * (1 + mpmath.log(D)) * mpmath.fprod(a_vals)
        )
        kap = data.kappa()
        b = mpmath.mpf(10) ** 60
        for _ in range(500):
            nb = kap * (m - 1) * (mpmath.log(2) + K * (1 + mpmath.log(b)))
            if abs(nb - b) < 1:
                b = nb
                break
            b = nb
        return int(mpmath.ceil(b)) + 1


def _kappa_for(data: _UnitData, j: int, delta) -> tuple:
    """Bound ||b||_inf <= a*H + c for Y with ||log Y|| <= H and |log|sigma_j Y|| <= delta."""
    m, r = data.m, data.r
    best = None
    with mp.workprec(data.prec):
        for k in range(m):
            cols = [c for c in range(m) if c != k]
            inv = mpmath.matrix([[data.M[i][c] for c in cols] for i in range(r)]) ** -1
            if k == j:
                a = max(sum(abs(inv[i, c]) for i in range(r)) for c in range(r))
                cst = mpmath.mpf(0)
            else:
                pj = cols.index(j)
                a = max(sum(abs(inv[i, c]) for i in range(r) if i != pj) for c in range(r))
                cst = max(abs(inv[pj, c]) for c in range(r)) * delta
            if best is None or a < best[0]:
                best = (a, cst)
    a, cst = best
    return a * (1 + mpmath.mpf(2) ** -40), cst


def _exponent_bound(data: _UnitData, height) -> int:
    """max_j of the exponent bound for the partner Y at log height <= height."""
    m = data.m
    with mp.workprec(data.prec):
        delta = 2 * mpmath.exp(-mpmath.mpf(height) / (m - 1))
        out = 0
        for j in range(m):
            a, c = _kappa_for(data, j, delta)
            out = max(out, int(mpmath.floor(a * height + c)))
    return out


REDUCTION_FACTORS = (3, 10, 30, 100, 1000)


def _reduce_once(data: _UnitData, bound: int):
    """One de Weger step.  Returns (new exponent bound, new height bound) or None."""
    m, r = data.m, data.r
    floor_h = (m - 1) * mpmath.log(2)
    with mp.workprec(data.prec):
        height = floor_h
        for j in range(m):
            alpha = [data.M[i][j] for i in range(r)]
            t = max(range(r), key=lambda i: abs(alpha[i]))
            best = None
            for fac in REDUCTION_FACTORS:
                c_scale = int(mpmath.ceil((mpmath.mpf(fac) * bound) ** r / abs(alpha[t])))
                if c_scale * data.radius > mpmath.mpf(2) ** -20:
                    raise PrecisionExhausted("log matrix too coarse for the lattice scale")
                rows = []
                for i in range(r):
                    if i == t:
                        continue
                    v = [0] * (r - 1)
                    v[len(rows)] = 1
                    rows.append(v + [int(mpmath.nint(c_scale * alpha[i]))])
                rows.append([0] * (r - 1) + [int(mpmath.nint(c_scale * alpha[t]))])
                try:
                    red, _ = lll_reduce(rows)
                except ValueError:
                    continue
                l2 = max(
                    shortest_vector_lower_bound_sq(red),
                    sum(x * x for x in red[0]) * (Fraction(99, 100) - Fraction(1, 4)) ** (r - 1),
                )
                s = (r - 1) * bound * bound
                if l2 <= s:
                    continue
                # rounding error per coefficient: 1/2 + C * radius
                tt = r * bound * (mpmath.mpf(1) / 2 + c_scale * data.radius) + 1
                lam = (mpmath.sqrt(mpmath.mpf(l2.numerator) / l2.denominator - s) - tt) / c_scale
                if lam <= 0:
                    continue
                h = (m - 1) * mpmath.log(2 / lam)
                if best is None or h < best:
                    best = h
                if fac >= 30 and best is not None:
                    break
            if best is None:
                return None
            height = max(height, best)
        height = mpmath.mpf(height) * (1 + mpmath.mpf(2) ** -30)
    return _exponent_bound(data, height), float(height)


def reduce_bound(fld: CyclicField, us: UnitSystem, bound: int, precision: int = 512) -> int:
    """Sound reduction of an exponent bound; raises NoProgress at a fixed point."""
    if bound < 1:
        raise ValueError("bound must be >= 1")
    data = _UnitData(us, precision)
    res = _reduce_once(data, bound)
    if res is None or res[0] >= bound:
        raise NoProgress(f"no reduction below {bound}")
    return res[0]


def _reduction_chain(data: _UnitData, b0: int, max_steps: int = 50):
    seq = []
    bound = b0
    height = None
    for _ in range(max_steps):
        res = _reduce_once(data, bound)
        if res is None or res[0] >= bound:
            break
        bound, height = res
        seq.append({"B": bound, "H": round(height, 6)})
    if height is None:
        raise NoProgress("the first reduction step made no progress")
    return bound, height, seq


# ---------------------------------------------------------------- enumeration


def _float_survivors(data: _UnitData, signs, bs, height: float | None):
    """Vectorised pre-filter.  Float logs are good to ~1e-12 here, so the
    tests below only discard candidates with a wide safety margin; anything
    near cancellation (sigma_k Y close to +1) is passed on to the mpmath path.
    """
    logs = bs @ data.Mf
    parity = (bs % 2) @ data.neg % 2
    sg = np.where(parity == 1, -signs[:, None], signs[:, None])
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        one_minus = np.where(sg > 0, -np.expm1(logs), 1 + np.exp(logs))
        total = np.log(np.abs(one_minus)).sum(axis=1)
    fragile = ((sg > 0) & (np.abs(logs) < 1e-6)).any(axis=1)
    keep = fragile | (np.abs(total) < 0.25) | ~np.isfinite(total)
    if height is not None:
        keep &= np.abs(logs).max(axis=1) <= height + 1e-6
    return keep


def _check_candidates(data: _UnitData, cands, height: float | None):
    """Numeric pre-filter then exact verification.  cands: list of (sign, b)."""
    if not cands:
        return [], 0
    signs = np.array([c[0] for c in cands], dtype=np.int64)
    bs = np.array([c[1] for c in cands], dtype=np.int64)
    keep = _float_survivors(data, signs, bs, height)
    out = []
    for idx in np.nonzero(keep)[0]:
        y = _check_one(data, int(signs[idx]), tuple(int(v) for v in bs[idx]), height)
        if y is not None:
            out.append(y)
    return out, len(cands)


def _check_one(data: _UnitData, sign: int, b, height: float | None):
    m = data.m
    with mp.workprec(data.prec):
        logs = [mpmath.fsum(bi * data.M[i][k] for i, bi in enumerate(b) if bi) for k in range(m)]
        if height is not None and max(abs(x) for x in logs) > height + 1e-9:
            return None
        sgn = []
        for k in range(m):
            s = sign
            for i, bi in enumerate(b):
                if bi % 2 and data.signs[i][k] < 0:
                    s = -s
            sgn.append(s)
        total = mpmath.mpf(0)
        for s, x in zip(sgn, logs):
            one_minus = -mpmath.expm1(x) if s > 0 else 1 + mpmath.exp(x)
            if one_minus == 0:
                return None
            total += mpmath.log(abs(one_minus))
        # log|N(1 - Y)| is 0 or at least log 2
        if abs(total) > 0.25:
            return None
        vals = [s * mpmath.exp(x) for s, x in zip(sgn, logs)]
    y = _exact_unit(data, vals, max(abs(float(x)) for x in logs))
    return y if verify_solution(data.fld, y) else None


def _exact_unit(data: _UnitData, vals, h: float) -> FieldElement:
    prec = max(data.prec, 128 + int(4 * h))
    while prec <= 8 * data.prec + 4096:
        with mp.workprec(prec):
            y = element_from_embeddings(data.fld, vals, prec)
        if y is not None and y.is_unit():
            return y
        prec *= 2
    raise PrecisionExhausted("could not recover a unit from its embeddings")


def _box_candidates(data: _UnitData, bound: int):
    """Survivors of the float pre-filter over the box ||b|| <= bound, sign first."""
    r = data.r
    rng = np.arange(-bound, bound + 1)
    for sign in (1, -1):
        for first in rng:
            grids = np.meshgrid(*([np.array([first])] + [rng] * (r - 1)), indexing="ij")
            bs = np.stack([g.ravel() for g in grids], axis=1)
            keep = _float_survivors(data, np.full(len(bs), sign), bs, None)
            for row in bs[keep]:
                yield sign, tuple(int(v) for v in row)


def enumerate_solutions(fld: CyclicField, us: UnitSystem, bound: int, budget: int = DEFAULT_BUDGET,
                        precision: int = 512) -> list[FieldElement]:
    """All lambda = +-prod g_i^a_i with max|a_i| <= bound and 1 - lambda a unit.

    The result is closed under lambda -> 1 - lambda.
    """
    if bound < 1:
        raise ValueError("bound must be >= 1")
    total = 2 * (2 * bound + 1) ** us.rank
    if total > budget:
        raise BudgetExceeded(f"{total} exponent vectors exceed the budget {budget}")
    data = _UnitData(us, precision)
    found, _ = _check_candidates(data, list(_box_candidates(data, bound)), None)
    return _close(fld, found)


def _close(fld: CyclicField, found) -> list[FieldElement]:
    pool = {}
    for y in found:
        for z in (y, fld.one - y):
            pool[z.key()] = z
    return sorted(pool.values(), key=_canon)


def _canon(a: FieldElement):
    return (a.den, [(abs(c), c) for c in a.num])


def _scaled_basis(rows, scale_bits: int = 80):
    one = mpmath.mpf(2) ** scale_bits
    return [[int(mpmath.nint(x * one)) for x in row] for row in rows]


def _fp_task(args):
    """Coefficient vectors b with the quadratic form of ``rows`` below radius_sq."""
    rows, radius_sq, scale_bits = args
    ints = _scaled_basis(rows, scale_bits)
    red, transform = lll_reduce(ints)
    unit = 2.0 ** -scale_bits
    fbasis = [[x * unit for x in row] for row in red]
    r = len(rows)
    out = []
    for x in fincke_pohst_float(fbasis, float(radius_sq)):
        b = tuple(sum(x[k] * transform[k][i] for k in range(r)) for i in range(r))
        out.append(b)
    return out


def _height_tasks(data: _UnitData, height: float, h0: float, step: float):
    """Fincke-Pohst problems that together cover every pair with log height <= height."""
    m, r = data.m, data.r
    tasks = []
    # region 1: every unit of log height <= h0 (both members of small pairs)
    tasks.append(("small", None, None, ([row[:] for row in data.M], 2 * (m // 2) * h0 * h0, 80)))
    lo = h0
    while lo < height:
        hi = min(lo + step, height)
        with mp.workprec(data.prec):
            delta = 2 * mpmath.exp(-mpmath.mpf(lo) / (m - 1))
            w = mpmath.mpf(hi) / delta
            for j in range(m):
                rows = [[x if k != j else w * x for k, x in enumerate(row)] for row in data.M]
                # sum over k != j of log^2 <= (m-1) hi^2, and (w log_j)^2 <= hi^2
                tasks.append(("slab", j, (lo, hi, float(delta)), (rows, m * hi * hi, 80)))
        lo = hi
    return tasks


def enumerate_by_height(fld: CyclicField, us: UnitSystem, height: float, budget: int = DEFAULT_BUDGET,
                        precision: int = 512, threads: int | None = 1, h0: float | None = None,
                        step: float | None = None) -> tuple[list[FieldElement], dict]:
    """All solutions whose pair log height max(||log lambda||, ||log mu||) <= height.

    Small pairs (height <= h0) come from a full enumeration of units of
    log height <= h0.  Larger pairs are split into shells lo < H <= hi;
    for each embedding j the partner Y lies in the slab
    |log|sigma_j Y|| <= 2 exp(-lo/(m-1)) of the unit lattice, searched
    with Fincke-Pohst on a weighted log lattice.
    """
    data = _UnitData(us, precision)
    m = data.m
    h0 = max((m - 1) * math.log(2) + 1e-9, 6.0) if h0 is None else h0
    step = float(m - 1) if step is None else step
    tasks = _height_tasks(data, height, h0, step)
    payloads = [t[3] for t in tasks]
    if threads and threads > 1 and len(payloads) > 1:
        with ProcessPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(_fp_task, payloads))
    else:
        results = [_fp_task(p) for p in payloads]
    cands = []
    seen = set()
    for (kind, j, slab, _), vecs in zip(tasks, results):
        for b in vecs:
            for bb in (b, tuple(-x for x in b)):
                if kind == "small":
                    for s in (1, -1):
                        if (s, bb) not in seen:
                            seen.add((s, bb))
                            cands.append((s, bb))
                else:
                    # sigma_j(Y) is close to +1, which fixes the sign
                    s = 1
                    for i, bi in enumerate(bb):
                        if bi % 2 and data.signs[i][j] < 0:
                            s = -s
                    if (s, bb) not in seen:
                        seen.add((s, bb))
                        cands.append((s, bb))
        if len(cands) > budget:
            raise BudgetExceeded(f"more than {budget} candidates below height {height}")
    found, checked = _check_candidates(data, cands, height)
    stats = {"tasks": len(tasks), "candidates": len(cands), "checked": checked, "h0": h0, "step": step}
    return _close(fld, found), stats


# ---------------------------------------------------------------- orchestration


def solve_unit_equation(fld: CyclicField, cfg: SolveConfig | None = None,
                        units: UnitSystem | None = None) -> SolutionReport:
    cfg = cfg or SolveConfig()
    timings = {}
    t0 = time.perf_counter()
    if units is None:
        if cfg.mode == "rigorous":
            raise ValueError("rigorous mode needs a user-supplied fundamental unit system")
        units = saturate(cyclotomic_units(fld))
    elif cfg.mode == "rigorous" and units.asserted_mode != "user-fundamental":
        raise ValueError("rigorous mode needs asserted_mode = 'user-fundamental'")
    timings["units"] = round(time.perf_counter() - t0, 3)
    threads = cfg.threads if cfg.threads is not None else (os.cpu_count() or 1)
    bounds: dict = {}
    if cfg.mode == "heuristic":
        t1 = time.perf_counter()
        sols = enumerate_solutions(fld, units, cfg.heuristic_bound, cfg.budget, cfg.precision_schedule[0])
        timings["enumerate"] = round(time.perf_counter() - t1, 3)
        bounds = {"B_initial": None, "B_reduced_sequence": [], "B_final": cfg.heuristic_bound}
    else:
        last_err: Exception | None = None
        for prec in cfg.precision_schedule:
            try:
                t1 = time.perf_counter()
                data = _UnitData(units, prec)
                b0 = cfg.initial_bound_override or initial_bound(fld, units, prec)
                b_final, h_final, seq = _reduction_chain(data, b0)
                timings["reduce"] = round(time.perf_counter() - t1, 3)
                break
            except (NoProgress, PrecisionExhausted) as exc:
                last_err = exc
        else:
            raise last_err  # type: ignore[misc]
        bounds = {
            "B_initial": str(b0),
            "B_reduced_sequence": [s["B"] for s in seq],
            "H_sequence": [s["H"] for s in seq],
            "B_final": b_final,
            "H_final": h_final,
        }
        t2 = time.perf_counter()
        sols, stats = enumerate_by_height(fld, units, h_final, cfg.budget, prec, threads)
        timings["enumerate"] = round(time.perf_counter() - t2, 3)
        bounds["enumeration"] = stats
    orbits = symmetry_orbits(sols) if cfg.mode != "heuristic" else _partial_orbits(sols)
    timings["total"] = round(time.perf_counter() - t0, 3)
    return SolutionReport(fld, cfg.mode, sols, orbits, bounds, timings, CAVEATS[cfg.mode], units.digest())


def _partial_orbits(sols):
    """Like symmetry_orbits, but orbits keep only the members actually present."""
    pool = {s.key(): s for s in sols}
    seen: set = set()
    orbits = []
    for s in sorted(pool.values(), key=_canon):
        if s.key() in seen:
            continue
        orb = {t.key(): pool[t.key()] for t in _symmetries(s) if t.key() in pool}
        seen.update(orb)
        orbits.append(sorted(orb.values(), key=_canon))
    return orbits


def galois_closed(sols) -> bool:
    keys = {s.key() for s in sols}
    return all(galois_apply(1, s).key() in keys for s in sols)

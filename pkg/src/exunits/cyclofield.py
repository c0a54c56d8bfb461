"""Real abelian fields generated by Gaussian periods, with exact arithmetic.

A field is given by its conductor N and a subgroup H of (Z/NZ)^x
containing -1; the period eta = sum_{a in H} zeta_N^a generates the fixed
field of H.  Elements are integer vectors over the power basis
1, eta, ..., eta^(m-1) with a common denominator.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import permutations

import mpmath
from mpmath import iv, mp

from ._ivprec import bounds, ivprec

from .arith import SubgroupZn, factorize, index_ell_subgroups, unit_group_structure
from .errors import (
    ConductorNotExact,
    DivisionByZero,
    NonConstantSymmetricFunction,
    NonMaximalPowerBasis,
    RamificationAssumptionFailed,
    UnsupportedDegree,
)
from .polyring import (
    IntPoly,
    cyclotomic_poly,
    discriminant,
    factor_mod_p_shape,
    fp_roots,
    reduce_mod,
    resultant,
)

SCHEMA_VERSION = 1

# ------------------------------------------------------------ Z[zeta_N]
# Elements of Z[zeta_N] are lists of length N, index = exponent of zeta.


def _cyc_mul(a: list[int], b: list[int], n: int) -> list[int]:
    out = [0] * n
    nz_b = [(j, y) for j, y in enumerate(b) if y]
    for i, x in enumerate(a):
        if x:
            for j, y in nz_b:
                out[(i + j) % n] += x * y
    return out


def _cyc_reduce(a: list[int], n: int) -> IntPoly:
    """Canonical form of a cyclic vector modulo Phi_N."""
    return reduce_mod(IntPoly(a), cyclotomic_poly(n))


def _period_vector(coset, n: int) -> list[int]:
    v = [0] * n
    for a in coset:
        v[a] += 1
    return v


# ------------------------------------------------------------ construction


def _quotient_generator(sub: SubgroupZn, m: int) -> int:
    """Smallest residue whose image generates (Z/NZ)^x / H (cyclic of order m)."""
    n = sub.modulus
    for g in range(2, n):
        if math.gcd(g, n) != 1:
            continue
        x, k = g, 1
        while x not in sub:
            x = x * g % n
            k += 1
        if k == m:
            return g
    if m == 1:
        return 1
    raise ValueError("quotient group is not cyclic")


def _check_conductor_exact(n: int, sub: SubgroupZn) -> None:
    for p, _ in factorize(n).factors:
        d = n // p
        kernel = [a for a in range(1, n) if math.gcd(a, n) == 1 and a % d == 1 % d]
        if all(a in sub for a in kernel):
            raise ConductorNotExact(f"fixed field of H has conductor dividing {d}, not {n}")


def _coset_reps(sub: SubgroupZn, m: int) -> list[int]:
    n = sub.modulus
    g = _quotient_generator(sub, m)
    reps = [1]
    for _ in range(m - 1):
        reps.append(reps[-1] * g % n)
    return reps


# Above this many word operations the Z[zeta_N] product is replaced by
# certified interval evaluation (the coefficients are rational integers).
EXACT_WORK_LIMIT = 5 * 10**6


def _exact_feasible(n: int, h_size: int, m: int) -> bool:
    return n * h_size * m * m <= EXACT_WORK_LIMIT


@lru_cache(maxsize=4)
def _cos_table(n: int, prec: int) -> tuple:
    """cos(2 pi k / n) for 0 <= k <= n // 2."""
    with mp.workprec(prec):
        return tuple(mpmath.cospi(mpmath.mpf(2 * k) / n) for k in range(n // 2 + 1))


@lru_cache(maxsize=4)
def _cos_table_iv(n: int, prec: int) -> tuple:
    with ivprec(prec):
        two_pi = 2 * iv.pi
        return tuple(iv.cos(two_pi * k / n) for k in range(n // 2 + 1))


def _cos_lookup(table, n: int, k: int):
    k %= n
    return table[min(k, n - k)]


def _numeric_periods(n: int, h_elems, reps, prec: int):
    table = _cos_table(n, prec)
    with mp.workprec(prec):
        return [mpmath.fsum(_cos_lookup(table, n, c * a) for a in h_elems) for c in reps]


def _interval_periods(n: int, h_elems, reps, prec: int):
    table = _cos_table_iv(n, prec)
    with ivprec(prec):
        out = []
        for c in reps:
            acc = iv.mpf(0)
            for a in h_elems:
                acc += _cos_lookup(table, n, c * a)
            out.append(acc)
        return out


def _certified_minpoly(n: int, h_elems, reps) -> IntPoly:
    """prod (X - eta_i) from interval enclosures, each coefficient pinned to one integer."""
    m = len(reps)
    prec = 64 + m * (len(h_elems).bit_length() + 2)
    while True:
        vals = _interval_periods(n, h_elems, reps, prec)
        with ivprec(prec):
            e = [iv.mpf(1)]
            for v in vals:
                e = [e[0]] + [e[k] + v * e[k - 1] for k in range(1, len(e))] + [v * e[-1]]
            coeffs = []
            ok = True
            for k, enc in enumerate(e):
                lo, hi = bounds(enc)
                a, b = int(mpmath.ceil(lo)), int(mpmath.floor(hi))
                if a != b:
                    ok = False
                    break
                coeffs.append((-1) ** k * a)
        if ok:
            return IntPoly(reversed(coeffs))
        prec *= 2
        if prec > 1 << 14:
            raise NonConstantSymmetricFunction("could not isolate the period polynomial coefficients")


def _elementary_symmetric(values):
    e = [mpmath.mpf(1)]
    for v in values:
        e = [e[0]] + [e[k] + v * e[k - 1] for k in range(1, len(e))] + [v * e[-1]]
    return e


def period_minimal_polynomial(n: int, sub: SubgroupZn, check_numeric: bool = True) -> IntPoly:
    """Exact minimal polynomial of the Gaussian period of ``sub``.

    prod_i (X - eta_{c_i}) is expanded with coefficients in Z[zeta_N]; each
    coefficient must reduce to a constant modulo Phi_N.
    """
    if n % 2 == 0:
        raise ValueError("conductor must be odd")
    m = sub.index
    _check_conductor_exact(n, sub)
    reps = _coset_reps(sub, m)
    h_elems = sub.elements()
    if not _exact_feasible(n, len(h_elems), m):
        f = _certified_minpoly(n, h_elems, reps)
        if f.degree != m:
            raise NonConstantSymmetricFunction("certified period polynomial has the wrong degree")
        return f
    periods = [_period_vector([c * a % n for a in h_elems], n) for c in reps]

    # coefficients of prod (X - eta_i), highest first: e_0 = 1, e_1, ..., e_m
    unit = [0] * n
    unit[0] = 1
    elem = [unit]
    for eta in periods:
        nxt = [elem[0]]
        for k in range(1, len(elem)):
            prod_k = _cyc_mul(eta, elem[k - 1], n)
            nxt.append([x + y for x, y in zip(elem[k], prod_k)])
        nxt.append(_cyc_mul(eta, elem[-1], n))
        elem = nxt

    coeffs = []
    for k, vec in enumerate(elem):
        red = _cyc_reduce(vec, n)
        if red.degree > 0:
            raise NonConstantSymmetricFunction(f"e_{k} is not rational")
        coeffs.append((-1) ** k * red[0])
    f = IntPoly(reversed(coeffs))

    if check_numeric:
        with mp.workprec(512):
            approx = _elementary_symmetric(_numeric_periods(n, h_elems, reps, 512))
            tol = mpmath.mpf(2) ** -200
            for k, value in enumerate(approx):
                if abs(value - coeffs[k] * (-1) ** k) > tol:
                    raise NonConstantSymmetricFunction(f"numeric cross-check failed at e_{k}")
    return f


def expected_discriminant(n: int, m: int) -> int:
    if m == 1:
        return 1
    out = 1
    for p, _ in factorize(n).factors:
        out *= p ** (m - 1)
    return out


def _is_prime_small(k: int) -> bool:
    return k > 1 and all(k % d for d in range(2, math.isqrt(k) + 1))


@dataclass(eq=False)
class CyclicField:
    degree: int
    conductor: int
    subgroup: SubgroupZn
    minpoly: IntPoly
    coset_reps: list[int]
    galois_images: list[tuple[int, ...]] = field(default_factory=list)
    label: str = ""

    # ------------------------------------------------------------ build
    @classmethod
    def from_subgroup(cls, n: int, sub: SubgroupZn, label: str = "", check_numeric: bool = True):
        m = sub.index
        if -1 % n not in sub:
            raise ValueError("H must contain -1 (real field)")
        f = period_minimal_polynomial(n, sub, check_numeric=check_numeric)
        reps = _coset_reps(sub, m)
        fld = cls(m, n, sub, f, reps, [], label)
        fld.galois_images = fld._compute_galois_images()
        fld._verify_integral_basis()
        return fld

    @classmethod
    def real_cyclotomic(cls, p: int) -> "CyclicField":
        """Q(zeta_p)^+ with eta = zeta_p + zeta_p^-1."""
        group = unit_group_structure(p)
        sub = SubgroupZn.generated_by(group, [p - 1])
        return cls.from_subgroup(p, sub, label=f"Q(zeta_{p})^+")

    @cached_property
    def power_index(self) -> int:
        """[O_F : Z[eta]], from disc(minpoly) = index^2 * disc(F)."""
        q, r = divmod(discriminant(self.minpoly), self.field_discriminant)
        root = math.isqrt(q) if q > 0 else 0
        if r or root * root != q:
            raise NonMaximalPowerBasis("disc(minpoly) / disc(F) is not a square")
        return root

    @property
    def field_discriminant(self) -> int:
        m, n = self.degree, self.conductor
        if not (_is_prime_small(m) or _is_prime_small(n)):
            raise UnsupportedDegree("discriminant formula needs prime degree or prime conductor")
        return expected_discriminant(n, m)

    def _verify_integral_basis(self) -> None:
        """The conjugates eta_{c_i} must span a lattice of discriminant disc(F)."""
        m = self.degree
        mat = self.normal_matrix
        det = _frac_det(mat)
        disc_normal = det * det * discriminant(self.minpoly)
        if disc_normal != self.field_discriminant:
            raise NonMaximalPowerBasis(
                f"normal basis discriminant {disc_normal} != {self.field_discriminant}"
            )
        assert len(mat) == m

    @cached_property
    def normal_matrix(self) -> list[list[Fraction]]:
        """Row i: power-basis coordinates of eta_{c_i}."""
        return [[Fraction(c, den) for c in num] for num, den in self.galois_images]

    @cached_property
    def normal_inverse(self) -> list[list[Fraction]]:
        return _frac_inverse(self.normal_matrix)

    def _compute_galois_images(self):
        """Coordinates of eta_{c_i} in the power basis, verified in Z[zeta_N]."""
        m, n = self.degree, self.conductor
        idx = self.power_index
        prec = 256 + 16 * m + 4 * idx.bit_length()
        vals = self.numeric_periods(prec)
        h_elems = self.subgroup.elements()
        exact = _exact_feasible(n, len(h_elems), m)
        if exact:
            eta = _period_vector(h_elems, n)
            powers = [[1] + [0] * (n - 1)]
            for _ in range(1, m):
                powers.append(_cyc_mul(powers[-1], eta, n))
        images = []
        with mp.workprec(prec):
            vander = mpmath.matrix([[v**k for k in range(m)] for v in vals])
            for i in range(m):
                rhs = mpmath.matrix([vals[(i + j) % m] for j in range(m)])
                sol = mpmath.lu_solve(vander, rhs)
                coords = [int(mpmath.nint(x * idx)) for x in sol]
                if not exact:
                    images.append(self._checked_image(i, coords, idx, vals, prec))
                    continue
                combo = [0] * n
                for k, c in enumerate(coords):
                    if c:
                        combo = [x + c * y for x, y in zip(combo, powers[k])]
                target = _period_vector([self.coset_reps[i] * a % n for a in h_elems], n)
                if _cyc_reduce([x - idx * y for x, y in zip(combo, target)], n):
                    raise NonConstantSymmetricFunction(f"Galois image {i} failed exact check")
                g = math.gcd(idx, *coords)
                images.append((tuple(c // g for c in coords), idx // g))
        return images

    def _checked_image(self, i: int, coords, idx: int, vals, prec: int):
        """Without Z[zeta_N]: the image must be an exact root of f and match eta_{c_i}."""
        g = math.gcd(idx, *coords)
        num, den = tuple(c // g for c in coords), idx // g
        img = FieldElement(self, num, den)
        acc = FieldElement(self, [0])
        for c in reversed(self.minpoly.coeffs):
            acc = acc * img + c
        if not acc.is_zero:
            raise NonConstantSymmetricFunction(f"Galois image {i} is not a root of the minimal polynomial")
        with mp.workprec(prec):
            v0 = vals[0]
            approx = mpmath.fsum(mpmath.mpf(c) * v0**k for k, c in enumerate(num)) / den
            gap = min(abs(vals[i] - vals[j]) for j in range(len(vals)) if j != i)
            if abs(approx - vals[i]) > gap / 4:
                raise NonConstantSymmetricFunction(f"Galois image {i} matches the wrong conjugate")
        return num, den

    # ------------------------------------------------------------ numerics
    def numeric_periods(self, prec: int = 128) -> list:
        """eta in each real embedding, embedding j sends eta to eta_{c_j}."""
        key = ("periods", prec)
        cache = self.__dict__.setdefault("_numcache", {})
        if key not in cache:
            cache[key] = _numeric_periods(self.conductor, self.subgroup.elements(), self.coset_reps, prec)
        return cache[key]

    def interval_periods(self, prec: int = 512) -> list:
        """Certified enclosures of eta in each embedding (mpmath.iv)."""
        key = ("iv", prec)
        cache = self.__dict__.setdefault("_numcache", {})
        if key not in cache:
            cache[key] = _interval_periods(self.conductor, self.subgroup.elements(), self.coset_reps, prec)
        return cache[key]

    @cached_property
    def float_periods(self) -> list[float]:
        return [float(v) for v in self.numeric_periods(128)]

    # ------------------------------------------------------------ elements
    def element(self, coords, den: int = 1) -> "FieldElement":
        return FieldElement(self, coords, den)

    def __call__(self, value) -> "FieldElement":
        if isinstance(value, FieldElement):
            return value
        if isinstance(value, Fraction):
            return FieldElement(self, [value.numerator], value.denominator)
        return FieldElement(self, [int(value)])

    @property
    def eta(self) -> "FieldElement":
        return FieldElement(self, [0, 1])

    @property
    def one(self) -> "FieldElement":
        return FieldElement(self, [1])

    # ------------------------------------------------------------ identity
    def to_json(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "label": self.label,
            "degree": self.degree,
            "conductor": self.conductor,
            "subgroup_generators": list(self.subgroup.generators),
            "minpoly": self.minpoly.to_json(),
            "coset_reps": list(self.coset_reps),
            "galois_images": [
                {"num": [str(c) for c in num], "den": str(den)} for num, den in self.galois_images
            ],
        }

    @classmethod
    def from_json(cls, data: dict, verify: bool = True) -> "CyclicField":
        n = data["conductor"]
        sub = SubgroupZn.generated_by(unit_group_structure(n), data["subgroup_generators"])
        if verify:
            fld = cls.from_subgroup(n, sub, label=data.get("label", ""))
            stored = cls(
                data["degree"],
                n,
                sub,
                IntPoly.from_json(data["minpoly"]),
                list(data["coset_reps"]),
                _images_from_json(data["galois_images"]),
            )
            if (
                stored.minpoly != fld.minpoly
                or stored.coset_reps != fld.coset_reps
                or stored.galois_images != fld.galois_images
                or stored.degree != fld.degree
            ):
                raise ValueError("field file does not match its subgroup")
            return fld
        return cls(
            data["degree"],
            n,
            sub,
            IntPoly.from_json(data["minpoly"]),
            list(data["coset_reps"]),
            _images_from_json(data["galois_images"]),
            data.get("label", ""),
        )

    def digest(self) -> str:
        blob = json.dumps(
            {"N": self.conductor, "H": list(self.subgroup.generators), "f": self.minpoly.to_json()},
            sort_keys=True,
        )
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def __repr__(self):
        name = self.label or f"F(N={self.conductor})"
        return f"<CyclicField {name}: {self.minpoly}>"


def _images_from_json(data):
    return [(tuple(int(c) for c in img["num"]), int(img["den"])) for img in data]


def _frac_det(mat) -> Fraction:
    a = [list(map(Fraction, row)) for row in mat]
    n = len(a)
    det = Fraction(1)
    for k in range(n):
        piv = next((i for i in range(k, n) if a[i][k] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            det = -det
        det *= a[k][k]
        for i in range(k + 1, n):
            if a[i][k]:
                r = a[i][k] / a[k][k]
                for j in range(k, n):
                    a[i][j] -= r * a[k][j]
    return det


def _frac_inverse(mat) -> list[list[Fraction]]:
    n = len(mat)
    a = [list(map(Fraction, row)) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(mat)]
    for k in range(n):
        piv = next(i for i in range(k, n) if a[i][k] != 0)
        a[k], a[piv] = a[piv], a[k]
        inv = 1 / a[k][k]
        a[k] = [x * inv for x in a[k]]
        for i in range(n):
            if i != k and a[i][k]:
                r = a[i][k]
                a[i] = [x - r * y for x, y in zip(a[i], a[k])]
    return [row[n:] for row in a]


class FieldElement:
    """Immutable element sum_k num[k] eta^k / den of a CyclicField."""

    __slots__ = ("parent", "num", "den")

    def __init__(self, parent: CyclicField, coords, den: int = 1):
        m = parent.degree
        num = [int(c) for c in coords]
        if len(num) > m:
            num = list(reduce_mod(IntPoly(num), parent.minpoly).coeffs)
        num = num + [0] * (m - len(num))
        if den == 0:
            raise DivisionByZero("zero denominator")
        if den < 0:
            num, den = [-c for c in num], -den
        g = math.gcd(den, *num)
        if g > 1:
            num = [c // g for c in num]
            den //= g
        if not any(num):
            den = 1
        self.parent = parent
        self.num = tuple(num)
        self.den = den

    # arithmetic -------------------------------------------------------
    def _coerce(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            if other.parent is not self.parent:
                raise ValueError("elements of different fields")
            return other
        return self.parent(other)

    def __add__(self, other):
        o = self._coerce(other)
        return FieldElement(
            self.parent, [a * o.den + b * self.den for a, b in zip(self.num, o.num)], self.den * o.den
        )

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.parent, [-a for a in self.num], self.den)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        prod_ = reduce_mod(IntPoly(self.num) * IntPoly(o.num), self.parent.minpoly)
        return FieldElement(self.parent, prod_.coeffs, self.den * o.den)

    __rmul__ = __mul__

    def inverse(self) -> "FieldElement":
        """Extended Euclid for A(x) against the minimal polynomial over Q."""
        if not any(self.num):
            raise DivisionByZero("inverse of zero")
        f = [Fraction(c) for c in self.parent.minpoly.coeffs]
        a = [Fraction(c) for c in IntPoly(self.num).coeffs]
        # invariant: r0 = s0 * A (mod f), r1 = s1 * A (mod f)
        r0, s0 = f, [Fraction(0)]
        r1, s1 = a, [Fraction(1)]
        while len(r1) > 1:
            q, r = _qdivmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, _qsub(s0, _qmul(q, s1))
        if not r1 or r1[0] == 0:
            raise DivisionByZero("element is not invertible (minpoly reducible?)")
        c = r1[0]
        coeffs = [x / c * self.den for x in s1]
        den = math.lcm(*(x.denominator for x in coeffs)) if coeffs else 1
        return FieldElement(self.parent, [int(x * den) for x in coeffs], den)

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        out, base = self.parent.one, self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.parent(other)
        return (
            isinstance(other, FieldElement)
            and other.parent is self.parent
            and self.num == other.num
            and self.den == other.den
        )

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self):
        poly = str(IntPoly(self.num)).replace("x", "eta")
        return poly if self.den == 1 else f"({poly})/{self.den}"

    def key(self) -> tuple:
        return (self.den, self.num)

    # invariants -------------------------------------------------------
    def normal_coords(self) -> list[Fraction]:
        """Coordinates over the integral basis eta_{c_0}, ..., eta_{c_(m-1)}."""
        inv = self.parent.normal_inverse
        m = self.parent.degree
        return [
            sum((Fraction(self.num[k], self.den) * inv[k][i] for k in range(m)), Fraction(0))
            for i in range(m)
        ]

    @property
    def is_integral(self) -> bool:
        if self.parent.power_index == 1:
            return self.den == 1
        return self.parent.power_index % self.den == 0 and all(
            c.denominator == 1 for c in self.normal_coords()
        )

    @property
    def is_zero(self) -> bool:
        return not any(self.num)

    def norm(self) -> Fraction:
        m = self.parent.degree
        return Fraction(resultant(self.parent.minpoly, IntPoly(self.num)), self.den**m)

    def trace(self) -> Fraction:
        vals = [galois_apply(k, self) for k in range(self.parent.degree)]
        total = vals[0]
        for v in vals[1:]:
            total = total + v
        assert all(c == 0 for c in total.num[1:])
        return Fraction(total.num[0], total.den)

    def is_unit(self) -> bool:
        return self.is_integral and not self.is_zero and abs(self.norm()) == 1

    # numerics ---------------------------------------------------------
    def embeddings(self, prec: int = 128) -> list:
        periods = self.parent.numeric_periods(prec)
        with mp.workprec(prec):
            return [
                mpmath.fsum(mpmath.mpf(c) * v**k for k, c in enumerate(self.num) if c) / self.den
                for v in periods
            ]

    def interval_embeddings(self, prec: int = 512) -> list:
        periods = self.parent.interval_periods(prec)
        with ivprec(prec):
            out = []
            for v in periods:
                acc = iv.mpf(0)
                for c in reversed(self.num):
                    acc = acc * v + c
                out.append(acc / self.den)
            return out

    def to_json(self) -> dict:
        return {"num": [str(c) for c in self.num], "den": str(self.den)}

    @classmethod
    def from_json(cls, parent: CyclicField, data: dict) -> "FieldElement":
        return cls(parent, [int(c) for c in data["num"]], int(data["den"]))


def _qtrim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _qsub(a, b):
    n = max(len(a), len(b))
    return _qtrim([(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)])


def _qmul(a, b):
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return _qtrim(out)


def _qdivmod(a, b):
    r = list(a)
    db = len(b) - 1
    q = [Fraction(0)] * max(len(r) - db, 1)
    for k in range(len(r) - 1 - db, -1, -1):
        c = r[k + db] / b[-1]
        q[k] = c
        for i, bc in enumerate(b):
            r[k + i] -= c * bc
    return _qtrim(q), _qtrim(r[:db])


# ------------------------------------------------------------ Galois action


def _image_of_eta_power_table(fld: CyclicField, k: int) -> list[FieldElement]:
    cache = fld.__dict__.setdefault("_powtables", {})
    if k not in cache:
        num, den = fld.galois_images[k]
        img = FieldElement(fld, num, den)
        table = [fld.one]
        for _ in range(1, fld.degree):
            table.append(table[-1] * img)
        cache[k] = table
    return cache[k]


def galois_apply(k: int, a: FieldElement) -> FieldElement:
    """sigma^k(a), where sigma(eta_{c_i}) = eta_{c_{i+1}}."""
    fld = a.parent
    k %= fld.degree
    if k == 0:
        return a
    table = _image_of_eta_power_table(fld, k)
    m = fld.degree
    common = math.lcm(*(t.den for t in table))
    acc = [0] * m
    for c, t in zip(a.num, table):
        if c:
            scale = c * (common // t.den)
            for i in range(m):
                acc[i] += scale * t.num[i]
    return FieldElement(fld, acc, a.den * common)


# ------------------------------------------------------------ subfields


def subfields_of_conductor(ell: int, n: int, check_numeric: bool = True) -> list[CyclicField]:
    """Degree-``ell`` subfields of Q(zeta_n) whose conductor is exactly n."""
    group = unit_group_structure(n)
    out = []
    for sub in index_ell_subgroups(group, ell):
        try:
            f = CyclicField.from_subgroup(n, sub, check_numeric=check_numeric)
        except ConductorNotExact:
            continue
        out.append(f)
    for i, f in enumerate(out, 1):
        f.label = f"F_{n}" if len(out) == 1 else f"F_{n},{i}"
    return out


def residue_mod_ramified(a: FieldElement, p: int) -> int:
    """The integer b with a = b modulo the prime above a totally ramified p."""
    fld = a.parent
    if a.den % p == 0:
        raise ValueError("denominator divisible by p")
    if fld.power_index % p == 0:
        raise RamificationAssumptionFailed(f"{p} divides [O_F : Z[eta]]")
    shape = factor_mod_p_shape(fld.minpoly, p)
    if shape != [(1, fld.degree)]:
        raise RamificationAssumptionFailed(f"minpoly mod {p} has shape {shape}")
    (root,) = fp_roots(fld.minpoly, p)
    acc = 0
    for c in reversed(a.num):
        acc = (acc * root + c) % p
    return acc * pow(a.den, -1, p) % p


# ------------------------------------------------------------ field equality


def _shape_signature(f: IntPoly, q: int):
    return tuple(sorted(d for d, _ in factor_mod_p_shape(f, q)))


def _real_roots(f: IntPoly, dps: int):
    with mp.workdps(dps):
        roots = mpmath.polyroots([c for c in reversed(f.coeffs)], maxsteps=400, extraprec=4 * dps)
        return [mpmath.re(r) for r in roots]


def same_field(f: IntPoly, g: IntPoly, shape_primes: int = 200, dps: int = 120):
    """Decide Q[x]/(f) == Q[x]/(g) for monic irreducible f, g of equal degree.

    Returns True with an exactly verified root of g in Q[x]/(f), False when
    the splitting shapes of f and g differ at some prime, else "unknown".
    """
    if f == g:
        return True
    if f.degree != g.degree:
        return False
    df, dg = discriminant(f), discriminant(g)
    if (df > 0) != (dg > 0):
        return False
    q = 2
    checked = 0
    while checked < shape_primes:
        q += 1
        if not _is_prime_small(q) or df % q == 0 or dg % q == 0:
            continue
        checked += 1
        if _shape_signature(f, q) != _shape_signature(g, q):
            return False
    root = find_root_in_field(f, g, dps)
    return True if root is not None else "unknown"


def find_root_in_field(f: IntPoly, g: IntPoly, dps: int = 120):
    """A polynomial r with g(r(x)) = 0 mod f, found numerically and verified exactly."""
    m = f.degree
    df = abs(discriminant(f))
    den = 1
    for p, e in factorize(df).factors:
        den *= p ** (e // 2)
    fr = _real_roots(f, dps)
    gr = _real_roots(g, dps)
    with mp.workdps(dps):
        vander = mpmath.matrix([[r**k for k in range(m)] for r in fr])
        tol = mpmath.mpf(10) ** (-dps // 3)
        for perm in permutations(range(m)):
            rhs = mpmath.matrix([gr[i] for i in perm])
            try:
                sol = mpmath.lu_solve(vander, rhs)
            except ZeroDivisionError:
                return None
            scaled = [x * den for x in sol]
            ints = [mpmath.nint(x) for x in scaled]
            if any(abs(x - y) > tol for x, y in zip(scaled, ints)):
                continue
            g_num = IntPoly(int(c) for c in ints)
            # den^m * g(r_num / den) must vanish mod f
            total = IntPoly()
            power = IntPoly([1])
            for k, c in enumerate(g.coeffs):
                total = total + power * (c * den ** (m - k))
                power = reduce_mod(power * g_num, f)
            if not reduce_mod(total, f):
                return g_num, den
    return None

"""Dense univariate polynomials over Z, Q and F_p.

Coefficients are stored constant term first.  ``IntPoly`` is immutable
and canonical (no trailing zeros; the zero polynomial has no coefficients).
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

from .arith import factorize


class IntPoly:
    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        c = [int(a) for a in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.coeffs = tuple(c)

    @classmethod
    def x(cls) -> "IntPoly":
        return cls((0, 1))

    @classmethod
    def monomial(cls, n: int, c: int = 1) -> "IntPoly":
        return cls([0] * n + [c])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lc(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, int):
            other = IntPoly((other,))
        return isinstance(other, IntPoly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"IntPoly({list(self.coeffs)})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            mag = abs(c)
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            body = str(mag) if (mag != 1 or i == 0) else ""
            if body and mono:
                body += "*"
            sign = "-" if c < 0 else "+"
            terms.append((sign, body + mono))
        first_sign, first = terms[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, t in terms[1:]:
            out += f" {sign} {t}"
        return out

    def __getitem__(self, i):
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def __neg__(self):
        return IntPoly(-a for a in self.coeffs)

    def __add__(self, other):
        other = _as_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return IntPoly(self[i] + other[i] for i in range(n))

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        other = _as_poly(other)
        if not self.coeffs or not other.coeffs:
            return IntPoly()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return IntPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out, base = IntPoly((1,)), self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def compose(self, inner: "IntPoly") -> "IntPoly":
        acc = IntPoly()
        for c in reversed(self.coeffs):
            acc = acc * inner + c
        return acc

    def derivative(self) -> "IntPoly":
        return IntPoly(i * c for i, c in enumerate(self.coeffs) if i)

    def content(self) -> int:
        return math.gcd(*self.coeffs) if self.coeffs else 0

    def primitive(self) -> "IntPoly":
        c = self.content()
        if c == 0:
            return self
        if self.lc < 0:
            c = -c
        return IntPoly(a // c for a in self.coeffs)

    def divmod_exact(self, other: "IntPoly"):
        """Division over Z; requires every step's quotient to be integral."""
        q, r = poly_divmod_q(self, other)
        if any(Fraction(c).denominator != 1 for c in q + r):
            raise ArithmeticError("division not exact over Z")
        return IntPoly(q), IntPoly(r)

    def __floordiv__(self, other):
        return self.divmod_exact(_as_poly(other))[0]

    def __mod__(self, other):
        return self.divmod_exact(_as_poly(other))[1]

    def to_json(self) -> list[str]:
        return [str(c) for c in self.coeffs]

    @classmethod
    def from_json(cls, data) -> "IntPoly":
        return cls(int(c) for c in data)


def _as_poly(a) -> IntPoly:
    return a if isinstance(a, IntPoly) else IntPoly((a,))


def poly_divmod_q(a: IntPoly, b: IntPoly):
    """Division in Q[x]; returns coefficient lists of Fractions (quotient, remainder)."""
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    r = [Fraction(c) for c in a.coeffs]
    db, lb = b.degree, b.lc
    if len(r) - 1 < db:
        return [], r
    q = [Fraction(0)] * (len(r) - db)
    for k in range(len(r) - 1 - db, -1, -1):
        c = r[k + db] / lb
        q[k] = c
        if c:
            for i, bc in enumerate(b.coeffs):
                r[k + i] -= c * bc
    r = r[:db]
    while r and r[-1] == 0:
        r.pop()
    return q, r


def pseudo_remainder(a: IntPoly, b: IntPoly) -> IntPoly:
    """prem(a, b): remainder of lc(b)^(deg a - deg b + 1) * a divided by b."""
    r = list(a.coeffs)
    db, lb = b.degree, b.lc
    e = len(r) - 1 - db + 1
    while r and len(r) - 1 >= db:
        c = r[-1]
        shift = len(r) - 1 - db
        r = [lb * x for x in r]
        for i, bc in enumerate(b.coeffs):
            r[shift + i] -= c * bc
        e -= 1
        while r and r[-1] == 0:
            r.pop()
    return IntPoly(lb**e * x for x in r)


def resultant(f: IntPoly, g: IntPoly) -> int:
    """Res(f, g) = lc(f)^deg(g) * prod g(alpha) over roots alpha of f.

    Subresultant pseudo-remainder sequence over Z; no fractions appear.
    """
    if not f or not g:
        return 0
    a, b = f, g
    if a.degree == 0:
        return a.lc**b.degree
    if b.degree == 0:
        return b.lc**a.degree
    ca, cb = a.content(), b.content()
    a = IntPoly(c // ca for c in a.coeffs)
    b = IntPoly(c // cb for c in b.coeffs)
    t = ca**g.degree * cb**f.degree
    s = 1
    if a.degree < b.degree:
        a, b = b, a
        if a.degree % 2 and b.degree % 2:
            s = -s
    gg = hh = 1
    while True:
        delta = a.degree - b.degree
        if a.degree % 2 and b.degree % 2:
            s = -s
        r = pseudo_remainder(a, b)
        a = b
        if not r:
            return 0
        div = gg * hh**delta
        b = IntPoly(c // div for c in r.coeffs)
        gg = a.lc
        if delta:
            hh = gg**delta // hh ** (delta - 1)
        if b.degree <= 0:
            break
    da = a.degree
    hh = b.lc**da // hh ** (da - 1) if da >= 1 else hh
    return s * t * hh


def discriminant(f: IntPoly) -> int:
    d = f.degree
    if d < 1:
        raise ValueError("discriminant needs degree >= 1")
    r = resultant(f, f.derivative())
    q, rem = divmod(r, f.lc)
    assert rem == 0
    return (-1) ** (d * (d - 1) // 2) * q


def sylvester_matrix(f: IntPoly, g: IntPoly) -> list[list[int]]:
    m, n = f.degree, g.degree
    size = m + n
    rows = []
    fc, gc = list(reversed(f.coeffs)), list(reversed(g.coeffs))
    for i in range(n):
        rows.append([0] * i + fc + [0] * (size - m - 1 - i))
    for i in range(m):
        rows.append([0] * i + gc + [0] * (size - n - 1 - i))
    return rows


def bareiss_det(matrix) -> int:
    """Fraction-free determinant of a square integer matrix."""
    a = [list(map(int, row)) for row in matrix]
    n = len(a)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
        prev = akk
    return sign * a[n - 1][n - 1]


def sylvester_resultant(f: IntPoly, g: IntPoly) -> int:
    """Independent oracle: det of the Sylvester matrix (Bareiss)."""
    if f.degree == 0:
        return f.lc**g.degree
    if g.degree == 0:
        return g.lc**f.degree
    return bareiss_det(sylvester_matrix(f, g))


@lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> IntPoly:
    if n < 1:
        raise ValueError("n must be positive")
    p = IntPoly.monomial(n) - 1
    for d in range(1, n):
        if n % d == 0:
            p, r = p.divmod_exact(cyclotomic_poly(d))
            assert not r
    return p


def euler_phi(n: int) -> int:
    out = n
    for p, _ in factorize(n).factors:
        out = out // p * (p - 1)
    return out


class RatPoly:
    """Polynomial with rational coefficients: ``numerator / denominator``."""

    __slots__ = ("numerator", "denominator")

    def __init__(self, numerator: IntPoly, denominator: int = 1):
        if denominator == 0:
            raise ZeroDivisionError("zero denominator")
        if denominator < 0:
            numerator, denominator = -numerator, -denominator
        g = math.gcd(numerator.content(), denominator)
        if g > 1:
            numerator = IntPoly(c // g for c in numerator.coeffs)
            denominator //= g
        if not numerator:
            denominator = 1
        self.numerator = numerator
        self.denominator = denominator

    @classmethod
    def from_fractions(cls, coeffs) -> "RatPoly":
        fr = [Fraction(c) for c in coeffs]
        den = math.lcm(*(c.denominator for c in fr)) if fr else 1
        return cls(IntPoly(int(c * den) for c in fr), den)

    def fractions(self) -> list[Fraction]:
        return [Fraction(c, self.denominator) for c in self.numerator.coeffs]

    def __eq__(self, other):
        if isinstance(other, int):
            other = RatPoly(IntPoly((other,)))
        return (
            isinstance(other, RatPoly)
            and self.numerator == other.numerator
            and self.denominator == other.denominator
        )

    def __repr__(self):
        return f"RatPoly({list(self.numerator.coeffs)}, {self.denominator})"


def reduce_mod(a: IntPoly, m: IntPoly) -> IntPoly:
    """Remainder of ``a`` modulo a monic ``m`` (stays in Z[x])."""
    if m.lc != 1:
        raise ValueError("modulus must be monic")
    r = list(a.coeffs)
    dm = m.degree
    mc = m.coeffs
    for k in range(len(r) - 1, dm - 1, -1):
        c = r[k]
        if c:
            base = k - dm
            for i in range(dm):
                if mc[i]:
                    r[base + i] -= c * mc[i]
            r[k] = 0
    return IntPoly(r[:dm])


def mod_poly_mul(a: RatPoly, b: RatPoly, m: IntPoly) -> RatPoly:
    return RatPoly(reduce_mod(a.numerator * b.numerator, m), a.denominator * b.denominator)


# ---------------------------------------------------------------- F_p[x]
# Polynomials mod p are plain lists of ints in [0, p), constant term first.


def _trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def fp(f: IntPoly, p: int) -> list[int]:
    return _trim([c % p for c in f.coeffs])


def fp_sub(a, b, p):
    n = max(len(a), len(b))
    return _trim([((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p for i in range(n)])


def fp_mul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim([c % p for c in out])


def fp_divmod(a, b, p):
    b = _trim(list(b))
    if not b:
        raise ZeroDivisionError
    r = list(a)
    inv = pow(b[-1], -1, p)
    db = len(b) - 1
    q = [0] * max(len(r) - db, 0)
    for k in range(len(r) - 1 - db, -1, -1):
        c = r[k + db] * inv % p
        q[k] = c
        if c:
            for i, bc in enumerate(b):
                r[k + i] = (r[k + i] - c * bc) % p
    return _trim(q), _trim(r[:db])


def fp_gcd(a, b, p):
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, fp_divmod(a, b, p)[1]
    if a:
        inv = pow(a[-1], -1, p)
        a = [c * inv % p for c in a]
    return a


def fp_powmod(base, e, mod, p):
    out = [1]
    base = fp_divmod(base, mod, p)[1]
    while e:
        if e & 1:
            out = fp_divmod(fp_mul(out, base, p), mod, p)[1]
        base = fp_divmod(fp_mul(base, base, p), mod, p)[1]
        e >>= 1
    return out


def fp_derivative(a, p):
    return _trim([(i * c) % p for i, c in enumerate(a)][1:])


def _fp_squarefree(f, p):
    """Musser's square-free decomposition over F_p; list of (factor, multiplicity)."""
    out = []
    df = fp_derivative(f, p)
    if not df:
        # f = g(x^p) = g(x)^p over F_p
        g = [f[i] for i in range(0, len(f), p)]
        return [(h, m * p) for h, m in _fp_squarefree(g, p)]
    c = fp_gcd(f, df, p)
    w = fp_divmod(f, c, p)[0]
    i = 1
    while len(w) > 1:
        y = fp_gcd(w, c, p)
        fac = fp_divmod(w, y, p)[0]
        if len(fac) > 1:
            out.append((fac, i))
        w = y
        c = fp_divmod(c, y, p)[0]
        i += 1
    if len(c) > 1:
        g = [c[k] for k in range(0, len(c), p)]
        out.extend((h, m * p) for h, m in _fp_squarefree(g, p))
    return out


def _fp_ddf_degrees(f, p):
    """Degrees of the irreducible factors of a monic square-free f (distinct-degree)."""
    degs = []
    h = [0, 1]
    d = 0
    f = list(f)
    while len(f) - 1 >= 2 * (d + 1):
        d += 1
        h = fp_powmod(h, p, f, p)
        g = fp_gcd(fp_sub(h, [0, 1], p), f, p)
        if len(g) > 1:
            degs.extend([d] * ((len(g) - 1) // d))
            f = fp_divmod(f, g, p)[0]
            h = fp_divmod(h, f, p)[1]
    if len(f) > 1:
        degs.append(len(f) - 1)
    return degs


def factor_mod_p_shape(f: IntPoly, p: int) -> list[tuple[int, int]]:
    """Sorted (degree, multiplicity) of the irreducible factors of f mod p."""
    a = fp(f, p)
    if len(a) <= 1:
        return []
    inv = pow(a[-1], -1, p)
    a = [c * inv % p for c in a]
    shape = []
    for part, mult in _fp_squarefree(a, p):
        shape.extend((d, mult) for d in _fp_ddf_degrees(part, p))
    return sorted(shape)


def fp_roots(f: IntPoly, p: int) -> list[int]:
    """Distinct roots of f in F_p by exhaustive evaluation (p is small here)."""
    a = fp(f, p)
    out = []
    for x in range(p):
        acc = 0
        for c in reversed(a):
            acc = (acc * x + c) % p
        if acc == 0:
            out.append(x)
    return out

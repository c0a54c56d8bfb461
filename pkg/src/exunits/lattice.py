"""Exact LLL reduction and short-vector tools for small integer lattices.

Rows are basis vectors.  Everything is done over Z / Q with no floating
point, which is affordable because the dimensions here stay below ~10.
"""

from __future__ import annotations

import math
from fractions import Fraction

DEFAULT_DELTA = Fraction(99, 100)


def _dot(u, v):
    return sum(a * b for a, b in zip(u, v))


def gram_schmidt(basis):
    """Exact squared norms ||b_i*||^2 and the mu coefficients."""
    n = len(basis)
    bstar: list[list[Fraction]] = []
    norms: list[Fraction] = []
    mu = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        v = [Fraction(x) for x in basis[i]]
        for j in range(i):
            if norms[j] == 0:
                continue
            mu[i][j] = Fraction(_dot(basis[i], bstar[j])) / norms[j]
            v = [a - mu[i][j] * b for a, b in zip(v, bstar[j])]
        bstar.append(v)
        norms.append(_dot(v, v))
    return norms, mu


def lll_reduce(basis, delta: Fraction = DEFAULT_DELTA):
    """LLL-reduce the rows of ``basis`` (linearly independent integer vectors).

    Returns ``(reduced, transform)`` with ``reduced = transform * basis`` and
    ``transform`` unimodular.
    """
    delta = Fraction(delta)
    if not Fraction(1, 4) < delta < 1:
        raise ValueError("delta must lie in (1/4, 1)")
    b = [[int(x) for x in row] for row in basis]
    n = len(b)
    if n == 0:
        return [], []
    u = [[int(i == j) for j in range(n)] for i in range(n)]
    norms, mu = gram_schmidt(b)
    if any(x == 0 for x in norms):
        raise ValueError("basis vectors are linearly dependent")

    def size_reduce(k, j):
        q = round(mu[k][j])
        if q:
            b[k] = [x - q * y for x, y in zip(b[k], b[j])]
            u[k] = [x - q * y for x, y in zip(u[k], u[j])]
            for i in range(j):
                mu[k][i] -= q * mu[j][i]
            mu[k][j] -= q

    k = 1
    while k < n:
        size_reduce(k, k - 1)
        if norms[k] >= (delta - mu[k][k - 1] ** 2) * norms[k - 1]:
            for j in range(k - 2, -1, -1):
                size_reduce(k, j)
            k += 1
            continue
        # swap b_k and b_{k-1}, update Gram-Schmidt data in place
        m = mu[k][k - 1]
        bnew = norms[k] + m * m * norms[k - 1]
        mu[k][k - 1] = m * norms[k - 1] / bnew
        norms[k] = norms[k - 1] * norms[k] / bnew
        norms[k - 1] = bnew
        b[k], b[k - 1] = b[k - 1], b[k]
        u[k], u[k - 1] = u[k - 1], u[k]
        for j in range(k - 1):
            mu[k][j], mu[k - 1][j] = mu[k - 1][j], mu[k][j]
        for i in range(k + 1, n):
            t = mu[i][k]
            mu[i][k] = mu[i][k - 1] - m * t
            mu[i][k - 1] = t + mu[k][k - 1] * mu[i][k]
        k = max(k - 1, 1)
    return b, u


def is_lll_reduced(basis, delta: Fraction = DEFAULT_DELTA) -> bool:
    norms, mu = gram_schmidt(basis)
    n = len(basis)
    for i in range(n):
        for j in range(i):
            if abs(mu[i][j]) > Fraction(1, 2):
                return False
    return all(norms[k] >= (Fraction(delta) - mu[k][k - 1] ** 2) * norms[k - 1] for k in range(1, n))


def shortest_vector_lower_bound(basis) -> Fraction:
    """Lower bound on the nonzero minimum: min_i ||b_i*||, returned squared-root-free.

    The exact bound is sqrt(min ||b_i*||^2); we return the largest rational
    r with r^2 <= min ||b_i*||^2 among r = floor(sqrt(.) * 2^40) / 2^40,
    so the result is never above the true minimum.
    """
    norms, _ = gram_schmidt(basis)
    smallest = min(norms)
    return _sqrt_floor(smallest)


def shortest_vector_lower_bound_sq(basis) -> Fraction:
    """Squared version of :func:`shortest_vector_lower_bound`, exact."""
    norms, _ = gram_schmidt(basis)
    return min(norms)


def _sqrt_floor(x: Fraction, bits: int = 40) -> Fraction:
    if x == 1:
        return Fraction(1)
    scale = 1 << (2 * bits)
    num = x.numerator * scale // x.denominator
    r = Fraction(math.isqrt(num), 1 << bits)
    if r * r == x:
        return r
    # perfect squares with small denominators come back exactly
    p, q = math.isqrt(x.numerator), math.isqrt(x.denominator)
    if p * p == x.numerator and q * q == x.denominator:
        return Fraction(p, q)
    return r


def determinant(basis) -> int:
    from .polyring import bareiss_det

    return bareiss_det(basis)


def fincke_pohst(gram, radius_sq, limit: int | None = None):
    """All nonzero integer x (up to sign) with x^T G x <= radius_sq.

    ``gram`` is a positive definite matrix of Fractions or ints; the search
    uses the exact Cholesky-style decomposition (Fincke-Pohst) so no vector is
    missed.  Yields vectors with first nonzero coordinate positive.
    """
    n = len(gram)
    q = [[Fraction(x) for x in row] for row in gram]
    # q[i][i] -> diagonal, q[i][j] (j > i) -> mu-like coefficients
    for i in range(n):
        for j in range(i + 1, n):
            q[j][i] = q[i][j]
            q[i][j] = q[i][j] / q[i][i]
        for k in range(i + 1, n):
            for j in range(k, n):
                q[k][j] -= q[k][i] * q[i][j]
    radius_sq = Fraction(radius_sq)
    x = [0] * n
    count = 0

    def rec(i, remaining):
        nonlocal count
        center = -sum((q[i][j] * x[j] for j in range(i + 1, n)), Fraction(0))
        span = remaining / q[i][i]
        lo = math.ceil(center - _sqrt_up(span))
        hi = math.floor(center + _sqrt_up(span))
        for v in range(lo, hi + 1):
            d = v - center
            used = q[i][i] * d * d
            if used > remaining:
                continue
            x[i] = v
            if i == 0:
                if any(x):
                    first = next(c for c in x if c)
                    if first > 0:
                        count += 1
                        if limit is not None and count > limit:
                            raise OverflowError("Fincke-Pohst enumeration limit exceeded")
                        yield list(x)
            else:
                yield from rec(i - 1, remaining - used)
        x[i] = 0

    # leading nonzero in enumeration order is x[n-1] first; sign filter above
    # uses x[0] so flip ordering for the output
    yield from rec(n - 1, radius_sq)


def _sqrt_up(x: Fraction) -> Fraction:
    if x <= 0:
        return Fraction(0)
    r = Fraction(math.isqrt(x.numerator * (1 << 40) // x.denominator) + 1, 1 << 20)
    return r


def fincke_pohst_float(basis, radius_sq: float, margin: float = 1e-9):
    """Coefficient vectors x (up to sign, x != 0) with ||x B||^2 <= radius_sq.

    Floating-point variant for bases that are already LLL-reduced, where
    the Gram matrix is well conditioned; the radius is inflated by a
    relative ``margin`` so rounding never loses a boundary point.
    """
    n = len(basis)
    gram = [[sum(a * b for a, b in zip(u, v)) for v in basis] for u in basis]
    q = [row[:] for row in gram]
    for i in range(n):
        if q[i][i] <= 0:
            raise ValueError("basis is numerically dependent")
        for j in range(i + 1, n):
            q[j][i] = q[i][j]
            q[i][j] = q[i][j] / q[i][i]
        for k in range(i + 1, n):
            for j in range(k, n):
                q[k][j] -= q[k][i] * q[i][j]
    bound = radius_sq * (1 + margin) + margin
    x = [0] * n

    def rec(i, remaining):
        center = -sum(q[i][j] * x[j] for j in range(i + 1, n))
        span = math.sqrt(max(remaining, 0.0) / q[i][i])
        lo, hi = math.ceil(center - span), math.floor(center + span)
        top = all(v == 0 for v in x[i + 1:])
        if top:
            lo = max(lo, 0)  # sign normalisation: leading nonzero (from the end) positive
        for v in range(lo, hi + 1):
            d = v - center
            rest = remaining - q[i][i] * d * d
            if rest < -margin:
                continue
            x[i] = v
            if i == 0:
                if any(x):
                    yield tuple(x)
            else:
                yield from rec(i - 1, rest)
        x[i] = 0

    yield from rec(n - 1, bound)

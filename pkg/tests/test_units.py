import random

import mpmath
import pytest

from exunits.cyclofield import galois_apply
from exunits.errors import PrecisionExhausted
from exunits.units import (
    UnitSystem,
    build_unit_system,
    cyclotomic_units,
    express_in_basis,
    log_embedding,
    product_of_powers,
    saturate,
    subgroup_regulator,
)


def close(a, b, factor=1, tol=mpmath.mpf(2) ** -300):
    with mpmath.mp.workprec(600):
        return abs(a - factor * b) <= tol * max(1, abs(a))


def random_unimodular(rng, r):
    """Product of random elementary row operations and sign flips."""
    u = [[int(i == j) for j in range(r)] for i in range(r)]
    for _ in range(6):
        i, j = rng.sample(range(r), 2)
        c = rng.choice([-2, -1, 1, 2])
        u[i] = [x + c * y for x, y in zip(u[i], u[j])]
    k = rng.randrange(r)
    u[k] = [-x for x in u[k]]
    return u


def test_rank_and_unit_property(fields5, units5):
    for label, us in units5.items():
        f = fields5[label]
        assert us.rank == 4
        for g in us.generators:
            assert g.is_integral and abs(g.norm()) == 1
        assert us.regulator > 0 and us.regulator_radius < mpmath.mpf(2) ** -200


def test_cyclotomic_units_full_rank(fields5):
    for f in fields5.values():
        us = cyclotomic_units(f)
        assert us.rank == 4 and us.regulator > 0
        assert us.asserted_mode == "cyclotomic"


def test_log_rows_sum_to_zero(units5):
    for us in units5.values():
        with mpmath.mp.workprec(us.precision):
            for row in us.log_matrix:
                assert abs(mpmath.fsum(row)) <= 5 * us.log_radius + mpmath.mpf(2) ** -400


def test_log_embedding_examples(f11):
    for u in (f11.one, -f11.one):
        e = log_embedding(u)
        assert all(x == 0 for x in e.values)
    e = log_embedding(f11.eta + 2)
    with mpmath.mp.workprec(512):
        assert abs(mpmath.fsum(e.values)) <= 5 * e.radius
    with pytest.raises(ValueError):
        log_embedding(f11(0))


def test_log_embedding_matches_plain_evaluation(f11):
    u = f11.element([3, -1, 2, 0, 1])
    e = log_embedding(u, 256)
    with mpmath.mp.workprec(256):
        plain = [mpmath.log(abs(x)) for x in u.embeddings(256)]
        for a, b in zip(e.values, plain):
            assert abs(a - b) < mpmath.mpf(2) ** -200


def test_regulator_invariance(fields5, units5):
    rng = random.Random(17)
    for label in ("F_11", "F_31"):
        f, us = fields5[label], units5[label]
        for _ in range(10):
            t = random_unimodular(rng, us.rank)
            gens = [product_of_powers(f, us.generators, row) for row in t]
            other = build_unit_system(f, gens, us.precision)
            assert close(other.regulator, us.regulator)


def test_regulator_inverse_generator(f11, units5):
    us = units5["F_11"]
    gens = list(us.generators)
    gens[0] = gens[0].inverse()
    other = build_unit_system(f11, gens, us.precision)
    assert close(other.regulator, us.regulator)


def test_regulator_rank_deficient(f11, units5):
    us = units5["F_11"]
    g = us.generators
    rows = [log_embedding(x).values for x in (g[0], g[1], g[0] * g[1], g[2])]
    with pytest.raises(PrecisionExhausted):
        subgroup_regulator(rows, mpmath.mpf(2) ** -400, 512)


def test_saturation_recovers_square(f11, units5):
    us = units5["F_11"]
    gens = list(us.generators)
    gens[1] = gens[1] ** 2
    squared = build_unit_system(f11, gens, us.precision)
    assert close(squared.regulator, us.regulator, factor=2)
    fixed = saturate(squared, primes=(2,))
    assert close(fixed.regulator, us.regulator)
    assert fixed.saturation_log[-1][0] == 2 and "saturated at 2" in fixed.saturation_log[-1][1]
    # saturation only enlarges: every input generator is a product of output generators
    for g in squared.generators:
        assert express_in_basis(fixed, g) is not None


def test_saturation_no_descent(units5):
    us = units5["F_11"]
    again = saturate(us, primes=(2, 3))
    assert again.saturation_log[-2:] == [(2, "no descent at 2"), (3, "no descent at 3")]
    assert close(again.regulator, us.regulator)


def test_saturation_log_records_every_prime(units5):
    for us in units5.values():
        assert [p for p, _ in us.saturation_log] == [2, 3, 5, 7, 11, 13]


def sine_regulator(p, prec=600):
    """Regulator of the units sin(pi a/p)/sin(pi/p), 2 <= a <= (p-1)/2, from sines alone."""
    h = (p - 1) // 2
    with mpmath.mp.workprec(prec):
        rows = [
            [mpmath.log(abs(mpmath.sin(mpmath.pi * a * k / p) / mpmath.sin(mpmath.pi * k / p))) for k in range(1, h)]
            for a in range(2, h + 1)
        ]
        return abs(mpmath.det(mpmath.matrix(rows)))


def test_f11_regulator_value(units5):
    # h(Q(zeta_11)^+) = 1, so the cyclotomic units are everything and saturation must not move them
    assert close(units5["F_11"].regulator, sine_regulator(11))


def test_f31_regulator_divides_cyclotomic(fields5, units5):
    with mpmath.mp.workprec(600):
        ratio = cyclotomic_units(fields5["F_31"]).regulator / units5["F_31"].regulator
        assert abs(ratio - mpmath.nint(ratio)) < mpmath.mpf(2) ** -300 and ratio >= 1


def test_galois_conjugates_are_units(fields5, units5):
    for label, us in units5.items():
        for g in us.generators:
            for k in range(5):
                h = galois_apply(k, g)
                assert h.is_unit() and h.norm() == g.norm()


def test_express_in_basis(f11, units5):
    us = units5["F_11"]
    u = -product_of_powers(f11, us.generators, [2, -1, 0, 3])
    assert express_in_basis(us, u) == (-1, [2, -1, 0, 3])
    assert express_in_basis(us, f11.eta + 2) is not None


def test_json_roundtrip(f11, units5):
    us = units5["F_11"]
    back = UnitSystem.from_json(f11, us.to_json())
    assert [g.key() for g in back.generators] == [g.key() for g in us.generators]
    assert back.digest() == us.digest()
    assert back.saturation_log == us.saturation_log


def test_json_field_mismatch(fields5, units5):
    with pytest.raises(ValueError):
        UnitSystem.from_json(fields5["F_31"], units5["F_11"].to_json())

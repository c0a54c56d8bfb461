"""One test per acceptance criterion, each timed against its stated limit.

Results are collected through the ``record`` fixture and printed as a
pass/fail section at the end of the pytest run.
"""

import json
import random
import time

import mpmath
import pytest

from exunits.arith import factorize
from exunits.cli import main
from exunits.cyclofield import subfields_of_conductor, same_field
from exunits.lattice import determinant, gram_schmidt, is_lll_reduced, lll_reduce, shortest_vector_lower_bound_sq
from exunits.polyring import IntPoly, discriminant, factor_mod_p_shape, resultant
from exunits.sieve import compute_Rl, evertse_bound
from exunits.solver import ramified_residue_check, symmetry_orbits, verify_solution
from exunits.units import build_unit_system, product_of_powers

from conftest import REFERENCE_POLYS
from test_lattice import brute_lambda1_sq, random_basis
from test_polyring import rand_poly, sylvester_oracle

OTHER = ["F_31", "F_341,1", "F_341,2", "F_341,3", "F_341,4"]


def cli(tmp_path, capsys, *argv):
    t0 = time.perf_counter()
    code = main([*argv, "--cache-dir", str(tmp_path)])
    out, err = capsys.readouterr()
    return code, out, err, time.perf_counter() - t0


def test_criterion_1(tmp_path, capsys, record):
    code, out, _, dt = cli(tmp_path, capsys, "rl", "--ell", "5")
    ok = code == 0 and out.strip() == "-210736858987743 = -3 * 11^9 * 31^3"
    record("criterion 1", ok and dt < 1, f"R_5 line exact={ok}, {dt:.2f}s")
    assert ok and dt < 1


def test_criterion_2(tmp_path, capsys, record):
    code1, out1, _, dt1 = cli(tmp_path, capsys, "sl", "--ell", "5")
    code2, out2, _, dt2 = cli(tmp_path, capsys, "candidates", "--ell", "5", "--json")
    cands = [(c["conductor"], int(c["discriminant"])) for c in json.loads(out2)["candidates"]]
    ok = out1.strip() == "S_5 = {11, 31}" and cands == [(11, 11**4), (31, 31**4), (341, 341**4)]
    fast = dt1 < 1 and dt2 < 1
    record("criterion 2", ok and fast, f"S_5 and candidates match={ok}, {dt1:.2f}s + {dt2:.2f}s")
    assert ok and fast


def test_criterion_3(tmp_path, capsys, record):
    t0 = time.perf_counter()
    code, _, err, _ = cli(tmp_path, capsys, "rl", "--ell", "3")
    rejected = code == 1 and "R_3 = 0" in err
    coprime = all(compute_Rl(ell) % ell != 0 for ell in (5, 7, 11, 13, 17, 19, 23, 29, 31))
    dt = time.perf_counter() - t0
    record("criterion 3", rejected and coprime and dt < 60, f"ell=3 rejected={rejected}, ell does not divide R_ell={coprime}, {dt:.2f}s")
    assert rejected and coprime and dt < 60


def test_criterion_4(tmp_path, capsys, record):
    code, out, _, dt = cli(tmp_path, capsys, "fields", "--ell", "5", "--json", "--no-cache")
    data = json.loads(out)["fields"]
    six = code == 0 and [f["conductor"] for f in data] == [11, 31, 341, 341, 341, 341]
    fields = {f.label: f for n in (11, 31, 341) for f in subfields_of_conductor(5, n)}
    iso = {lab: same_field(fields[lab].minpoly, IntPoly(REFERENCE_POLYS[lab])) is True for lab in REFERENCE_POLYS}
    ramified = all(
        factor_mod_p_shape(f.minpoly, p) == [(1, 5)] for f in fields.values() for p in factorize(f.conductor).primes()
    )
    field_disc = all(f.field_discriminant == f.conductor**4 for f in fields.values())
    # literal requirement: the discriminant of the defining polynomial itself equals N^4
    poly_disc = {lab: discriminant(f.minpoly) == f.conductor**4 for lab, f in fields.items()}
    bad = [lab for lab, v in poly_disc.items() if not v]
    ok = six and all(iso.values()) and ramified and field_disc and not bad and dt < 120
    record(
        "criterion 4", ok,
        f"six fields={six}, same_field={all(iso.values())}, totally ramified={ramified}, "
        f"field disc N^4={field_disc}, disc(minpoly)=N^4 fails for {bad}, {dt:.2f}s",
    )
    assert six and all(iso.values()) and ramified and field_disc and dt < 120
    assert not bad, f"disc(minpoly) != N^4 for {bad} (power basis not maximal there)"


def test_criterion_5(fields5, reports5, record):
    f = fields5["F_11"]
    rep, dt = reports5["F_11"]
    keys = {s.key() for s in rep.solutions}
    verified = all(verify_solution(f, s) for s in rep.solutions)
    orbits = symmetry_orbits(rep.solutions)
    ok = (
        rep.count == 570 and len(keys) == 570 and verified
        and len(orbits) == 95 and all(len(o) == 6 for o in orbits)
        and (f.eta + 2).key() in keys and rep.count <= evertse_bound(5, 0)
    )
    record("criterion 5", ok and dt < 1800, f"{rep.count} solutions, {len(orbits)} orbits, {dt:.1f}s")
    assert ok and dt < 1800


def test_criterion_6(tmp_path, capsys, reports5, record):
    counts = {lab: reports5[lab][0].count for lab in OTHER}
    slowest = max(reports5[lab][1] for lab in OTHER)
    code, out, _, _ = cli(tmp_path, capsys, "solve", "--field", "F_31", "--json")
    data = json.loads(out)
    caveat = code == 2 and data["mode"] == "saturated" and bool(data["caveat"])
    ok = all(c == 0 for c in counts.values()) and caveat and slowest < 1800
    record("criterion 6", ok, f"counts={counts}, exit code {code} with caveat, slowest {slowest:.1f}s")
    assert ok


def test_criterion_7(tmp_path, capsys, fields5, reports5, record):
    t0 = time.perf_counter()
    residues_ok = ramified_residue_check(fields5["F_11"], reports5["F_11"][0].solutions)
    code1, out1, _, _ = cli(tmp_path, capsys, "check-sg", "--p-from", "5", "--p-to", "50", "--json")
    sg = code1 == 0 and all(r["exceptional"] for r in json.loads(out1))
    code2, out2, _, _ = cli(tmp_path, capsys, "nagell", "--k-from", "-1", "--k-to", "50", "--json")
    rows = json.loads(out2)
    nag = len(rows) == 52 and all(r["exceptional"] and int(r["disc"]) == (r["k"] ** 2 + 3 * r["k"] + 9) ** 2 for r in rows)
    dt = time.perf_counter() - t0
    ok = residues_ok and sg and nag and dt < 60
    record("criterion 7", ok, f"residue check={residues_ok}, check-sg={sg}, nagell={nag}, {dt:.2f}s")
    assert ok


def test_criterion_8(fields5, units5, record):
    t0 = time.perf_counter()
    rng = random.Random(8)
    res_ok = all(resultant(f, g) == sylvester_oracle(f, g) for f, g in ((rand_poly(rng), rand_poly(rng)) for _ in range(500)))

    lll_ok = True
    for _ in range(30):
        n = rng.randint(2, 5)
        b = random_basis(rng, n, 10**4 if n < 5 else 20)
        red, _ = lll_reduce(b)
        lll_ok &= abs(determinant(red)) == abs(determinant(b)) and is_lll_reduced(red)
        if n <= 4:
            lll_ok &= shortest_vector_lower_bound_sq(red) <= brute_lambda1_sq(red)

    reg_ok = True
    f, us = fields5["F_11"], units5["F_11"]
    for _ in range(10):
        t = [[int(i == j) for j in range(4)] for i in range(4)]
        i, j = rng.sample(range(4), 2)
        t[i] = [x + rng.choice([-1, 1, 2]) * y for x, y in zip(t[i], t[j])]
        other = build_unit_system(f, [product_of_powers(f, us.generators, row) for row in t], us.precision)
        with mpmath.mp.workprec(600):
            reg_ok &= abs(other.regulator - us.regulator) < mpmath.mpf(2) ** -300

    num_ok = True
    for fld in fields5.values():
        with mpmath.mp.workprec(512):
            vals = [
                mpmath.fsum(mpmath.cos(2 * mpmath.pi * (c * a % fld.conductor) / fld.conductor) for a in fld.subgroup.elements())
                for c in fld.coset_reps
            ]
            e = [mpmath.mpf(1)]
            for v in vals:
                e = [e[0]] + [e[k] + v * e[k - 1] for k in range(1, len(e))] + [v * e[-1]]
            coeffs = list(reversed(fld.minpoly.coeffs))
            num_ok &= all(abs(x - (-1) ** k * coeffs[k]) < mpmath.mpf(2) ** -200 for k, x in enumerate(e))
    dt = time.perf_counter() - t0
    ok = res_ok and lll_ok and reg_ok and num_ok and dt < 300
    record("criterion 8", ok, f"resultant={res_ok}, LLL={lll_ok}, regulator={reg_ok}, periods={num_ok}, {dt:.1f}s")
    assert ok

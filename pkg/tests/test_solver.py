import pytest

from exunits.cyclofield import residue_mod_ramified
from exunits.errors import BudgetExceeded, NoProgress, NotClosed
from exunits.polyring import IntPoly, discriminant
from exunits.sieve import evertse_bound, residue_test
from exunits.solver import (
    SolutionReport,
    SolveConfig,
    enumerate_by_height,
    enumerate_solutions,
    galois_closed,
    initial_bound,
    ramified_residue_check,
    nagell_cubic_check,
    reduce_bound,
    solve_unit_equation,
    sophie_germain_check,
    symmetry_orbits,
    verify_solution,
)
from exunits.units import build_unit_system


@pytest.fixture(scope="module")
def f11_report(reports5):
    return reports5["F_11"][0]


def test_verify_solution_examples(f11):
    assert verify_solution(f11, f11.eta + 2)
    assert not verify_solution(f11, f11(3))
    assert verify_solution(f11, f11.eta)
    assert not verify_solution(f11, f11(2))
    assert not verify_solution(f11, f11.element([1], 2))


def test_orbit_of_generic_lambda(f11):
    lam = f11.eta + 2
    one = f11.one
    inv = lam.inverse()
    six = [lam, one - lam, inv, one - inv, (one - lam).inverse(), lam / (lam - one)]
    orbits = symmetry_orbits(six)
    assert len(orbits) == 1 and len(orbits[0]) == 6
    assert symmetry_orbits([]) == []
    with pytest.raises(NotClosed):
        symmetry_orbits(six[:5])


@pytest.mark.parametrize("p", [5, 7, 11, 13, 23])
def test_sophie_germain(p):
    assert sophie_germain_check(p)


def test_sophie_germain_rejects():
    for bad in (4, 3, 9):
        with pytest.raises(ValueError):
            sophie_germain_check(bad)


def test_nagell():
    rec = nagell_cubic_check(3)
    assert rec.exceptional and rec.disc == 729
    assert nagell_cubic_check(-1).exceptional
    for k in range(-1, 60):
        rec = nagell_cubic_check(k)
        g = IntPoly([1, -(k + 3), k, 1])
        assert g(1) == -1
        assert rec.exceptional and rec.disc == (k * k + 3 * k + 9) ** 2 == discriminant(g)
        assert abs(rec.norm_lambda) == abs(rec.norm_one_minus_lambda) == 1
    with pytest.raises(ValueError):
        nagell_cubic_check(-2)


def test_initial_bound(f11, units5):
    us = units5["F_11"]
    b0 = initial_bound(f11, us)
    assert b0 >= 10**10
    # squaring every generator doubles all heights; the bound must not shrink
    sq = build_unit_system(f11, [g * g for g in us.generators], us.precision)
    assert initial_bound(f11, sq) >= b0


def test_reduce_bound_contract(f11, units5):
    us = units5["F_11"]
    b1 = reduce_bound(f11, us, 10**30)
    assert b1 < 10**30
    seq = [b1]
    while True:
        try:
            nxt = reduce_bound(f11, us, seq[-1])
        except NoProgress:
            break
        assert nxt < seq[-1]
        seq.append(nxt)
        assert len(seq) < 40
    with pytest.raises(ValueError):
        reduce_bound(f11, us, 0)


def test_reduce_bound_precision_soundness(f11, units5):
    us = units5["F_11"]
    for b in (10**30, 10**6, 2000):
        lo = reduce_bound(f11, us, b, precision=512)
        hi = reduce_bound(f11, us, b, precision=1024)
        assert hi <= lo


def test_f11_solutions(f11, f11_report):
    rep = f11_report
    assert rep.count == 570
    assert len(rep.orbits) == 95 and all(len(o) == 6 for o in rep.orbits)
    keys = {s.key() for s in rep.solutions}
    assert (f11.eta + 2).key() in keys and f11.eta.key() in keys
    assert all(verify_solution(f11, s) for s in rep.solutions)
    assert rep.count <= evertse_bound(5, 0)
    assert galois_closed(rep.solutions)


def test_free_action(f11, f11_report):
    for s in f11_report.solutions:
        assert s != f11.one - s and s * s != f11.one and s * s - s + 1 != f11(0)


def test_ramified_residue_post_check(f11, f11_report):
    assert ramified_residue_check(f11, f11_report.solutions)
    for s in f11_report.solutions[:50]:
        assert residue_test(residue_mod_ramified(s, 11), 11, 5)


def test_bounds_recorded(f11_report):
    b = f11_report.bounds
    assert int(b["B_initial"]) > b["B_reduced_sequence"][0] > b["B_final"]
    assert b["B_reduced_sequence"][-1] == b["B_final"]
    assert b["H_final"] > 0


def test_rerun_above_final_height(f11, units5, f11_report):
    sols, _ = enumerate_by_height(f11, units5["F_11"], f11_report.bounds["H_final"] + 5, threads=2)
    assert {s.key() for s in sols} == {s.key() for s in f11_report.solutions}


def test_small_box_agrees_with_height_search(f11, units5, f11_report):
    box = enumerate_solutions(f11, units5["F_11"], 3)
    assert {s.key() for s in box} <= {s.key() for s in f11_report.solutions}
    assert (f11.eta + 2).key() in {s.key() for s in box}


def test_enumeration_budget(f11, units5):
    with pytest.raises(BudgetExceeded):
        enumerate_solutions(f11, units5["F_11"], 50, budget=1000)


def test_heuristic_mode(f11, units5):
    rep = solve_unit_equation(f11, SolveConfig(mode="heuristic", heuristic_bound=3), units=units5["F_11"])
    assert not rep.exhaustive and rep.caveat.startswith("non-exhaustive")
    assert (f11.eta + 2).key() in {s.key() for s in rep.solutions}
    assert all(verify_solution(f11, s) for s in rep.solutions)


def test_rigorous_mode_requires_fundamental_units(f11, units5):
    with pytest.raises(ValueError):
        solve_unit_equation(f11, SolveConfig(mode="rigorous"))
    with pytest.raises(ValueError):
        solve_unit_equation(f11, SolveConfig(mode="rigorous"), units=units5["F_11"])
    with pytest.raises(ValueError):
        SolveConfig(mode="fast")


def test_rigorous_mode_with_asserted_units(f11, units5):
    us = units5["F_11"]
    asserted = build_unit_system(f11, us.generators, us.precision, mode="user-fundamental")
    rep = solve_unit_equation(f11, SolveConfig(mode="rigorous"), units=asserted)
    assert rep.count == 570 and rep.caveat == ""


def test_report_roundtrip(f11, f11_report):
    data = f11_report.to_json()
    back = SolutionReport.from_json(f11, data)
    assert back.to_json() == data
    assert "timings" not in data
    assert f11_report.to_csv().splitlines()[1].startswith("F_11,11,saturated,570,95")


@pytest.mark.parametrize("label", ["F_31", "F_341,1", "F_341,2", "F_341,3", "F_341,4"])
def test_no_solutions(reports5, label):
    rep, _ = reports5[label]
    assert rep.count == 0 and rep.orbits == []
    assert rep.mode == "saturated" and "saturated" in rep.caveat

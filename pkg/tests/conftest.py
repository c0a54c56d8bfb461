import time

import pytest

from exunits.cyclofield import subfields_of_conductor
from exunits.solver import SolveConfig, solve_unit_equation
from exunits.units import cyclotomic_units, saturate

# Reference defining polynomials from the literature (constant term first)
REFERENCE_POLYS = {
    "F_11": [-1, 3, 3, -4, -1, 1],
    "F_31": [-5, 1, 21, -12, -1, 1],
    "F_341,1": [3136, 2016, -300, -136, 1, 1],
    "F_341,2": [1431, 3039, 41, -136, 1, 1],
    "F_341,3": [67, -1053, 723, -136, 1, 1],
    "F_341,4": [67, -371, -641, -136, 1, 1],
}

ACCEPTANCE: dict[str, tuple[bool, str]] = {}


@pytest.fixture(scope="session")
def fields5():
    out = {}
    for n in (11, 31, 341):
        for f in subfields_of_conductor(5, n):
            out[f.label] = f
    return out


@pytest.fixture(scope="session")
def f11(fields5):
    return fields5["F_11"]


@pytest.fixture(scope="session")
def units5(fields5):
    return {label: saturate(cyclotomic_units(f)) for label, f in fields5.items()}


@pytest.fixture(scope="session")
def reports5(fields5, units5):
    """Saturated-mode solve of all six fields; values are (report, seconds)."""
    out = {}
    for label, f in fields5.items():
        t0 = time.perf_counter()
        rep = solve_unit_equation(f, SolveConfig(mode="saturated"), units=units5[label])
        out[label] = (rep, time.perf_counter() - t0)
    return out


@pytest.fixture(scope="session")
def record():
    def _record(name: str, ok: bool, detail: str = ""):
        prev = ACCEPTANCE.get(name)
        if prev is not None:
            ok = ok and prev[0]
            detail = "; ".join(x for x in (prev[1], detail) if x)
        ACCEPTANCE[name] = (ok, detail)

    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE, key=lambda s: int(s.split()[1])):
        ok, detail = ACCEPTANCE[name]
        terminalreporter.write_line(f"{name}: {'PASS' if ok else 'FAIL'}  {detail}")

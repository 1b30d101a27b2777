from __future__ import annotations

import os

import pytest

from hodgeideals import HodgeComputation, load_corpus, normalize_basis

SLOW = os.environ.get("HODGEIDEALS_SLOW") == "1"

# Corpus examples cheap enough for the always-on suite (seconds each).
# The D5 quiver is opt-in.
FAST_CORPUS = [
    "smooth_line", "normal_crossing_xy", "normal_crossing_xyz", "a2_arrangement",
    "d3_arrangement", "sekiguchi_a1", "sekiguchi_a2", "sekiguchi_b1", "sekiguchi_b3",
    "sekiguchi_h2", "sekiguchi_h5", "binary_cubics", "d4_quiver", "lfd_dim3",
    "lfd_dim4_case1", "lfd_dim4_case2", "lfd_dim4_case3", "lfd_sym3", "whitney_umbrella", "cross_cap",
]
SLOW_CORPUS = ["d5_quiver"]
EXTENDED_SCOPE = {"whitney_umbrella", "cross_cap"}


def pytest_collection_modifyitems(config, items):
    if SLOW:
        return
    skip = pytest.mark.skip(reason="long-running; set HODGEIDEALS_SLOW=1")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


_COMPUTATIONS: dict = {}


def computation(name: str) -> HodgeComputation:
    """One shared HodgeComputation per corpus example for the whole session."""
    if name not in _COMPUTATIONS:
        f = load_corpus(name)
        _COMPUTATIONS[name] = HodgeComputation(normalize_basis(f.spec), f.bfunction)
    return _COMPUTATIONS[name]


@pytest.fixture(scope="session")
def corpus_computation():
    return computation


# acceptance summary -------------------------------------------------------------------

CRITERIA = {
    1: "arrangements A2, D3: i0 exact, under a minute each",
    2: "Sekiguchi A1, A2, B1, B3, H2, H5: i0 exact, generating level 0, under ten minutes",
    3: "D4 quiver: i0 minors, generating level 1, I_1 has 13 minimal generators of degree <= 7",
    4: "binary cubics: I_0 and the seven generators of I_1 exact, generating level 1",
    5: "non-reductive linear free divisors: five I_0 exact, generating level 0",
    6: "Whitney umbrella: F^H = F^ord for k <= 2, I_0 = (1), symmetry warning",
    7: "D5 quiver: three-generator I_0 (opt-in, HODGEIDEALS_SLOW=1)",
    8: "property suite: routes, inclusions, symmetry, idempotence, phi inverse, truncation oracle",
    9: "b-function oracle: x, xy, and the D4 quiver",
}
_criterion_of: dict[str, int] = {}
_outcomes: dict[int, list[str]] = {}


def pytest_itemcollected(item):
    mark = item.get_closest_marker("criterion")
    if mark:
        _criterion_of[item.nodeid] = mark.args[0]


def pytest_runtest_logreport(report):
    n = _criterion_of.get(report.nodeid)
    if n is None:
        return
    if report.failed:
        _outcomes.setdefault(n, []).append("failed")
    elif report.skipped:
        _outcomes.setdefault(n, []).append("skipped")
    elif report.when == "call":
        _outcomes.setdefault(n, []).append("passed")


def pytest_terminal_summary(terminalreporter):
    if not _criterion_of:
        return
    terminalreporter.section("acceptance criteria")
    for n, text in CRITERIA.items():
        seen = _outcomes.get(n, [])
        if "failed" in seen:
            status = "FAIL"
        elif "passed" in seen and "skipped" not in seen:
            status = "PASS"
        elif "passed" in seen:
            status = "PARTIAL (some checks skipped)"
        elif seen:
            status = "SKIPPED"
        else:
            status = "NOT RUN"
        terminalreporter.write_line(f"criterion {n}: {status}  {text}")

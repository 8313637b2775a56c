import re
from fractions import Fraction as F

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

from zdspectrum.spectrum import GameParameters


@pytest.fixture
def fig3():
    """Two-provider game with R = 1, theta = 1/2 (exact)."""
    return GameParameters.two_player(1, F(1, 2)).payoff_matrix()


@pytest.fixture
def three_player():
    return GameParameters.three_player(1, F(1, 2), F(1, 3)).payoff_matrix()


_CRITERION = re.compile(r"test_criterion_(\d+)_(\w+)")


def pytest_terminal_summary(terminalreporter):
    results = {}
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            if rep.when != "call" and outcome == "passed":
                continue
            m = _CRITERION.search(rep.nodeid)
            if m and "test_acceptance" in rep.nodeid:
                key = int(m.group(1))
                ok = outcome == "passed"
                prev = results.get(key, (True, m.group(2)))
                results[key] = (prev[0] and ok, m.group(2))
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(results):
        ok, name = results[key]
        terminalreporter.write_line(f"criterion {key:2d}  {'PASS' if ok else 'FAIL'}  {name.replace('_', ' ')}")

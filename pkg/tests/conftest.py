"""Shared fixtures and the per-criterion acceptance summary."""

from __future__ import annotations

import os
from collections import defaultdict
from pathlib import Path

import pytest

from netlogarch.data import load_prices, log_returns

DATA_ENV = "OPEC_DATA"
DEFAULT_DATA = Path(__file__).parent / "data" / "opec_prices.csv"

PROPERTY_CRITERION = (8, "property suites and Monte-Carlo size")
# wall-clock budgets in seconds for criteria timed over all their tests
BUDGETS = {PROPERTY_CRITERION[0]: 600.0}

_outcomes: dict[int, list[tuple[str, str]]] = defaultdict(list)
_titles: dict[int, str] = {}
_durations: dict[int, float] = defaultdict(float)


def opec_path() -> Path | None:
    env = os.environ.get(DATA_ENV)
    path = Path(env) if env else DEFAULT_DATA
    return path if path.exists() else None


@pytest.fixture(scope="session")
def opec_returns():
    path = opec_path()
    if path is None:
        pytest.skip(f"OPEC price file not found (set {DATA_ENV} or add {DEFAULT_DATA})")
    return log_returns(load_prices(path))


def pytest_collection_modifyitems(items):
    # every module-level test belongs to the always-on property suite
    for item in items:
        if item.get_closest_marker("criterion") is None:
            item.add_marker(pytest.mark.criterion(*PROPERTY_CRITERION))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    _titles[number] = title
    _durations[number] += report.duration
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _outcomes[number].append((item.name, report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_outcomes):
        results = _outcomes[number]
        states = {state for _, state in results}
        over = number in BUDGETS and _durations[number] > BUDGETS[number]
        if "failed" in states or over:
            verdict = "FAIL"
        elif states == {"skipped"}:
            verdict = "SKIP"
        elif "skipped" in states:
            verdict = "PASS (partial, data-gated parts skipped)"
        else:
            verdict = "PASS"
        counts = ", ".join(f"{sum(s == k for _, s in results)} {k}" for k in ("passed", "failed", "skipped")
                           if any(s == k for _, s in results))
        timing = f" {_durations[number]:.0f}s"
        if number in BUDGETS:
            timing += f" (budget {BUDGETS[number]:.0f}s{', exceeded' if over else ''})"
        terminalreporter.write_line(f"criterion {number}: {verdict} [{counts}]{timing} {_titles[number]}")

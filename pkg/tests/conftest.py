"""Shared fixtures and the per-criterion acceptance summary.

Tests tagged ``@pytest.mark.criterion(k, "title")`` are grouped by k; the
terminal summary prints one PASS/FAIL line per criterion.
"""

from __future__ import annotations

from collections import defaultdict

import numpy as np
import pytest

from gesnorm.distortion import make_distortion

_titles: dict[int, str] = {}
_results: dict[int, list[bool]] = defaultdict(list)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(k, title): acceptance criterion k")


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m is not None:
            item.user_properties.append(("criterion", m.args[0]))
            _titles[m.args[0]] = m.args[1]


def pytest_runtest_logreport(report):
    for key, k in report.user_properties:
        if key != "criterion":
            continue
        if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
            _results[k].append(report.outcome == "passed")


def pytest_terminal_summary(terminalreporter):
    if not _titles:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_titles):
        runs = _results.get(k, [])
        status = "PASS" if runs and all(runs) else ("FAIL" if runs else "NOT RUN")
        terminalreporter.write_line(f"criterion {k:2d}: {status}  {_titles[k]}  ({sum(runs)}/{len(runs)} checks)")


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture(scope="session")
def square():
    return make_distortion("power", p=2)


@pytest.fixture(scope="session")
def identity():
    return make_distortion("identity")


@pytest.fixture(scope="session")
def sqrt_g():
    return make_distortion("sqrt")

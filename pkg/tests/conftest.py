from __future__ import annotations

import os
import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, os.path.dirname(__file__))

from homothetic import CES, CobbDouglas, Leontief, Linear, Mixture, Translog  # noqa: E402

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number")


_RESULTS: dict[int, tuple[str, bool]] = {}


def pytest_runtest_logreport(report):
    crit = getattr(report, "_criterion", None)
    if crit is None:
        return
    n, title = crit
    ok = report.passed if report.when == "call" else not report.failed
    prev = _RESULTS.get(n, (title, True))
    _RESULTS[n] = (title, prev[1] and ok)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = item.get_closest_marker("criterion")
    if m is not None:
        rep._criterion = (m.args[0], m.args[1])


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_RESULTS):
        title, ok = _RESULTS[n]
        terminalreporter.write_line(f"criterion {n:2d} {'PASS' if ok else 'FAIL'}  {title}")


# --- strategies -------------------------------------------------------------------------

def simplex(n: int, lo: float = 0.02):
    return st.lists(st.floats(lo, 1.0), min_size=n, max_size=n).map(lambda v: tuple(np.array(v) / sum(v)))


def positive(n: int, lo: float = 0.05, hi: float = 20.0):
    return st.lists(st.floats(lo, hi), min_size=n, max_size=n).map(tuple)


def smooth_pref(n: int):
    """Preferences whose ln E is smooth at generic prices."""
    sig = st.floats(0.2, 4.0).filter(lambda s: abs(s - 1) > 0.05)
    opts = [
        simplex(n).map(CobbDouglas),
        st.builds(CES, simplex(n), sig),
        positive(n, 0.1, 5.0).map(Leontief),
    ]
    if n == 2:
        opts.append(st.builds(Translog, st.floats(0.1, 0.9), st.floats(0.1, 2.0)))
    return st.one_of(*opts)


def any_pref(n: int):
    base = st.one_of(smooth_pref(n), positive(n, 0.1, 5.0).map(Linear))
    mix = st.lists(base, min_size=2, max_size=3).flatmap(
        lambda cs: simplex(len(cs)).map(lambda w: Mixture(w, tuple(cs)))
    )
    return st.one_of(base, mix)


prices = positive

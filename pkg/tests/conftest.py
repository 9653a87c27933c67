import numpy as np
import pytest

from conemetric.divisor import Divisor, trace_condition_value


def random_divisors(rng, n, accept, lo=-0.9, hi=1.9):
    """n random divisors with non-integral orders whose L value passes ``accept``."""
    out = []
    while len(out) < n:
        b = rng.uniform(lo, hi, 3)
        if np.min(np.abs(b - np.round(b))) < 0.05:
            continue
        d = Divisor(tuple(b))
        if accept(trace_condition_value(d)):
            out.append(d)
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture(scope="session")
def divisor_sampler():
    return random_divisors


@pytest.fixture(scope="session")
def half_metric():
    from conemetric.metriceval import IrreducibleMetric
    return IrreducibleMetric(Divisor((-0.5, -0.5, -0.5)))


# -- acceptance summary ----------------------------------------------------------------

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_runtest_makereport(item, call):
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    number, title = mark.args
    failed = call.excinfo is not None and not call.excinfo.errisinstance(pytest.skip.Exception)
    entry = _CRITERIA.setdefault(number, {"title": title, "ok": True, "ran": False, "notes": []})
    if call.when == "call":
        entry["ran"] = True
        entry["notes"] += [v for k, v in item.user_properties if k == "detail"]
    if failed:
        entry["ok"] = False


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        e = _CRITERIA[number]
        verdict = "PASS" if e["ok"] and e["ran"] else "FAIL"
        notes = "; ".join(e["notes"])
        terminalreporter.write_line(f"criterion {number:2d} {verdict}  {e['title']}" + (f"  [{notes}]" if notes else ""))

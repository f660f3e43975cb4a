import os
import time

from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", max_examples=25, deadline=None,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

N_CRITERIA = 10
_outcomes = {}
_start = time.perf_counter()


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): test belongs to acceptance criterion n")


def pytest_collection_modifyitems(items):
    for item in items:
        marker = item.get_closest_marker("criterion")
        if marker is not None:
            item.user_properties.append(("criterion", marker.args[0]))


def pytest_runtest_logreport(report):
    crit = dict(report.user_properties).get("criterion")
    if crit is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        if hasattr(report, "wasxfail"):
            status = "XFAIL" if report.skipped else "FAIL"
        else:
            status = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[report.outcome]
        _outcomes.setdefault(crit, []).append(status)


def _summary(statuses):
    if not statuses:
        return "NOT RUN"
    for status in ("FAIL", "XFAIL", "SKIP"):
        if status in statuses:
            return {"XFAIL": "FAIL (expected, strict xfail)"}.get(status, status)
    return "PASS"


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n in range(1, N_CRITERIA + 1):
        statuses = _outcomes.get(n, [])
        count = f"{statuses.count('PASS')}/{len(statuses)} tests passed"
        terminalreporter.write_line(f"criterion {n:2d}: {_summary(statuses)}  ({count})")
    elapsed = time.perf_counter() - _start
    terminalreporter.write_line(f"suite runtime: {elapsed:.1f} s")

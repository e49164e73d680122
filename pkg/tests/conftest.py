"""Per-criterion pass/fail summary for tests tagged ``@pytest.mark.criterion(n)``."""

import pytest

CRITERIA = {
    1: "case-study calibration of M0 on three indices",
    2: "Wilks p-value conclusions on three indices",
    3: "bootstrap p-value conclusions on three indices",
    4: "desk-scale property suite",
    5: "rolling-window census stationarity",
}

_outcomes: dict[int, list[tuple[str, str, str]]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number covered by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    n = mark.args[0]
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        reason = ""
        if report.skipped and isinstance(report.longrepr, tuple):
            reason = report.longrepr[2].removeprefix("Skipped: ")
        _outcomes.setdefault(n, []).append((item.name, report.outcome, reason))


def criterion_status(results) -> tuple[str, str]:
    if not results:
        return "NOT RUN", "no tests collected"
    if any(o == "failed" for _, o, _ in results):
        bad = [name for name, o, _ in results if o == "failed"]
        return "FAIL", "failed: " + ", ".join(bad)
    ran = [r for r in results if r[1] == "passed"]
    if not ran:
        return "NOT RUN", results[0][2] or "skipped"
    skipped = len(results) - len(ran)
    return "PASS", f"{len(ran)} passed" + (f", {skipped} skipped" if skipped else "")


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n, title in CRITERIA.items():
        status, detail = criterion_status(_outcomes.get(n, []))
        terminalreporter.write_line(f"criterion {n}: {status:<7} {title} ({detail})")

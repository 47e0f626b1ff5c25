"""Collects acceptance-criterion outcomes and prints one PASS/FAIL line each."""
import pytest

_outcomes: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    number, title = mark.args
    entry = _outcomes.setdefault(number, {"title": title, "passed": True, "ran": False, "why": ""})
    if report.when == "call":
        entry["ran"] = True
    if report.failed:
        entry["passed"] = False
        if not entry["why"] and report.longrepr is not None:
            crash = getattr(report.longrepr, "reprcrash", None)
            entry["why"] = crash.message.splitlines()[0] if crash else str(report.longrepr).splitlines()[-1]


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_outcomes):
        e = _outcomes[number]
        status = "PASS" if e["passed"] and e["ran"] else "FAIL"
        line = f"criterion {number:2d}: {status}  {e['title']}"
        if status == "FAIL" and e["why"]:
            line += f"  ({e['why'][:160]})"
        terminalreporter.write_line(line)

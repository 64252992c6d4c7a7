"""Collects acceptance outcomes and prints one line per criterion at the end."""

from __future__ import annotations

from collections import OrderedDict

_CRITERIA: "OrderedDict[int, dict]" = OrderedDict()


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion a test belongs to")


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is None:
            continue
        number, title = mark.args
        entry = _CRITERIA.setdefault(number, {"title": title, "tests": 0, "failed": [], "ran": 0})
        entry["tests"] += 1
        item.user_properties.append(("criterion", number))


def pytest_runtest_logreport(report):
    numbers = [v for k, v in report.user_properties if k == "criterion"]
    if not numbers:
        return
    entry = _CRITERIA[numbers[0]]
    if report.when == "call":
        entry["ran"] += 1
    if report.failed:
        entry["failed"].append(report.nodeid.split("::")[-1])


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        e = _CRITERIA[number]
        if e["ran"] < e["tests"] and not e["failed"]:
            status = "NOT RUN"
        else:
            status = "FAIL" if e["failed"] else "PASS"
        detail = f"  ({', '.join(e['failed'])})" if e["failed"] else ""
        terminalreporter.write_line(f"criterion {number:>2} {status:<7} {e['title']}{detail}")

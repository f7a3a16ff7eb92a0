from __future__ import annotations

_criteria: dict[int, list[tuple[str, str]]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    numbers = [value for key, value in report.user_properties if key == "criterion"]
    for number in numbers:
        _criteria.setdefault(int(number), []).append((report.nodeid, report.outcome))


def pytest_collection_modifyitems(items):
    for item in items:
        for marker in item.iter_markers("criterion"):
            for number in marker.args:
                item.user_properties.append(("criterion", number))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        outcomes = [o for _, o in _criteria[number]]
        status = "PASS" if all(o == "passed" for o in outcomes) else "FAIL"
        terminalreporter.write_line(f"criterion {number}: {status} ({len(outcomes)} check(s))")

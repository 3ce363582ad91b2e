"""Prints one pass/fail line per acceptance criterion at the end of the run."""
import re

_CRITERIA: dict[int, list[tuple[str, str]]] = {}
_PATTERN = re.compile(r"test_criterion_(\d+)")


def pytest_runtest_logreport(report):
    m = _PATTERN.search(report.nodeid)
    if not m:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _CRITERIA.setdefault(int(m.group(1)), []).append((report.nodeid.split("::")[-1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        parts = _CRITERIA[num]
        ok = all(outcome == "passed" for _, outcome in parts)
        failed = [name for name, outcome in parts if outcome != "passed"]
        detail = "" if ok else f"  (failed: {', '.join(failed)})"
        terminalreporter.write_line(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}{detail}")

"""Per-criterion summary lines for the acceptance suite.

Every test named test_criterion_* is tracked and reported as a single
PASS/FAIL line in the terminal summary, so the acceptance state is visible
at a glance even inside a long pytest run.
"""

_RESULTS: dict[str, str] = {}

_WORDS = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}


def pytest_runtest_logreport(report):
    name = report.nodeid.split("::")[-1]
    if not name.startswith("test_criterion_"):
        return
    if report.when == "call":
        _RESULTS[name] = _WORDS.get(report.outcome, report.outcome.upper())
    elif report.when == "setup" and report.outcome != "passed":
        _RESULTS[name] = "SKIP" if report.outcome == "skipped" else "ERROR"


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _RESULTS:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name in sorted(_RESULTS):
        label = name[len("test_criterion_"):]
        terminalreporter.write_line(f"criterion {label}: {_RESULTS[name]}")

import re
from collections import defaultdict

_CRITERION = re.compile(r"test_acceptance\.py::test_criterion_(\d+)")
_results = defaultdict(list)


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if not m:
        return
    n = int(m.group(1))
    if report.when == "call" or report.outcome != "passed":
        if hasattr(report, "wasxfail"):
            _results[n].append(("xfail", report.wasxfail))
        else:
            _results[n].append((report.outcome, ""))


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_results):
        outcomes = [o for o, _ in _results[n]]
        if all(o == "passed" for o in outcomes):
            line = f"CRITERION {n}: PASS"
        else:
            notes = "; ".join(sorted({why for o, why in _results[n] if why}))
            line = f"CRITERION {n}: FAIL" + (f" ({notes})" if notes else "")
        terminalreporter.write_line(line)

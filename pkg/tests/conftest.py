import re
import sys

_errored = {}


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_criterion_(\d+)", report.nodeid)
    if m and report.failed:
        _errored[int(m.group(1))] = report.when


def pytest_terminal_summary(terminalreporter):
    mod = next((m for name, m in sys.modules.items() if name.endswith("test_acceptance")), None)
    results = dict(getattr(mod, "RESULTS", None) or {})
    for n, when in _errored.items():
        # an exception before the report line was written
        results.setdefault(n, "criterion %2d: FAIL  (error during %s)" % (n, when))
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        terminalreporter.write_line(results[n])

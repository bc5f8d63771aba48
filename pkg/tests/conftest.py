import os
import sys

from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile(
    "qvakit",
    max_examples=int(os.environ.get("QVAKIT_HYPOTHESIS_EXAMPLES", "25")),
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("qvakit")

# acceptance bookkeeping: tests marked criterion(k, title) are rolled up into one line per k
_criteria: dict = {}
_outcomes: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(k, title): acceptance criterion k")


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m:
            k, title = m.args
            _criteria[item.nodeid] = k
            _outcomes.setdefault(k, {"title": title, "results": []})


def pytest_runtest_logreport(report):
    k = _criteria.get(report.nodeid)
    if k is None or (report.when != "call" and report.passed):
        return
    if hasattr(report, "wasxfail"):
        outcome = "xfail" if report.skipped else "xpass"
    else:
        outcome = report.outcome
    _outcomes[k]["results"].append(outcome)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_outcomes):
        res = _outcomes[k]["results"]
        if not res:
            continue
        bad = [r for r in res if r in ("failed", "xpass")]
        verdict = "FAIL" if bad else "PASS" if "passed" in res else "SKIP"
        xf = res.count("xfail")
        extra = f" ({xf} strict xfail, see ledger)" if xf else ""
        terminalreporter.write_line(f"AC{k:<3}{verdict}  {_outcomes[k]['title']}{extra}")

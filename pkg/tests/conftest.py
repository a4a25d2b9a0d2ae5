"""Collects acceptance-criterion outcomes and prints one line per criterion."""

_CRITERIA = {}


def pytest_runtest_logreport(report):
    props = dict(report.user_properties)
    if "criterion" not in props:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _CRITERIA[props["criterion"]] = (report.outcome == "passed", props.get("detail", ""))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA, key=int):
        ok, detail = _CRITERIA[n]
        terminalreporter.write_line(f"criterion {int(n):2d}: {'PASS' if ok else 'FAIL'}  {detail}")

import pytest

_criteria: dict[int, tuple[str, float, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call":
        return
    n = mark.args[0]
    note = ""
    if rep.failed and call.excinfo is not None:
        note = str(call.excinfo.value).splitlines()[0][:160] if str(call.excinfo.value) else ""
    _criteria[n] = ("PASS" if rep.passed else "FAIL", rep.duration, note)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        status, dur, note = _criteria[n]
        line = f"CRITERION {n}: {status} ({dur:.1f} s)"
        if note:
            line += f"  {note}"
        terminalreporter.write_line(line)

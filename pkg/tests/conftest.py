import pytest

CRITERIA = {
    1: "transform decode soundness",
    2: "snake embedding surjectivity and boundary preservation",
    3: "path following against the exhaustive oracle",
    4: "gadget contracts at exact equilibria",
    5: "well-supported and approximate equilibrium notions",
    6: "reduction structure",
    7: "equilibrium decoder, face constraints, color-gap bound",
    8: "perturbed-game approximation",
    9: "Lemke-Howson against support enumeration",
}

_status: dict[int, str] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion the test decides")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    n = mark.args[0]
    if rep.failed:
        _status[n] = "FAIL"
    elif rep.when == "call" and rep.passed:
        _status.setdefault(n, "PASS")
    elif rep.skipped:
        _status.setdefault(n, "SKIP")


def pytest_terminal_summary(terminalreporter):
    if not _status:
        return
    terminalreporter.section("acceptance criteria")
    for n, name in CRITERIA.items():
        terminalreporter.write_line(f"criterion {n} [{_status.get(n, 'NOT RUN')}] {name}")

import pytest

_ACCEPTANCE_RESULTS: dict[str, tuple[int, str, bool]] = {}


def pytest_configure(config):
    config.addinivalue_line(
        "markers",
        "acceptance(order, name): top-level acceptance criterion; one pass/fail line is printed in the terminal summary",
    )


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    failed_setup = report.when == "setup" and report.outcome != "passed"
    if report.when == "call" or failed_setup:
        _ACCEPTANCE_RESULTS[item.nodeid] = (
            marker.kwargs.get("order", 99),
            marker.kwargs.get("name", item.name),
            report.outcome == "passed",
        )


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for _, name, passed in sorted(_ACCEPTANCE_RESULTS.values()):
        terminalreporter.write_line(("[PASS] " if passed else "[FAIL] ") + name)


@pytest.fixture
def tiny_matrix_csv() -> str:
    """Two interviews: I1 elicits A and B, I2 elicits A and C."""
    return "interview_id,seq,A,B,C\nI1,1,1,1,0\nI2,2,1,0,1\n"


@pytest.fixture
def five_interview_csv() -> str:
    """Five interviews over codes A, B, C, K.

    First elicitations: A at 1, C and K at 2, B at 3; interviews 4 and 5
    only recapture.  New-code counts are (1, 2, 1, 0, 0).
    """
    return (
        "interview_id,seq,A,B,C,K\n"
        "aaaa,1,1,0,0,0\n"
        "bbbb,2,0,0,1,1\n"
        "cccc,3,1,1,0,0\n"
        "dddd,4,1,1,0,0\n"
        "eeee,5,1,1,0,1\n"
    )


SCENARIO_UNEVEN = (1, 1, 1, 1, 1, 0, 0, 0, 0, 0)
SCENARIO_UNIFORM = (1, 1, 1, 1, 1, 1, 1, 1, 1, 1)
SCENARIO_MIXED = (1, 0, 1, 0, 0, 1, 1, 0, 1, 0)


@pytest.fixture
def scenario_patterns() -> tuple[tuple[int, ...], ...]:
    return (SCENARIO_UNEVEN, SCENARIO_UNIFORM, SCENARIO_MIXED)

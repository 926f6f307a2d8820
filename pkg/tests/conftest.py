import pytest
from hypothesis import HealthCheck, settings

from qptolemy.catalog import load_fixture

settings.register_profile("repo", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")

# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE: dict[int, str] = {}


@pytest.fixture(scope="session")
def torus():
    return load_fixture("torus")


@pytest.fixture(scope="session")
def sphere():
    return load_fixture("sphere")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[k])

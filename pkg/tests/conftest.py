import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("ci", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("ci")


@pytest.fixture(autouse=True)
def _no_seed_override(monkeypatch):
    # a stray OEB_SEED in the environment would change every random schedule
    monkeypatch.delenv("OEB_SEED", raising=False)
    yield


@pytest.fixture
def ref_alpha():
    return 0.5, 0.2


def pytest_report_header(config):
    return f"oeb tests, OEB_SEED={os.environ.get('OEB_SEED', '<unset>')}"


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)

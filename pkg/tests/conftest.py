import numpy as np
import pytest
from hypothesis import settings

from minkpaf.fixtures import FIXTURES

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(params=sorted(FIXTURES))
def fixture(request):
    return FIXTURES[request.param]


ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def report_criterion(request):
    """Record one pass/fail line per acceptance criterion and assert it."""
    lines = request.config.stash.setdefault(ACCEPTANCE, [])

    def record(number: int, title: str, failures: list[str], detail: str) -> None:
        status = "PASS" if not failures else "FAIL"
        line = f"{status} criterion {number}: {title} ({detail})"
        lines.append(line)
        print(line)
        assert not failures, "; ".join(failures)

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda line: int(line.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)

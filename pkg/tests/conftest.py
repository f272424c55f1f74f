import numpy as np
import pytest

from moorexp.gf_tower import field_for

ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture(scope="session")
def f4():
    return field_for(2, 2)


@pytest.fixture(scope="session")
def f16():
    return field_for(2, 4)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def acceptance_log(request):
    return request.config.stash.setdefault(ACCEPTANCE_KEY, [])


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)

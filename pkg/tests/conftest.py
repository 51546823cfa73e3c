import numpy as np
import pytest

from gptcompat.gpt import make_classical, make_crosspolytope, make_hypercube

MODELS = {
    "CM2": lambda: make_classical(2),
    "CM3": lambda: make_classical(3),
    "HC2": lambda: make_hypercube(2),
    "HC3": lambda: make_hypercube(3),
    "X2": lambda: make_crosspolytope(2),
}


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(params=sorted(MODELS))
def model(request):
    return MODELS[request.param]()


_ACCEPTANCE = []


@pytest.fixture
def acceptance_log():
    return _ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)

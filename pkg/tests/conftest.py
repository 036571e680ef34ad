import numpy as np
import pytest

from cfinterp import _kernels
from cfinterp.functional import NodeSystem

WORKED_NODES = ["1", "2", "3"]
SMOOTH_NODES = ["sin(z)/4", "1+sin(2*z)/4", "2+sin(3*z)/4", "3+sin(4*z)/4"]


@pytest.fixture(params=_kernels.available_backends())
def backend(request):
    previous = _kernels.set_backend(request.param)
    yield request.param
    _kernels.set_backend(previous)


@pytest.fixture(scope="session")
def worked_system():
    return NodeSystem.from_expressions(WORKED_NODES, "s^2", 512)


@pytest.fixture(scope="session")
def worked_kernels(worked_system):
    from cfinterp.iicf import compute_kernels

    return compute_kernels(worked_system)


@pytest.fixture(scope="session")
def smooth_kernels():
    from cfinterp.iicf import compute_kernels

    return compute_kernels(NodeSystem.from_expressions(SMOOTH_NODES, "exp(s)", 512))


@pytest.fixture
def rng():
    return np.random.default_rng(20181)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)

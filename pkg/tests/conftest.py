import os
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from qwk.lie import builtin

settings.register_profile("default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=300, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

ALGEBRA_DIR = Path(__file__).resolve().parent.parent / "algebras"
BUILTINS = ["abelian(1)", "abelian(2)", "abelian(3)", "abelian(4)", "so3", "sl2", "double_nonabelian2"]
NONABELIAN = ["so3", "sl2", "double_nonabelian2"]


@pytest.fixture(params=BUILTINS)
def any_algebra(request):
    return builtin(request.param)


@pytest.fixture(params=NONABELIAN)
def nonabelian(request):
    return builtin(request.param)


@pytest.fixture
def so3():
    return builtin("so3")


@pytest.fixture
def sl2():
    return builtin("sl2")


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[number])

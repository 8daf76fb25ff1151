import os

import pytest
from hypothesis import settings

from strongcoupling.lattice import generate_blasius, generate_instanton

settings.register_profile("default", deadline=None, max_examples=60)
settings.register_profile("thorough", deadline=None, max_examples=500)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

# filled by test_acceptance: criterion number -> (passed, detail lines)
ACCEPTANCE_RESULTS = {}


@pytest.fixture(scope="session")
def instanton200():
    return generate_instanton(200)


@pytest.fixture(scope="session")
def blasius300():
    return generate_blasius(300)


@pytest.fixture(scope="session")
def blasius40():
    return generate_blasius(40)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_RESULTS):
        passed, lines = ACCEPTANCE_RESULTS[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if passed else 'FAIL'}")
        for line in lines:
            terminalreporter.write_line(f"    {line}")

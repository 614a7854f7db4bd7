import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from csltrap.core import barium_ion, build_porphyrin_barrel  # noqa: E402
from csltrap.modes import TwoIonSystem, equilibrium, mode_spectrum  # noqa: E402
from csltrap.trap import TrapConfig  # noqa: E402


@pytest.fixture(scope="session")
def trap():
    return TrapConfig()


@pytest.fixture(scope="session")
def molecule():
    return build_porphyrin_barrel(2)


@pytest.fixture(scope="session")
def system(trap, molecule):
    return TwoIonSystem(barium_ion(), molecule, trap)


@pytest.fixture(scope="session")
def eq(system):
    return equilibrium(system)


@pytest.fixture(scope="session")
def spectrum(system):
    return mode_spectrum(system)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)

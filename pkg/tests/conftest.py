"""Pytest configuration and shared fixtures."""
from pathlib import Path

import pytest

from orthomat.__main__ import main
from orthomat.ortho_matroid import lift, m3, m4, uniform_matroid
from orthomat.tract_core import make_tract

FIXTURES = Path(__file__).parent / "fixtures"


def pytest_configure(config):
    """Print ASCII banner at test session start."""
    banner = """
========================================================================
 ORTHOMAT - TEST SUITE
========================================================================
 Testing: tracts, ground sets, orthogonal matroids, Wick functions,
          signatures, vector sets, representability, CLI
 Worked examples: n <= 6 over F2, F3, F4, F5, F7, U0, S, K, R6
========================================================================
"""
    terminal_writer = config.pluginmanager.get_plugin("terminalreporter")
    if terminal_writer:
        terminal_writer.write_line(banner)


def pytest_collection_finish(session):
    """Print collection summary in ASCII."""
    terminal_writer = session.config.pluginmanager.get_plugin("terminalreporter")
    if terminal_writer:
        terminal_writer.write_line(f"\n    [COLLECTED] {len(session.items)} tests\n")


@pytest.fixture(scope="session")
def fixtures_dir():
    """Directory holding the input files."""
    return FIXTURES


@pytest.fixture(scope="session")
def tract():
    """Tract factory (descriptors are cached by make_tract)."""
    return make_tract


@pytest.fixture(scope="module")
def matroid_m3():
    return m3()


@pytest.fixture(scope="module")
def matroid_m4():
    return m4()


@pytest.fixture(scope="module")
def lift_u13():
    """Circuits 12, 13, 23 and 1*2*3*."""
    return lift(uniform_matroid(1, 3))


@pytest.fixture(scope="module")
def lift_u24():
    return lift(uniform_matroid(2, 4))


@pytest.fixture
def run_cli(capsys):
    """Run the CLI in-process; returns (exit code, stdout, stderr)."""
    def run(*argv):
        code = main([str(a) for a in argv])
        captured = capsys.readouterr()
        return code, captured.out, captured.err
    return run

import functools

import pytest
from hypothesis import settings

from motzkin_automata.automaton import build
from motzkin_automata.oracle import motzkin_exact_residues

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")


@functools.lru_cache(maxsize=None)
def machine(p):
    return build(p)


@functools.lru_cache(maxsize=None)
def oracle_residues(moduli, n_max):
    return motzkin_exact_residues(list(moduli), n_max)


@pytest.fixture
def automaton_for():
    return machine


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(test_acceptance.RESULTS, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)

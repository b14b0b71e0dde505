import numpy as np
import pytest

import zsph

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def cache8():
    return zsph.build_basis(zsph.Resolution(8))


@pytest.fixture(scope="session")
def cache16():
    return zsph.build_basis(zsph.Resolution(16))


@pytest.fixture(scope="session")
def cache32():
    return zsph.build_basis(zsph.Resolution(32))


@pytest.fixture(scope="session")
def cache64():
    return zsph.build_basis(zsph.Resolution(64))


@pytest.fixture(scope="session")
def fact16(cache16):
    return zsph.build_factorization(cache16.resolution, cache16.generators)


@pytest.fixture(scope="session")
def fact32(cache32):
    return zsph.build_factorization(cache32.resolution, cache32.generators)


@pytest.fixture(scope="session")
def fact64(cache64):
    return zsph.build_factorization(cache64.resolution, cache64.generators)


def random_state(cache, seed, l_max=None):
    """Random skew-Hermitian traceless state with unit Frobenius norm."""
    if l_max is None:
        l_max = min(10, cache.n - 1)
    return zsph.project(zsph.random_initial_condition(seed, l_max), cache)

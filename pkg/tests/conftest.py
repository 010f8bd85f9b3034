import random

import pytest
from hypothesis import settings

from liss.dsl.syntax import parse
from liss.engine.maps import shipped_map

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")

AGGRESSIVE = """for(Unit u)
    u.harvest(1)
    u.train(Worker,EnemyDir,20)
    u.attack(Closest)
"""


@pytest.fixture(scope="session")
def nwr():
    return shipped_map("nwr_9x8")


@pytest.fixture(scope="session")
def lmo():
    return shipped_map("lmo_16x8")


@pytest.fixture(scope="session")
def aggressive():
    return parse(AGGRESSIVE)


@pytest.fixture(scope="session")
def empty_program():
    return parse("empty")


@pytest.fixture
def rng():
    return random.Random(1234)


CRITERIA: list = []


def record_criterion(name: str, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'}  {name}: {detail}"
    CRITERIA.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in CRITERIA:
            terminalreporter.write_line(line)

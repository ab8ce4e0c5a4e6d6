import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

ACCEPTANCE = {}


def random_dna(rng, n):
    return "".join(rng.choice("ACGT") for _ in range(n)).encode()


@pytest.fixture
def rng():
    return random.Random(12345)


@pytest.fixture
def acceptance():
    def record(number, passed, detail):
        ACCEPTANCE[number] = (passed, detail)
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}")

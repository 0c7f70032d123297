import json
import math
import random
from pathlib import Path

import pytest

from bianchi_maxwell.groups import BianchiGroup
from bianchi_maxwell.tensor import Sym3

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"

ALL_GROUPS = [BianchiGroup(k) for k in ("I", "II", "III", "IV", "V", "VI")] + [
    BianchiGroup("VII", a) for a in (0.5, 1.0, math.pi / 2, 2.5)
]


def random_spd(rng: random.Random, spread: float = 1.0, shift: float = 0.3) -> Sym3:
    L = [[rng.uniform(-spread, spread) for _ in range(3)] for _ in range(3)]
    rows = [[sum(L[i][k] * L[j][k] for k in range(3)) + (shift if i == j else 0.0) for j in range(3)]
            for i in range(3)]
    return Sym3.from_rows(rows)


def case_config(case_id: str) -> dict:
    return json.loads((CONFIG_DIR / f"case_{case_id}.json").read_text())


@pytest.fixture
def rng():
    return random.Random(12345)


ACCEPTANCE_LINES: dict[int, str] = {}


def record_criterion(number: int, ok: bool, detail: str) -> None:
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} ({detail})"
    ACCEPTANCE_LINES[number] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])

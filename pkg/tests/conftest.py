import sys
from pathlib import Path

import pytest

from annograph import load_config, read_native

DATA = Path(__file__).parent / "data"
sys.path.insert(0, str(Path(__file__).parent))


def load(stem, **kw):
    return read_native((DATA / f"{stem}.arcs").read_text(), (DATA / f"{stem}.times").read_text(), **kw)


@pytest.fixture
def sa1():
    return load("sa1", utterance_id="fjsp0:sa1")


@pytest.fixture
def sa1_config():
    return load_config(DATA / "sa1.cfg")


@pytest.fixture
def data_dir():
    return DATA


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        terminalreporter.write_line(results[number])

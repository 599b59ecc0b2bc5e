from pathlib import Path

import pytest

from puc import default_kb, default_params, parse_column, read_kb

DATA = Path(__file__).parent / "data"

# Freezer-volume style column: litres and cubic feet, two odd symbols, one bare value
FIXTURE1_CELLS = ["5.2 l", "180 L", "150 ltrs", "200 litres", "7 cu ft", "6 Cu", "300"]
FIXTURE1_LABELS = ["litre", "litre", "<anomalous>", "litre", "cubic foot",
                   "<anomalous>", "<missing>"]
CUBIC_FOOT_IN_LITRES = 28.316846592


@pytest.fixture(scope="session")
def fixture_kb():
    return read_kb(DATA / "fixture_kb.json")


@pytest.fixture(scope="session")
def fixture_params(fixture_kb):
    return default_params(fixture_kb)


@pytest.fixture(scope="session")
def kb():
    return default_kb()


@pytest.fixture(scope="session")
def params(kb):
    return default_params(kb)


@pytest.fixture
def fixture1_cells():
    return parse_column(FIXTURE1_CELLS)

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from rcagraph.model import equipment_taxonomy  # noqa: E402


@pytest.fixture
def taxonomy():
    return equipment_taxonomy()

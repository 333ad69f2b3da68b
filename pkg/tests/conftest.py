import sys
from pathlib import Path

import pytest

from binpart.core import build_instance

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture
def ex1():
    """Four types whose 15-unit segment packs into 15 full bins."""
    return build_instance([("0.21", 1200), ("0.27", 600), ("0.29", 600), ("0.52", 600)])


@pytest.fixture
def ex2():
    """Three types of which no two fit together."""
    return build_instance([("0.60", 1000), ("0.65", 1000), ("0.75", 1000)])

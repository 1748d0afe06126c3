import sys
from pathlib import Path

import pytest

from ksqkd import ksset

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture(scope="session")
def ks18():
    return ksset.builtin_ks18()


@pytest.fixture(scope="session")
def optimal_witness(ks18):
    return ksset.min_symbol_mismatch(ks18)

from __future__ import annotations

import pytest

from sphere7.clifford import build_clifford_system


@pytest.fixture(scope="session")
def cs():
    return build_clifford_system()

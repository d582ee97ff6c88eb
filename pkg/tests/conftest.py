import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]
# scripts/ holds the scripted backend used by record/replay equivalence tests.
sys.path.insert(0, str(ROOT / "scripts"))

from support import FIXTURES, replay_gateway  # noqa: E402


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def golden_gateway():
    return replay_gateway("golden")


@pytest.fixture
def golden_report_bytes() -> bytes:
    return (FIXTURES / "golden_report.json").read_bytes()

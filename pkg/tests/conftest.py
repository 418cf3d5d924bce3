from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def brownian_fixture_files() -> list[Path]:
    return sorted(FIXTURES.glob("brownian_T1_4096_seed*.csv"))

from __future__ import annotations

import sys
from pathlib import Path

import pytest

TESTS_DIR = Path(__file__).parent
sys.path.insert(0, str(TESTS_DIR))

from crumb.filterlist import load_filterlists
from crumb.psl import load_psl_file


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return TESTS_DIR / "fixtures"


@pytest.fixture(scope="session")
def psl_small(fixtures_dir):
    return load_psl_file(str(fixtures_dir / "psl_small.dat"))


@pytest.fixture(scope="session")
def psl_small_text(fixtures_dir) -> str:
    return (fixtures_dir / "psl_small.dat").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def oracle_filter_text(fixtures_dir) -> str:
    return (fixtures_dir / "filters_oracle.txt").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def mirror_filters(fixtures_dir):
    return load_filterlists([str(fixtures_dir / "mirror_filters.txt")])
